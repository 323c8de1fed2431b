use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::XorMaskRep;
use crate::error::{Error, Result};

/// Bijection on basis indices `{0, …, size − 1}`; `forward[k]` is the image of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisPermutation {
    forward: Vec<usize>,
}

impl BasisPermutation {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; forward.len()];
        for &f in &forward {
            if f >= forward.len() {
                return Err(Error::InvalidPermutation(format!(
                    "image {f} out of range {}",
                    forward.len()
                )));
            }
            if std::mem::replace(&mut seen[f], true) {
                return Err(Error::InvalidPermutation(format!("image {f} repeated")));
            }
        }
        Ok(Self { forward })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            forward: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.forward[k]
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(k, &f)| k == f)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.forward.len()];
        for (k, &f) in self.forward.iter().enumerate() {
            inv[f] = k;
        }
        Self { forward: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(format!(
                "{} vs {}",
                self.size(),
                other.size()
            )));
        }
        Ok(Self {
            forward: other.forward.iter().map(|&k| self.forward[k]).collect(),
        })
    }

    /// Dense matrix `A` with `A|k⟩ = |forward[k]⟩`.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |r, c| {
            if self.forward[c] == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Checks `A·R_source·A⁻¹ = R_target` as integer maps:
    /// `forward[b ⊕ m_src] = forward[b] ⊕ m_tgt` for every `b`.
    pub fn intertwines(&self, source: &XorMaskRep, target: &XorMaskRep) -> bool {
        if source.dim() != self.size() || target.dim() != self.size() {
            return false;
        }
        let (ms, mt) = (source.mask(), target.mask());
        (0..self.size()).all(|b| self.forward[b ^ ms] == self.forward[b] ^ mt)
    }

    /// One `k → forward[k]` line per basis index.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, f) in self.forward.iter().enumerate() {
            let _ = writeln!(out, "{k} → {f}");
        }
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text). `->` is accepted for `→`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, f) = line
                .split_once('→')
                .or_else(|| line.split_once("->"))
                .ok_or_else(|| Error::InvalidPermutation(format!("bad line {line:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidPermutation(format!("{s:?}: {e}")))
            };
            pairs.push((parse(k)?, parse(f)?));
        }
        let mut forward = vec![usize::MAX; pairs.len()];
        for (k, f) in pairs {
            if k >= forward.len() || forward[k] != usize::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "source index {k} invalid or repeated"
                )));
            }
            forward[k] = f;
        }
        Self::new(forward)
    }
}

/// Builds a permutation intertwiner `A` with `A·R_source(g)·A⁻¹ = R_target(g)`
/// by orbit pairing.
///
/// Both masks split the basis into 2-cycles `{b, b ⊕ m}`. Source orbits are
/// visited by ascending representative (`b < b ⊕ m_src`) and each is bound,
/// in order, to the lowest unused target orbit `(t, t ⊕ m_tgt)` with
/// `t < t ⊕ m_tgt`, sending `b → t` and `b ⊕ m_src → t ⊕ m_tgt`.
pub fn build_intertwiner(source: &XorMaskRep, target: &XorMaskRep) -> Result<BasisPermutation> {
    if source.n_qubits() != target.n_qubits() {
        return Err(Error::SizeMismatch(format!(
            "source on {} qubits, target on {}",
            source.n_qubits(),
            target.n_qubits()
        )));
    }
    if source.is_trivial() || target.is_trivial() {
        return Err(Error::InvalidRep(
            "intertwiner needs nonzero source and target masks".into(),
        ));
    }
    let dim = source.dim();
    let (ms, mt) = (source.mask(), target.mask());
    let mut targets = (0..dim).filter(|&t| t < t ^ mt);
    let mut forward = vec![0usize; dim];
    for b in (0..dim).filter(|&b| b < b ^ ms) {
        let t = targets.next().expect("orbit counts agree");
        forward[b] = t;
        forward[b ^ ms] = t ^ mt;
    }
    BasisPermutation::new(forward)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(BasisPermutation::new(vec![0, 0]).is_err());
        assert!(BasisPermutation::new(vec![0, 2]).is_err());
        assert!(BasisPermutation::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn equal_masks_give_identity() {
        for m in ["01", "10", "11"] {
            let r: XorMaskRep = m.parse().unwrap();
            assert!(build_intertwiner(&r, &r).unwrap().is_identity());
        }
        let r: XorMaskRep = "0011010".parse().unwrap();
        assert!(build_intertwiner(&r, &r).unwrap().is_identity());
    }

    #[test]
    fn two_qubit_worked_example() {
        let a = build_intertwiner(&"01".parse().unwrap(), &"11".parse().unwrap()).unwrap();
        assert_eq!(a.forward(), &[0, 3, 1, 2]);
        // A·R·A⁻¹ = R′ as dense matrices
        let src: XorMaskRep = "01".parse().unwrap();
        let tgt: XorMaskRep = "11".parse().unwrap();
        let lhs = a.dense() * src.dense() * a.inverse().dense();
        assert_eq!(lhs, tgt.dense());
    }

    #[test]
    fn zero_mask_rejected() {
        assert!(build_intertwiner(&"00".parse().unwrap(), &"11".parse().unwrap()).is_err());
        assert!(build_intertwiner(&"01".parse().unwrap(), &"00".parse().unwrap()).is_err());
        assert!(build_intertwiner(&"01".parse().unwrap(), &"011".parse().unwrap()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = BasisPermutation::new(vec![0, 3, 1, 2]).unwrap();
        let text = a.to_text();
        assert_eq!(text, "0 → 0\n1 → 3\n2 → 1\n3 → 2\n");
        assert_eq!(BasisPermutation::from_text(&text).unwrap(), a);
        assert_eq!(
            BasisPermutation::from_text("1 -> 0\n0 -> 1")
                .unwrap()
                .forward(),
            &[1, 0]
        );
        assert!(BasisPermutation::from_text("0 → 1\n0 → 0").is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = BasisPermutation::new(vec![2, 0, 3, 1]).unwrap();
        assert!(a.compose(&a.inverse()).unwrap().is_identity());
        assert!(a.inverse().compose(&a).unwrap().is_identity());
    }
}
