//! Two-element label-symmetry groups represented as XOR-mask involutions.
//!
//! A representation element is a tensor product of `I` and `X` factors acting
//! as `|b⟩ → |b ⊕ mask⟩`. The reflection and 180° rotation of an amplitude
//! embedded image are both of this form, and so is every representation
//! reachable from them by a basis permutation.

mod local;
mod permutation;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{bit_of, PauliWord, Statevector, MAX_QUBITS};

pub use local::{restrict_to_pair, ActiveRep, LocalMask, LocalRepSet};
pub use permutation::{build_intertwiner, BasisPermutation};

/// Nontrivial element `g` of a Z₂ representation: `R(g)|b⟩ = |b ⊕ mask⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct XorMaskRep {
    n_qubits: usize,
    mask: usize,
}

impl XorMaskRep {
    /// `mask` uses basis-index bits (qubit 1 is the most significant bit).
    pub fn new(n_qubits: usize, mask: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidRep(format!("qubit count {n_qubits}")));
        }
        if mask >> n_qubits != 0 {
            return Err(Error::InvalidRep(format!(
                "mask {mask:#b} wider than {n_qubits} qubits"
            )));
        }
        Ok(Self { n_qubits, mask })
    }

    /// Builds from per-qubit flags, qubit 1 first.
    pub fn from_flags(flags: &[bool]) -> Result<Self> {
        let n = flags.len();
        let mask = flags
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .fold(0usize, |m, (pos, _)| m | (1 << (n - 1 - pos)));
        Self::new(n, mask)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_trivial(&self) -> bool {
        self.mask == 0
    }

    /// True when the representation carries `X` on the 1-based `qubit`.
    pub fn has_x(&self, qubit: usize) -> bool {
        self.mask & bit_of(qubit, self.n_qubits) != 0
    }

    pub fn flags(&self) -> Vec<bool> {
        (1..=self.n_qubits).map(|q| self.has_x(q)).collect()
    }

    /// The representation element as a Pauli word.
    pub fn as_pauli_word(&self) -> PauliWord {
        self.to_string()
            .replace('0', "I")
            .replace('1', "X")
            .parse()
            .expect("I/X word")
    }

    /// Applies `R(g)`: amplitude at `b ⊕ mask` is the input amplitude at `b`.
    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(format!(
                "representation on {} qubits, state on {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let amps = state.amplitudes();
        let out = (0..amps.len()).map(|b| amps[b ^ self.mask]).collect();
        Ok(Statevector::from_raw(self.n_qubits, out))
    }

    /// Dense permutation matrix of `R(g)`.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |r, c| {
            if r == c ^ self.mask {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Restriction to surviving qubits after tracing out the 1-based positions in `traced`,
    /// reindexed in surviving order.
    pub fn reduce(&self, traced: &[usize]) -> Result<Self> {
        for &q in traced {
            if q == 0 || q > self.n_qubits {
                return Err(Error::InactiveQubit(q));
            }
        }
        let flags: Vec<bool> = (1..=self.n_qubits)
            .filter(|q| !traced.contains(q))
            .map(|q| self.has_x(q))
            .collect();
        if flags.is_empty() {
            return Err(Error::InvalidRep("cannot trace out every qubit".into()));
        }
        Self::from_flags(&flags)
    }

    /// Tensor-product notation with explicit qubit labels, e.g. `I1 ⊗ I3 ⊗ X5 ⊗ X7`.
    pub fn tensor_notation(&self, labels: &[usize]) -> String {
        debug_assert_eq!(labels.len(), self.n_qubits);
        labels
            .iter()
            .zip(self.flags())
            .map(|(l, x)| format!("{}{l}", if x { 'X' } else { 'I' }))
            .collect::<Vec<_>>()
            .join(" ⊗ ")
    }
}

impl fmt::Display for XorMaskRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in self.flags() {
            f.write_str(if x { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for XorMaskRep {
    type Err = Error;

    /// Parses a bit string such as `00001111`, qubit 1 first.
    fn from_str(s: &str) -> Result<Self> {
        let flags = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidRep(format!("mask character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flags(&flags)
    }
}

impl Serialize for XorMaskRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for XorMaskRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Label symmetry of an image dataset. Both are the group Z₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Reflection about the vertical axis (column order reversed).
    Reflection,
    /// Rotation by 180° (row and column order reversed).
    Rotation,
}

impl Symmetry {
    /// Representation under standard row-major amplitude embedding of a
    /// `2^n1 × 2^n2` image.
    pub fn standard_rep(self, n1: usize, n2: usize) -> Result<XorMaskRep> {
        match self {
            Symmetry::Reflection => reflection_rep(n1, n2),
            Symmetry::Rotation => rotation_rep(n1 + n2),
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Reflection => "reflection",
            Symmetry::Rotation => "rotation",
        })
    }
}

impl FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reflection" | "ref" => Ok(Symmetry::Reflection),
            "rotation" | "rot" | "rotation180" => Ok(Symmetry::Rotation),
            other => Err(Error::InvalidArgument(format!(
                "unknown symmetry {other:?}"
            ))),
        }
    }
}

/// Reflection about the vertical axis of a `2^n1 × 2^n2` image under
/// row-major amplitude embedding: identity on row qubits, `X` on column qubits.
pub fn reflection_rep(n1: usize, n2: usize) -> Result<XorMaskRep> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidRep(
            "row and column qubit counts must be positive".into(),
        ));
    }
    let n = n1 + n2;
    XorMaskRep::new(n, (1usize << n2) - 1)
}

/// 180° rotation under row-major amplitude embedding: `X` on every qubit.
pub fn rotation_rep(n: usize) -> Result<XorMaskRep> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidRep(format!("qubit count {n}")));
    }
    XorMaskRep::new(n, (1usize << n) - 1)
}

/// `I ⊗ X ⊗ I ⊗ X ⊗ …`: `X` on the even-numbered qubits.
pub fn alternating_rep(n: usize) -> Result<XorMaskRep> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidRep(format!(
            "alternating representation needs an even qubit count, got {n}"
        )));
    }
    let flags: Vec<bool> = (1..=n).map(|q| q % 2 == 0).collect();
    XorMaskRep::from_flags(&flags)
}

/// `0^{n/2} 1^{n/2}`: identity on the first half of the register, `X` on the second.
pub fn half_rep(n: usize) -> Result<XorMaskRep> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidRep(format!(
            "half representation needs an even qubit count, got {n}"
        )));
    }
    reflection_rep(n / 2, n / 2)
}

/// Analytic commutation test: a Pauli word commutes with an `I/X` tensor
/// product iff the number of positions pairing `X` with `Y` or `Z` is even.
pub fn pauli_word_commutes(word: &PauliWord, rep: &XorMaskRep) -> Result<bool> {
    if word.n_qubits() != rep.n_qubits() {
        return Err(Error::SizeMismatch(format!(
            "word on {} qubits, representation on {}",
            word.n_qubits(),
            rep.n_qubits()
        )));
    }
    let (_, sign, _) = word.masks();
    Ok((sign & rep.mask()).count_ones().is_multiple_of(2))
}

/// Frobenius norm of `R(g)·Op − Op·R(g)`.
pub fn dense_commutator_norm(op: &DMatrix<Complex64>, rep: &XorMaskRep) -> Result<f64> {
    let dim = rep.dim();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::SizeMismatch(format!(
            "operator is {}x{}, representation dimension {dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    let r = rep.dense();
    Ok((&r * op - op * &r).norm())
}

/// Commutation threshold on dense commutator norms.
pub const COMMUTATION_TOL: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::dense_pauli;

    #[test]
    fn standard_representations() {
        assert_eq!(reflection_rep(1, 1).unwrap().to_string(), "01");
        assert_eq!(reflection_rep(4, 4).unwrap().to_string(), "00001111");
        assert_eq!(reflection_rep(5, 5).unwrap().to_string(), "0000011111");
        assert_eq!(reflection_rep(2, 3).unwrap().to_string(), "00111");
        assert_eq!(rotation_rep(2).unwrap().to_string(), "11");
        assert_eq!(rotation_rep(8).unwrap().to_string(), "11111111");
        assert_eq!(rotation_rep(10).unwrap().to_string(), "1111111111");
        assert_eq!(alternating_rep(2).unwrap().to_string(), "01");
        assert_eq!(alternating_rep(4).unwrap().to_string(), "0101");
        assert_eq!(alternating_rep(8).unwrap().to_string(), "01010101");
        assert!(alternating_rep(5).is_err());
        assert!(reflection_rep(0, 3).is_err());
    }

    #[test]
    fn word_forms() {
        assert_eq!(
            reflection_rep(1, 1).unwrap().as_pauli_word().to_string(),
            "IX"
        );
        assert_eq!(rotation_rep(2).unwrap().as_pauli_word().to_string(), "XX");
    }

    #[test]
    fn apply_rep_examples() {
        let s = Statevector::from_real(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        let a = s.amplitudes().to_vec();
        let id = XorMaskRep::new(2, 0).unwrap().apply(&s).unwrap();
        assert_eq!(id, s);
        let r = reflection_rep(1, 1).unwrap().apply(&s).unwrap();
        assert_eq!(r.amplitudes(), &[a[1], a[0], a[3], a[2]]);
        let r = rotation_rep(2).unwrap().apply(&s).unwrap();
        assert_eq!(r.amplitudes(), &[a[3], a[2], a[1], a[0]]);
        assert!(rotation_rep(3).unwrap().apply(&s).is_err());
    }

    #[test]
    fn commutation_examples() {
        let xx: PauliWord = "XX".parse().unwrap();
        let zi: PauliWord = "ZI".parse().unwrap();
        let yy: PauliWord = "YY".parse().unwrap();
        let m11: XorMaskRep = "11".parse().unwrap();
        let m10: XorMaskRep = "10".parse().unwrap();
        assert!(pauli_word_commutes(&xx, &m11).unwrap());
        assert!(!pauli_word_commutes(&zi, &m10).unwrap());
        assert!(pauli_word_commutes(&yy, &m11).unwrap());
        assert!(dense_commutator_norm(&dense_pauli(&yy), &m11).unwrap() < COMMUTATION_TOL);
        assert!(pauli_word_commutes(&xx, &"111".parse().unwrap()).is_err());
    }

    #[test]
    fn dense_commutator_examples() {
        use crate::statevec::{dense_unitary, GateOp, Pauli};
        let id = DMatrix::<Complex64>::identity(4, 4);
        for m in ["00", "01", "10", "11"] {
            assert_eq!(
                dense_commutator_norm(&id, &m.parse().unwrap()).unwrap(),
                0.0
            );
        }
        let rxx = dense_unitary(
            &GateOp::rotation(vec![1, 2], vec![Pauli::X, Pauli::X], 0),
            &[0.7],
            2,
        )
        .unwrap();
        assert!(dense_commutator_norm(&rxx, &"11".parse().unwrap()).unwrap() < 1e-12);
        let rz = dense_unitary(&GateOp::rz(2, 0), &[0.7], 2).unwrap();
        assert!(dense_commutator_norm(&rz, &"01".parse().unwrap()).unwrap() > 1e-3);
        assert!(dense_commutator_norm(&rz, &"011".parse().unwrap()).is_err());
    }

    #[test]
    fn reduce_examples() {
        let r = reflection_rep(5, 5)
            .unwrap()
            .reduce(&[2, 4, 6, 8, 10])
            .unwrap();
        assert_eq!(r.to_string(), "00011");
        assert_eq!(
            r.tensor_notation(&[1, 3, 5, 7, 9]),
            "I1 ⊗ I3 ⊗ I5 ⊗ X7 ⊗ X9"
        );
        let r = reflection_rep(4, 4).unwrap().reduce(&[2, 4, 6, 8]).unwrap();
        assert_eq!(r.to_string(), "0011");
        let r = rotation_rep(6).unwrap().reduce(&[1, 5]).unwrap();
        assert_eq!(r.to_string(), "1111");
        assert!(rotation_rep(2).unwrap().reduce(&[1, 2]).is_err());
        assert!(rotation_rep(2).unwrap().reduce(&[3]).is_err());
    }

    #[test]
    fn mask_parsing_rejects_garbage() {
        assert!("01a".parse::<XorMaskRep>().is_err());
        assert!(XorMaskRep::new(2, 4).is_err());
    }
}
