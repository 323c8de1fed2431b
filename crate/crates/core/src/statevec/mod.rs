//! Exact pure-state simulation over `2^n` complex amplitudes.
//!
//! Qubit 1 is the most significant bit of the basis index. Gates are applied
//! in place over amplitude strides; [`dense`] builds full matrices for
//! cross-checking only.

pub mod dense;
mod gate;
mod pauli;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symmetry::BasisPermutation;

pub use dense::{dense_circuit, dense_pauli, dense_unitary, dense_unitary_capped, DENSE_QUBIT_CAP};
pub(crate) use gate::{apply_pauli_masks, bit_of};
pub use gate::{Branch, ControlBasis, GateOp};
pub use pauli::{Pauli, PauliWord};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Normalized n-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Normalized copy of `values`.
    pub fn from_amplitudes(values: &[Complex64], n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if values.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                actual: values.len(),
            });
        }
        let norm = values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalizable);
        }
        let amps = values.iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    /// Normalized state from real amplitudes.
    pub fn from_real(values: &[f64], n_qubits: usize) -> Result<Self> {
        let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_amplitudes(&c, n_qubits)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} >= {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(size_mismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `gate` with angles read from `params` by slot.
    pub fn apply_gate(&mut self, gate: &GateOp, params: &[f64]) -> Result<()> {
        gate.validate(self.n_qubits, params.len())?;
        gate.apply_raw(&mut self.amps, self.n_qubits, params);
        Ok(())
    }

    /// Applies `gates` in order.
    pub fn apply_gates(&mut self, gates: &[GateOp], params: &[f64]) -> Result<()> {
        for g in gates {
            g.validate(self.n_qubits, params.len())?;
        }
        for g in gates {
            g.apply_raw(&mut self.amps, self.n_qubits, params);
        }
        Ok(())
    }

    /// `⟨Ψ|P|Ψ⟩`.
    pub fn expectation(&self, obs: &PauliWord) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(size_mismatch(self.n_qubits, obs.n_qubits()));
        }
        Ok(expectation_raw(&self.amps, obs))
    }

    /// Output amplitude at `perm(k)` is the input amplitude at `k`.
    pub fn apply_basis_permutation(&self, perm: &BasisPermutation) -> Result<Statevector> {
        if perm.size() != self.dim() {
            return Err(Error::SizeMismatch(format!(
                "permutation of size {} on state of dimension {}",
                perm.size(),
                self.dim()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, &a) in self.amps.iter().enumerate() {
            out[perm.apply(k)] = a;
        }
        Ok(Statevector::from_raw(self.n_qubits, out))
    }
}

pub(crate) fn expectation_raw(amps: &[Complex64], obs: &PauliWord) -> f64 {
    let (flip, sign, n_y) = obs.masks();
    let base = pauli::i_pow(n_y);
    // ⟨ψ|P|ψ⟩ = Σ_b conj(ψ[b ⊕ flip]) · phase(b) · ψ[b]
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, &a) in amps.iter().enumerate() {
        acc += amps[b ^ flip].conj() * pauli::word_phase(b, sign, base) * a;
    }
    acc.re
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn size_mismatch(a: usize, b: usize) -> Error {
    Error::SizeMismatch(format!("{a} qubits vs {b} qubits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn from_amplitudes_normalizes() {
        let s = Statevector::from_amplitudes(&[c(1.0), c(0.0), c(0.0), c(0.0)], 2).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        let s = Statevector::from_amplitudes(&[c(1.0); 4], 2).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(0.5)).norm() < 1e-15);
        }
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_amplitudes_errors() {
        assert!(matches!(
            Statevector::from_amplitudes(&[c(0.0); 4], 2),
            Err(Error::Unnormalizable)
        ));
        assert!(matches!(
            Statevector::from_amplitudes(&[c(1.0); 3], 2),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn rx_pi_flips_z() {
        let mut s = Statevector::basis(1, 0).unwrap();
        s.apply_gate(&GateOp::rx(1, 0), &[PI]).unwrap();
        let z = s.expectation(&"Z".parse().unwrap()).unwrap();
        assert!((z + 1.0).abs() < 1e-12);
        // −i|1⟩
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn rxx_zero_is_identity() {
        let s0 = Statevector::from_amplitudes(
            &[
                Complex64::new(0.3, 0.1),
                c(-0.2),
                Complex64::new(0.0, 0.7),
                c(0.4),
            ],
            2,
        )
        .unwrap();
        let mut s = s0.clone();
        s.apply_gate(
            &GateOp::rotation(vec![1, 2], vec![Pauli::X, Pauli::X], 0),
            &[0.0],
        )
        .unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn simple_expectations() {
        let zero = Statevector::basis(1, 0).unwrap();
        let plus = Statevector::from_real(&[1.0, 1.0], 1).unwrap();
        let z: PauliWord = "Z".parse().unwrap();
        let x: PauliWord = "X".parse().unwrap();
        assert!((zero.expectation(&z).unwrap() - 1.0).abs() < 1e-15);
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!(zero.expectation(&x).unwrap().abs() < 1e-15);
        assert!(zero.expectation(&"ZZ".parse().unwrap()).is_err());
    }

    #[test]
    fn apply_gate_rejects_out_of_range() {
        let mut s = Statevector::basis(2, 0).unwrap();
        assert!(s.apply_gate(&GateOp::rx(3, 0), &[0.1]).is_err());
        assert!(s.apply_gate(&GateOp::rx(1, 1), &[0.1]).is_err());
    }

    #[test]
    fn basis_permutation_moves_amplitudes() {
        let s = Statevector::from_real(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        let perm = BasisPermutation::new(vec![0, 3, 1, 2]).unwrap();
        let out = s.apply_basis_permutation(&perm).unwrap();
        let a = s.amplitudes();
        assert_eq!(out.amplitudes(), &[a[0], a[2], a[3], a[1]]);
        let back = out.apply_basis_permutation(&perm.inverse()).unwrap();
        assert_eq!(back, s);
        let id = s
            .apply_basis_permutation(&BasisPermutation::identity(4))
            .unwrap();
        assert_eq!(id, s);
        assert!(s
            .apply_basis_permutation(&BasisPermutation::identity(8))
            .is_err());
    }
}
