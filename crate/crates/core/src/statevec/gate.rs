use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{i_pow, word_phase, Pauli, PauliWord};
use crate::error::{Error, Result};

type Mat2 = [[Complex64; 2]; 2];
type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Basis in which the control qubit of a conditioned rotation is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlBasis {
    /// Projectors onto |0⟩ and |1⟩.
    Computational,
    /// Projectors onto |+⟩ and |−⟩.
    XBasis,
}

/// A single-qubit rotation `exp(−i θ/2 · P)` on the target for one control outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub generator: Pauli,
    pub param: usize,
}

/// A gate acting on 1-based qubit indices whose angles are read from a
/// shared parameter vector by slot index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateOp {
    /// `exp(−i θ/2 · P)` where `word[k]` acts on `qubits[k]`.
    PauliRotation {
        qubits: Vec<usize>,
        word: Vec<Pauli>,
        param: usize,
    },
    /// `Π₀ ⊗ G₀(θ₀) + Π₁ ⊗ G₁(θ₁)`; `branches[0]` applies on outcome |0⟩ or |+⟩.
    ControlledRotation {
        control: usize,
        basis: ControlBasis,
        target: usize,
        branches: [Branch; 2],
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl GateOp {
    pub fn rotation(qubits: Vec<usize>, word: Vec<Pauli>, param: usize) -> Self {
        GateOp::PauliRotation {
            qubits,
            word,
            param,
        }
    }

    pub fn rx(qubit: usize, param: usize) -> Self {
        Self::rotation(vec![qubit], vec![Pauli::X], param)
    }

    pub fn ry(qubit: usize, param: usize) -> Self {
        Self::rotation(vec![qubit], vec![Pauli::Y], param)
    }

    pub fn rz(qubit: usize, param: usize) -> Self {
        Self::rotation(vec![qubit], vec![Pauli::Z], param)
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::PauliRotation { qubits, .. } => qubits.clone(),
            GateOp::ControlledRotation {
                control, target, ..
            } => vec![*control, *target],
            GateOp::Cnot { control, target } => vec![*control, *target],
        }
    }

    pub fn param_slots(&self) -> Vec<usize> {
        match self {
            GateOp::PauliRotation { param, .. } => vec![*param],
            GateOp::ControlledRotation { branches, .. } => {
                vec![branches[0].param, branches[1].param]
            }
            GateOp::Cnot { .. } => Vec::new(),
        }
    }

    /// Same gate with every parameter slot shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let mut g = self.clone();
        match &mut g {
            GateOp::PauliRotation { param, .. } => *param += offset,
            GateOp::ControlledRotation { branches, .. } => {
                for b in branches.iter_mut() {
                    b.param += offset;
                }
            }
            GateOp::Cnot { .. } => {}
        }
        g
    }

    /// Same gate with abstract qubit labels replaced through `map`.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut g = self.clone();
        match &mut g {
            GateOp::PauliRotation { qubits, .. } => {
                for q in qubits.iter_mut() {
                    *q = map(*q);
                }
            }
            GateOp::ControlledRotation {
                control, target, ..
            }
            | GateOp::Cnot { control, target } => {
                *control = map(*control);
                *target = map(*target);
            }
        }
        g
    }

    /// Checks qubit range, distinctness, word length and parameter slots.
    pub fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        if let GateOp::PauliRotation { qubits, word, .. } = self {
            if qubits.len() != word.len() {
                return Err(Error::LengthMismatch {
                    expected: qubits.len(),
                    actual: word.len(),
                });
            }
            if qubits.is_empty() {
                return Err(Error::InvalidArgument("rotation without qubits".into()));
            }
        }
        let qs = self.qubits();
        for (k, &q) in qs.iter().enumerate() {
            if q == 0 || q > n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            if qs[..k].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        for slot in self.param_slots() {
            if slot >= n_params {
                return Err(Error::ParamOutOfRange {
                    slot,
                    available: n_params,
                });
            }
        }
        Ok(())
    }

    /// Full-register Pauli word of a rotation gate.
    pub fn generator(&self, n_qubits: usize) -> Option<PauliWord> {
        match self {
            GateOp::PauliRotation { qubits, word, .. } => {
                let mut letters = vec![Pauli::I; n_qubits];
                for (&q, &p) in qubits.iter().zip(word) {
                    letters[q - 1] = p;
                }
                Some(PauliWord::new(letters))
            }
            _ => None,
        }
    }

    /// Applies the gate. Indices and slots must already be validated.
    pub(crate) fn apply_raw(&self, amps: &mut [Complex64], n: usize, params: &[f64]) {
        self.apply_signed(amps, n, params, 1.0)
    }

    /// Applies the inverse gate.
    pub(crate) fn apply_inverse_raw(&self, amps: &mut [Complex64], n: usize, params: &[f64]) {
        self.apply_signed(amps, n, params, -1.0)
    }

    fn apply_signed(&self, amps: &mut [Complex64], n: usize, params: &[f64], sign: f64) {
        match self {
            GateOp::PauliRotation {
                qubits,
                word,
                param,
            } => {
                let (flip, zs, n_y) = local_masks(qubits, word, n);
                rotate_pauli(amps, flip, zs, n_y, sign * params[*param]);
            }
            GateOp::ControlledRotation {
                control,
                basis,
                target,
                branches,
            } => {
                let g0 = rotation_2x2(branches[0].generator, sign * params[branches[0].param]);
                let g1 = rotation_2x2(branches[1].generator, sign * params[branches[1].param]);
                let m = controlled_4x4(*basis, &g0, &g1);
                apply_4x4(amps, n, *control, *target, &m);
            }
            GateOp::Cnot { control, target } => {
                let c = bit_of(*control, n);
                let t = bit_of(*target, n);
                for b in 0..amps.len() {
                    if b & c != 0 && b & t == 0 {
                        amps.swap(b, b | t);
                    }
                }
            }
        }
    }

    /// Replaces `amps` by `∂U/∂θ_k · amps`, where `k` indexes `param_slots()`.
    /// The result is not normalized.
    pub(crate) fn apply_derivative_raw(
        &self,
        amps: &mut [Complex64],
        n: usize,
        params: &[f64],
        k: usize,
    ) {
        match self {
            GateOp::PauliRotation {
                qubits,
                word,
                param,
            } => {
                debug_assert_eq!(k, 0);
                let (flip, zs, n_y) = local_masks(qubits, word, n);
                rotate_pauli(amps, flip, zs, n_y, params[*param]);
                apply_pauli_masks(amps, flip, zs, n_y);
                let f = Complex64::new(0.0, -0.5);
                for a in amps.iter_mut() {
                    *a *= f;
                }
            }
            GateOp::ControlledRotation {
                control,
                basis,
                target,
                branches,
            } => {
                let mut g = [[[ZERO; 2]; 2]; 2];
                let b = &branches[k];
                g[k] = rotation_derivative_2x2(b.generator, params[b.param]);
                let m = controlled_4x4(*basis, &g[0], &g[1]);
                apply_4x4(amps, n, *control, *target, &m);
            }
            GateOp::Cnot { .. } => unreachable!("CNOT has no parameters"),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::PauliRotation {
                qubits,
                word,
                param,
            } => {
                let w: String = word
                    .iter()
                    .map(|p| p.as_char().to_ascii_lowercase())
                    .collect();
                let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                write!(f, "R{w}(p{param}) on [{}]", qs.join(","))
            }
            GateOp::ControlledRotation {
                control,
                basis,
                target,
                branches,
            } => {
                let (o0, o1) = match basis {
                    ControlBasis::Computational => ("|0>", "|1>"),
                    ControlBasis::XBasis => ("|+>", "|->"),
                };
                write!(
                    f,
                    "ctrl {control} -> target {target}: {o0} R{}(p{}), {o1} R{}(p{})",
                    branches[0].generator.as_char().to_ascii_lowercase(),
                    branches[0].param,
                    branches[1].generator.as_char().to_ascii_lowercase(),
                    branches[1].param
                )
            }
            GateOp::Cnot { control, target } => write!(f, "CNOT {control} -> {target}"),
        }
    }
}

/// Basis-index bit for 1-based `qubit` (qubit 1 is the most significant bit).
#[inline]
pub(crate) fn bit_of(qubit: usize, n: usize) -> usize {
    1usize << (n - qubit)
}

fn local_masks(qubits: &[usize], word: &[Pauli], n: usize) -> (usize, usize, usize) {
    let mut flip = 0;
    let mut zs = 0;
    let mut n_y = 0;
    for (&q, &p) in qubits.iter().zip(word) {
        let bit = bit_of(q, n);
        if p.flips() {
            flip |= bit;
        }
        if p.signs() {
            zs |= bit;
        }
        if p == Pauli::Y {
            n_y += 1;
        }
    }
    (flip, zs, n_y)
}

/// `amps ← exp(−i θ/2 · P) amps` for the Pauli word given by its masks.
pub(crate) fn rotate_pauli(amps: &mut [Complex64], flip: usize, zs: usize, n_y: usize, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let base = i_pow(n_y);
    // −i·s
    let mis = Complex64::new(0.0, -s);
    if flip == 0 {
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= if (b & zs).count_ones().is_multiple_of(2) {
                plus
            } else {
                minus
            };
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - flip.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let b2 = b ^ flip;
        let x = amps[b];
        let y = amps[b2];
        // (Pψ)[b] = phase(b2)·ψ[b2], (Pψ)[b2] = phase(b)·ψ[b]
        amps[b] = x * c + mis * word_phase(b2, zs, base) * y;
        amps[b2] = y * c + mis * word_phase(b, zs, base) * x;
    }
}

/// `amps ← P amps`.
pub(crate) fn apply_pauli_masks(amps: &mut [Complex64], flip: usize, zs: usize, n_y: usize) {
    let base = i_pow(n_y);
    if flip == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            if (b & zs).count_ones() % 2 == 1 {
                *a = -*a;
            }
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - flip.leading_zeros());
    for b in 0..amps.len() {
        if b & top != 0 {
            continue;
        }
        let b2 = b ^ flip;
        let x = amps[b];
        let y = amps[b2];
        amps[b] = word_phase(b2, zs, base) * y;
        amps[b2] = word_phase(b, zs, base) * x;
    }
}

pub(crate) fn rotation_2x2(p: Pauli, theta: f64) -> Mat2 {
    let (s, c) = (0.5 * theta).sin_cos();
    let pm = p.matrix();
    let mis = Complex64::new(0.0, -s);
    let mut m = [[ZERO; 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            let id = if r == col { ONE } else { ZERO };
            m[r][col] = id * c + mis * pm[r][col];
        }
    }
    m
}

/// `d/dθ exp(−i θ/2 · P) = −i/2 · P · exp(−i θ/2 · P)`.
fn rotation_derivative_2x2(p: Pauli, theta: f64) -> Mat2 {
    let g = rotation_2x2(p, theta);
    let pm = p.matrix();
    let f = Complex64::new(0.0, -0.5);
    let mut m = [[ZERO; 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            m[r][col] = f * (pm[r][0] * g[0][col] + pm[r][1] * g[1][col]);
        }
    }
    m
}

/// Local 4×4 matrix over |control, target⟩ of `Π₀ ⊗ G₀ + Π₁ ⊗ G₁`.
fn controlled_4x4(basis: ControlBasis, g0: &Mat2, g1: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    match basis {
        ControlBasis::Computational => {
            for t in 0..2 {
                for u in 0..2 {
                    m[t][u] = g0[t][u];
                    m[2 + t][2 + u] = g1[t][u];
                }
            }
        }
        ControlBasis::XBasis => {
            // |+⟩⟨+| = (I + X)/2, |−⟩⟨−| = (I − X)/2
            for c in 0..2 {
                for d in 0..2 {
                    for t in 0..2 {
                        for u in 0..2 {
                            let sum = (g0[t][u] + g1[t][u]) * 0.5;
                            let diff = (g0[t][u] - g1[t][u]) * 0.5;
                            m[2 * c + t][2 * d + u] = if c == d { sum } else { diff };
                        }
                    }
                }
            }
        }
    }
    m
}

/// Applies a 4×4 matrix over the local basis |q1, q2⟩ (index 2·v1 + v2).
fn apply_4x4(amps: &mut [Complex64], n: usize, q1: usize, q2: usize, m: &Mat4) {
    let b1 = bit_of(q1, n);
    let b2 = bit_of(q2, n);
    let offsets = [0, b2, b1, b1 | b2];
    for base in 0..amps.len() {
        if base & (b1 | b2) != 0 {
            continue;
        }
        let v = [
            amps[base],
            amps[base | b2],
            amps[base | b1],
            amps[base | b1 | b2],
        ];
        for (r, off) in offsets.iter().enumerate() {
            let row = &m[r];
            amps[base | off] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_catches_bad_indices() {
        let g = GateOp::rotation(vec![1, 1], vec![Pauli::X, Pauli::X], 0);
        assert!(matches!(g.validate(2, 1), Err(Error::DuplicateQubit(1))));
        let g = GateOp::rx(3, 0);
        assert!(matches!(
            g.validate(2, 1),
            Err(Error::QubitOutOfRange { qubit: 3, .. })
        ));
        let g = GateOp::rx(0, 0);
        assert!(g.validate(2, 1).is_err());
        let g = GateOp::rx(1, 4);
        assert!(matches!(
            g.validate(2, 1),
            Err(Error::ParamOutOfRange { .. })
        ));
        let g = GateOp::Cnot {
            control: 2,
            target: 2,
        };
        assert!(g.validate(2, 0).is_err());
    }

    #[test]
    fn shift_and_relabel() {
        let g = GateOp::ControlledRotation {
            control: 2,
            basis: ControlBasis::XBasis,
            target: 1,
            branches: [
                Branch {
                    generator: Pauli::X,
                    param: 0,
                },
                Branch {
                    generator: Pauli::X,
                    param: 1,
                },
            ],
        };
        let h = g.shifted(5).relabeled(|q| q * 3);
        assert_eq!(h.param_slots(), vec![5, 6]);
        assert_eq!(h.qubits(), vec![6, 3]);
    }
}
