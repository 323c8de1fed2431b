//! Dense matrices built from Kronecker products, independent of the
//! in-place kernels. Used as an oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gate::{rotation_2x2, ControlBasis, GateOp};
use super::pauli::{Pauli, PauliWord};
use crate::error::{Error, Result};

/// Default largest register for which dense matrices are built.
pub const DENSE_QUBIT_CAP: usize = 12;

type CMat = DMatrix<Complex64>;

fn mat2(m: [[Complex64; 2]; 2]) -> CMat {
    CMat::from_fn(2, 2, |r, c| m[r][c])
}

/// Kronecker product with qubit 1 leftmost; `None` is identity.
fn kron_chain(factors: &[Option<CMat>]) -> CMat {
    let id = CMat::identity(2, 2);
    factors.iter().fold(CMat::identity(1, 1), |acc, f| {
        acc.kronecker(f.as_ref().unwrap_or(&id))
    })
}

fn placed(n: usize, items: &[(usize, CMat)]) -> CMat {
    let mut factors: Vec<Option<CMat>> = vec![None; n];
    for (q, m) in items {
        factors[q - 1] = Some(m.clone());
    }
    kron_chain(&factors)
}

/// Dense matrix of a Pauli word.
pub fn dense_pauli(word: &PauliWord) -> CMat {
    let factors: Vec<Option<CMat>> = word
        .letters()
        .iter()
        .map(|p| Some(mat2(p.matrix())))
        .collect();
    kron_chain(&factors)
}

fn projectors(basis: ControlBasis) -> [CMat; 2] {
    let h = Complex64::new(0.5, 0.0);
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    match basis {
        ControlBasis::Computational => [mat2([[l, o], [o, o]]), mat2([[o, o], [o, l]])],
        ControlBasis::XBasis => [mat2([[h, h], [h, h]]), mat2([[h, -h], [-h, h]])],
    }
}

/// Dense `2^n × 2^n` matrix of `gate` on an n-qubit register.
pub fn dense_unitary(gate: &GateOp, params: &[f64], n: usize) -> Result<CMat> {
    dense_unitary_capped(gate, params, n, DENSE_QUBIT_CAP)
}

pub fn dense_unitary_capped(gate: &GateOp, params: &[f64], n: usize, cap: usize) -> Result<CMat> {
    if n > cap {
        return Err(Error::TooLarge { n_qubits: n, cap });
    }
    gate.validate(n, params.len())?;
    let m = match gate {
        GateOp::PauliRotation { param, .. } => {
            let word = gate.generator(n).expect("rotation has a generator");
            let half = 0.5 * params[*param];
            let dim = 1usize << n;
            CMat::identity(dim, dim) * Complex64::new(half.cos(), 0.0)
                - dense_pauli(&word) * Complex64::new(0.0, half.sin())
        }
        GateOp::ControlledRotation {
            control,
            basis,
            target,
            branches,
        } => {
            let [p0, p1] = projectors(*basis);
            let g0 = mat2(rotation_2x2(
                branches[0].generator,
                params[branches[0].param],
            ));
            let g1 = mat2(rotation_2x2(
                branches[1].generator,
                params[branches[1].param],
            ));
            placed(n, &[(*control, p0), (*target, g0)])
                + placed(n, &[(*control, p1), (*target, g1)])
        }
        GateOp::Cnot { control, target } => {
            let [p0, p1] = projectors(ControlBasis::Computational);
            let x = mat2(Pauli::X.matrix());
            placed(n, &[(*control, p0)]) + placed(n, &[(*control, p1), (*target, x)])
        }
    };
    Ok(m)
}

/// Dense product `U_L ⋯ U_1` of a gate sequence.
pub fn dense_circuit(gates: &[GateOp], params: &[f64], n: usize) -> Result<CMat> {
    let dim = 1usize << n;
    let mut acc = CMat::identity(dim, dim);
    for g in gates {
        acc = dense_unitary(g, params, n)? * acc;
    }
    Ok(acc)
}
