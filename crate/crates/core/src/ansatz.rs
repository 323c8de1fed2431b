//! Two-qubit convolutional (1–5) and pooling (6–9) ansatze.
//!
//! Templates act on abstract qubits `a = 1` and `b = 2`. For pooling ansatze
//! `a` is the retained target and `b` the traced control. Parameter slots run
//! from 0 to `param_count − 1` in template order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{Branch, ControlBasis, GateOp, Pauli};
use crate::symmetry::{pauli_word_commutes, LocalMask};

const A: usize = 1;
const B: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzRole {
    Convolutional,
    Pooling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub id: u8,
    pub role: AnsatzRole,
    pub gates: Vec<GateOp>,
    pub param_count: usize,
    /// `{I, X}` words on `(a, b)` the ansatz commutes with for all parameters.
    pub equivariance_set: BTreeSet<LocalMask>,
    pub summary: &'static str,
}

impl AnsatzSpec {
    /// Gates on the named qubits, parameter slots `0..param_count` reading `params`.
    pub fn instantiate(&self, qubits: (usize, usize), params: &[f64]) -> Result<Vec<GateOp>> {
        if params.len() != self.param_count {
            return Err(Error::LengthMismatch {
                expected: self.param_count,
                actual: params.len(),
            });
        }
        if qubits.0 == qubits.1 {
            return Err(Error::DuplicateQubit(qubits.0));
        }
        Ok(self.place(qubits, 0))
    }

    /// Gates on the named qubits with parameter slots starting at `first_slot`.
    pub fn place(&self, qubits: (usize, usize), first_slot: usize) -> Vec<GateOp> {
        self.gates
            .iter()
            .map(|g| {
                g.relabeled(|q| if q == A { qubits.0 } else { qubits.1 })
                    .shifted(first_slot)
            })
            .collect()
    }

    /// Generator-level commutation check against a local `{I, X}` word.
    ///
    /// Rotations use the Pauli parity rule. A conditioned rotation commutes
    /// with `X` on its control iff the control is read in the x basis, and
    /// with `X` on its target iff both branch generators are `I` or `X`.
    pub fn generators_commute(&self, m: LocalMask) -> bool {
        let x_on = |q: usize| if q == A { m.on_a } else { m.on_b };
        self.gates.iter().all(|g| match g {
            GateOp::PauliRotation { .. } => {
                let word = g.generator(2).expect("rotation");
                pauli_word_commutes(&word, &m.as_rep()).expect("two-qubit word")
            }
            GateOp::ControlledRotation {
                control,
                basis,
                target,
                branches,
            } => {
                let control_ok = !x_on(*control) || *basis == ControlBasis::XBasis;
                let target_ok = !x_on(*target) || branches.iter().all(|b| !b.generator.signs());
                control_ok && target_ok
            }
            GateOp::Cnot { control, .. } => !x_on(*control),
        })
    }

    /// Multi-line human-readable description.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let role = match self.role {
            AnsatzRole::Convolutional => "convolutional",
            AnsatzRole::Pooling => "pooling",
        };
        let _ = writeln!(
            out,
            "circuit {} ({role}, {} params): {}",
            self.id, self.param_count, self.summary
        );
        for g in &self.gates {
            let _ = writeln!(
                out,
                "  {}",
                g.to_string()
                    .replace("[1,2]", "[a,b]")
                    .replace("[1]", "[a]")
                    .replace("[2]", "[b]")
            );
        }
        let set: Vec<String> = self
            .equivariance_set
            .iter()
            .map(|m| m.to_string())
            .collect();
        let _ = writeln!(out, "  equivariant under: {{{}}}", set.join(", "));
        out
    }
}

fn rot(qubits: &[usize], word: &[Pauli], slot: usize) -> GateOp {
    GateOp::rotation(qubits.to_vec(), word.to_vec(), slot)
}

fn pool(basis: ControlBasis, on0: Pauli, slot0: usize, on1: Pauli, slot1: usize) -> GateOp {
    GateOp::ControlledRotation {
        control: B,
        basis,
        target: A,
        branches: [
            Branch {
                generator: on0,
                param: slot0,
            },
            Branch {
                generator: on1,
                param: slot1,
            },
        ],
    }
}

fn set(words: &[LocalMask]) -> BTreeSet<LocalMask> {
    words.iter().copied().collect()
}

fn build_catalog() -> BTreeMap<u8, AnsatzSpec> {
    use LocalMask as M;
    use Pauli::{X, Y, Z};
    let conv = |id, gates: Vec<GateOp>, eq: &[LocalMask], summary| AnsatzSpec {
        id,
        role: AnsatzRole::Convolutional,
        param_count: gates
            .iter()
            .flat_map(|g| g.param_slots())
            .max()
            .map_or(0, |m| m + 1),
        gates,
        equivariance_set: set(eq),
        summary,
    };
    let pooling = |id, gate: GateOp, eq: &[LocalMask], summary| AnsatzSpec {
        id,
        role: AnsatzRole::Pooling,
        gates: vec![gate],
        param_count: 2,
        equivariance_set: set(eq),
        summary,
    };
    let entries = vec![
        conv(
            1,
            vec![
                rot(&[A], &[X], 0),
                rot(&[B], &[X], 1),
                rot(&[A, B], &[X, X], 2),
            ],
            &M::ALL,
            "Rx(a), Rx(b), Rxx(a,b)",
        ),
        conv(
            2,
            vec![
                rot(&[A, B], &[Y, Y], 0),
                rot(&[A, B], &[Z, Z], 1),
                rot(&[A, B], &[X, X], 2),
            ],
            &[M::II, M::XX],
            "Ryy, Rzz, Rxx",
        ),
        conv(
            3,
            vec![
                rot(&[A, B], &[Y, Z], 0),
                rot(&[A, B], &[Z, Y], 1),
                rot(&[A, B], &[X, X], 2),
            ],
            &[M::II, M::XX],
            "Ryz, Rzy, Rxx",
        ),
        conv(
            4,
            vec![rot(&[A], &[Z], 0), rot(&[A], &[Y], 1), rot(&[B], &[X], 2)],
            &[M::II, M::IX],
            "Rz(a), Ry(a), Rx(b)",
        ),
        conv(
            5,
            vec![
                rot(&[A], &[Z], 0),
                rot(&[A], &[Y], 1),
                rot(&[A], &[Z], 2),
                rot(&[B], &[Z], 3),
                rot(&[B], &[Y], 4),
                rot(&[B], &[Z], 5),
                GateOp::Cnot {
                    control: A,
                    target: B,
                },
            ],
            &[M::II],
            "Rot(a), Rot(b), CNOT(a→b); Rot(θ1,θ2,θ3) = Rz(θ3)Ry(θ2)Rz(θ1)",
        ),
        pooling(
            6,
            pool(ControlBasis::XBasis, X, 0, X, 1),
            &M::ALL,
            "x-basis control b: |+> Rx(φ1), |-> Rx(φ2) on a",
        ),
        pooling(
            7,
            pool(ControlBasis::XBasis, Y, 0, Y, 1),
            &[M::II, M::IX],
            "x-basis control b: |+> Ry(φ1), |-> Ry(φ2) on a",
        ),
        pooling(
            8,
            pool(ControlBasis::XBasis, Z, 0, X, 1),
            &[M::II, M::IX],
            "x-basis control b: |+> Rz(φ1), |-> Rx(φ2) on a",
        ),
        // φ1 drives the |1⟩ branch, φ2 the |0⟩ branch
        pooling(
            9,
            pool(ControlBasis::Computational, X, 1, Z, 0),
            &[M::II],
            "computational control b: |1> Rz(φ1), |0> Rx(φ2) on a",
        ),
    ];
    entries.into_iter().map(|s| (s.id, s)).collect()
}

/// The full catalog keyed by circuit id.
pub fn catalog() -> &'static BTreeMap<u8, AnsatzSpec> {
    static CATALOG: OnceLock<BTreeMap<u8, AnsatzSpec>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn get(id: u8) -> Result<&'static AnsatzSpec> {
    catalog().get(&id).ok_or(Error::UnknownAnsatz(id))
}

/// Sequential composition of catalog entries applied to the same pair,
/// e.g. `[1, 2]` for circuit 1 followed by circuit 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnsatzChain(pub Vec<u8>);

impl AnsatzChain {
    pub fn single(id: u8) -> Self {
        Self(vec![id])
    }

    pub fn specs(&self) -> Result<Vec<&'static AnsatzSpec>> {
        if self.0.is_empty() {
            return Err(Error::InvalidConfig("empty ansatz chain".into()));
        }
        self.0.iter().map(|&id| get(id)).collect()
    }

    pub fn param_count(&self) -> Result<usize> {
        Ok(self.specs()?.iter().map(|s| s.param_count).sum())
    }

    /// Intersection of member equivariance sets.
    pub fn equivariance_set(&self) -> Result<BTreeSet<LocalMask>> {
        let specs = self.specs()?;
        Ok(LocalMask::ALL
            .into_iter()
            .filter(|m| specs.iter().all(|s| s.equivariance_set.contains(m)))
            .collect())
    }

    pub fn place(&self, qubits: (usize, usize), first_slot: usize) -> Result<Vec<GateOp>> {
        let mut gates = Vec::new();
        let mut slot = first_slot;
        for s in self.specs()? {
            gates.extend(s.place(qubits, slot));
            slot += s.param_count;
        }
        Ok(gates)
    }

    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Text dump of every catalog entry.
impl std::str::FromStr for AnsatzChain {
    type Err = Error;

    /// Parses `"1"` or `"1+2"`; every id must exist in the catalog.
    fn from_str(s: &str) -> Result<Self> {
        let ids = s
            .split('+')
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::InvalidArgument(format!("bad ansatz id {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = AnsatzChain(ids);
        chain.specs()?;
        Ok(chain)
    }
}

pub fn catalog_text() -> String {
    catalog()
        .values()
        .map(AnsatzSpec::describe)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_parsing() {
        assert_eq!(
            "1+2".parse::<AnsatzChain>().unwrap(),
            AnsatzChain(vec![1, 2])
        );
        assert!("1+x".parse::<AnsatzChain>().is_err());
        assert!("12".parse::<AnsatzChain>().is_err());
    }

    #[test]
    fn parameter_counts() {
        for id in 1..=4 {
            assert_eq!(get(id).unwrap().param_count, 3, "circuit {id}");
        }
        assert_eq!(get(5).unwrap().param_count, 6);
        for id in 6..=9 {
            assert_eq!(get(id).unwrap().param_count, 2, "circuit {id}");
            assert_eq!(get(id).unwrap().role, AnsatzRole::Pooling);
        }
        assert!(get(0).is_err());
        assert!(get(10).is_err());
    }

    #[test]
    fn declared_sets_match_generator_rule() {
        for spec in catalog().values() {
            for m in LocalMask::ALL {
                assert_eq!(
                    spec.generators_commute(m),
                    spec.equivariance_set.contains(&m),
                    "circuit {} word {m}",
                    spec.id
                );
            }
        }
    }

    #[test]
    fn instantiate_checks_arity() {
        let c1 = get(1).unwrap();
        assert!(c1.instantiate((1, 2), &[0.0, 0.0]).is_err());
        assert!(c1.instantiate((2, 2), &[0.0; 3]).is_err());
        let gates = c1.instantiate((3, 7), &[0.0; 3]).unwrap();
        assert_eq!(gates[2].qubits(), vec![3, 7]);
        assert_eq!(
            get(5)
                .unwrap()
                .instantiate((1, 2), &[0.0; 6])
                .unwrap()
                .len(),
            7
        );
    }

    #[test]
    fn pooling_orientation() {
        let g = &get(9).unwrap().place((1, 5), 10)[0];
        match g {
            GateOp::ControlledRotation {
                control,
                target,
                basis,
                branches,
            } => {
                assert_eq!((*control, *target), (5, 1));
                assert_eq!(*basis, ControlBasis::Computational);
                // |0⟩ → Rx(φ2), |1⟩ → Rz(φ1)
                assert_eq!(
                    branches[0],
                    Branch {
                        generator: Pauli::X,
                        param: 11
                    }
                );
                assert_eq!(
                    branches[1],
                    Branch {
                        generator: Pauli::Z,
                        param: 10
                    }
                );
            }
            other => panic!("unexpected gate {other}"),
        }
    }

    #[test]
    fn chain_composition() {
        let chain = AnsatzChain(vec![1, 2]);
        assert_eq!(chain.param_count().unwrap(), 6);
        assert_eq!(
            chain.equivariance_set().unwrap(),
            set(&[LocalMask::II, LocalMask::XX])
        );
        let gates = chain.place((1, 2), 4).unwrap();
        assert_eq!(gates.len(), 6);
        assert_eq!(gates[3].param_slots(), vec![7]);
        assert!(AnsatzChain(vec![]).specs().is_err());
        assert_eq!(chain.label(), "1+2");
    }

    #[test]
    fn catalog_dump_lists_everything() {
        let text = catalog_text();
        for id in 1..=9 {
            assert!(text.contains(&format!("circuit {id} ")));
        }
        assert!(text.contains("equivariant under: {II, IX, XI, XX}"));
    }
}
