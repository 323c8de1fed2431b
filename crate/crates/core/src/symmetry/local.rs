use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::XorMaskRep;
use crate::error::{Error, Result};
use crate::statevec::{Pauli, PauliWord};

/// Two-letter `{I, X}` word on an ordered qubit pair `(a, b)`, written `a` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalMask {
    pub on_a: bool,
    pub on_b: bool,
}

impl LocalMask {
    pub const II: LocalMask = LocalMask {
        on_a: false,
        on_b: false,
    };
    pub const IX: LocalMask = LocalMask {
        on_a: false,
        on_b: true,
    };
    pub const XI: LocalMask = LocalMask {
        on_a: true,
        on_b: false,
    };
    pub const XX: LocalMask = LocalMask {
        on_a: true,
        on_b: true,
    };

    pub const ALL: [LocalMask; 4] = [Self::II, Self::IX, Self::XI, Self::XX];

    pub fn is_identity(&self) -> bool {
        !self.on_a && !self.on_b
    }

    pub fn as_pauli_word(&self) -> PauliWord {
        let l = |x: bool| if x { Pauli::X } else { Pauli::I };
        PauliWord::new(vec![l(self.on_a), l(self.on_b)])
    }

    /// Two-qubit representation with qubit `a` as qubit 1.
    pub fn as_rep(&self) -> XorMaskRep {
        XorMaskRep::from_flags(&[self.on_a, self.on_b]).expect("two-qubit mask")
    }
}

impl fmt::Display for LocalMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |x: bool| if x { 'X' } else { 'I' };
        write!(f, "{}{}", c(self.on_a), c(self.on_b))
    }
}

impl FromStr for LocalMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letter = |c: char| match c.to_ascii_uppercase() {
            'I' => Ok(false),
            'X' => Ok(true),
            other => Err(Error::InvalidRep(format!("local word letter {other:?}"))),
        };
        let chars: Vec<char> = s.trim().chars().collect();
        match chars.as_slice() {
            [a, b] => Ok(LocalMask {
                on_a: letter(*a)?,
                on_b: letter(*b)?,
            }),
            _ => Err(Error::InvalidRep(format!(
                "local word {s:?} must have two letters"
            ))),
        }
    }
}

impl Serialize for LocalMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LocalMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Local representation seen by a qubit pair: the identity plus the
/// restriction of the nontrivial element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRepSet {
    pub pair: (usize, usize),
    pub elements: BTreeSet<LocalMask>,
}

impl LocalRepSet {
    /// The restriction of the nontrivial group element.
    pub fn nontrivial(&self) -> LocalMask {
        self.elements
            .iter()
            .copied()
            .find(|m| !m.is_identity())
            .unwrap_or(LocalMask::II)
    }
}

impl fmt::Display for LocalRepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "({},{}): {{{}}}",
            self.pair.0,
            self.pair.1,
            items.join(", ")
        )
    }
}

/// A representation over a subset of the original register, with each mask
/// position tagged by its original 1-based qubit label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveRep {
    labels: Vec<usize>,
    rep: XorMaskRep,
}

impl ActiveRep {
    /// Whole register, labels `1..=n`.
    pub fn full(rep: XorMaskRep) -> Self {
        Self {
            labels: (1..=rep.n_qubits()).collect(),
            rep,
        }
    }

    pub fn new(labels: Vec<usize>, rep: XorMaskRep) -> Result<Self> {
        if labels.len() != rep.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: rep.n_qubits(),
                actual: labels.len(),
            });
        }
        Ok(Self { labels, rep })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rep(&self) -> &XorMaskRep {
        &self.rep
    }

    fn position(&self, label: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|p| p + 1)
            .ok_or(Error::InactiveQubit(label))
    }

    /// Whether the nontrivial element carries `X` on qubit `label`.
    pub fn has_x(&self, label: usize) -> Result<bool> {
        Ok(self.rep.has_x(self.position(label)?))
    }

    pub fn local_mask(&self, a: usize, b: usize) -> Result<LocalMask> {
        if a == b {
            return Err(Error::DuplicateQubit(a));
        }
        Ok(LocalMask {
            on_a: self.has_x(a)?,
            on_b: self.has_x(b)?,
        })
    }

    /// Traces out the qubits with labels in `traced`.
    pub fn reduce(&self, traced: &[usize]) -> Result<Self> {
        let positions = traced
            .iter()
            .map(|&l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        let rep = self.rep.reduce(&positions)?;
        let labels = self
            .labels
            .iter()
            .copied()
            .filter(|l| !traced.contains(l))
            .collect();
        Ok(Self { labels, rep })
    }

    pub fn tensor_notation(&self) -> String {
        self.rep.tensor_notation(&self.labels)
    }
}

/// Local representation of `rep` on the pair `(a, b)` (original labels).
pub fn restrict_to_pair(rep: &ActiveRep, pair: (usize, usize)) -> Result<LocalRepSet> {
    let m = rep.local_mask(pair.0, pair.1)?;
    let mut elements = BTreeSet::new();
    elements.insert(LocalMask::II);
    elements.insert(m);
    Ok(LocalRepSet { pair, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{reflection_rep, rotation_rep};

    fn set(words: &[&str]) -> BTreeSet<LocalMask> {
        words.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn pair_restrictions() {
        let refl = ActiveRep::full(reflection_rep(4, 4).unwrap());
        assert_eq!(
            restrict_to_pair(&refl, (1, 2)).unwrap().elements,
            set(&["II"])
        );
        assert_eq!(
            restrict_to_pair(&refl, (4, 5)).unwrap().elements,
            set(&["II", "IX"])
        );
        let rot = ActiveRep::full(rotation_rep(8).unwrap());
        assert_eq!(
            restrict_to_pair(&rot, (3, 4)).unwrap().elements,
            set(&["II", "XX"])
        );
        assert!(restrict_to_pair(&rot, (3, 9)).is_err());
        assert!(restrict_to_pair(&rot, (3, 3)).is_err());
    }

    #[test]
    fn reduced_labels() {
        let refl = ActiveRep::full(reflection_rep(5, 5).unwrap());
        let r = refl.reduce(&[2, 4, 6, 8, 10]).unwrap();
        assert_eq!(r.labels(), &[1, 3, 5, 7, 9]);
        assert_eq!(r.tensor_notation(), "I1 ⊗ I3 ⊗ I5 ⊗ X7 ⊗ X9");
        let r = r.reduce(&[3, 7]).unwrap();
        assert_eq!(r.tensor_notation(), "I1 ⊗ I5 ⊗ X9");
        assert!(matches!(r.reduce(&[3]), Err(Error::InactiveQubit(3))));
        assert_eq!(
            restrict_to_pair(&r, (5, 9)).unwrap().nontrivial(),
            LocalMask::IX
        );
        assert_eq!(
            restrict_to_pair(&r, (9, 1)).unwrap().nontrivial(),
            LocalMask::XI
        );
    }

    #[test]
    fn local_mask_text() {
        for m in LocalMask::ALL {
            assert_eq!(m.to_string().parse::<LocalMask>().unwrap(), m);
        }
        assert!("XY".parse::<LocalMask>().is_err());
        assert!("XXX".parse::<LocalMask>().is_err());
        assert_eq!(LocalMask::IX.as_rep().to_string(), "01");
    }
}
