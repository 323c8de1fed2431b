use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidArgument(format!(
                "not a Pauli letter: {other:?}"
            ))),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// True when the letter flips the computational basis bit (X or Y).
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// True when the letter carries a sign depending on the bit (Y or Z).
    pub fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Tensor product of Pauli letters, one per qubit. Letter 0 is qubit 1, the
/// most significant bit of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    letters: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// `letter` on the 1-based `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit == 0 || qubit > n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits });
        }
        let mut letters = vec![Pauli::I; n_qubits];
        letters[qubit - 1] = letter;
        Ok(Self { letters })
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Letter on the 1-based `qubit`.
    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Bit masks over basis indices: (flip mask of X/Y, sign mask of Y/Z, number of Y letters).
    pub fn masks(&self) -> (usize, usize, usize) {
        let n = self.letters.len();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0usize;
        for (pos, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - pos);
            if p.flips() {
                flip |= bit;
            }
            if p.signs() {
                sign |= bit;
            }
            if p == Pauli::Y {
                n_y += 1;
            }
        }
        (flip, sign, n_y)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli word".into()));
        }
        Ok(Self { letters })
    }
}

impl Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Phase factor `i^n_y`.
pub(crate) fn i_pow(n_y: usize) -> Complex64 {
    match n_y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficient of `P|b⟩ = phase(b) |b ⊕ flip⟩`.
#[inline]
pub(crate) fn word_phase(b: usize, sign: usize, base: Complex64) -> Complex64 {
    if (b & sign).count_ones().is_multiple_of(2) {
        base
    } else {
        -base
    }
}
