//! Classical image to quantum state encoders.
//!
//! Standard amplitude embedding writes pixel `(r, c)` of a `2^n1 × 2^n2`
//! image to amplitude `r·2^n2 + c`. The basis-permuted embeddings compose it
//! with an intertwiner so that the image symmetry acts on the embedded state
//! through a chosen target representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::Statevector;
use crate::symmetry::{
    alternating_rep, build_intertwiner, half_rep, rotation_rep, BasisPermutation, Symmetry,
    XorMaskRep,
};

/// Greyscale image, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageTensor {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl ImageTensor {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows * cols != pixels.len() {
            return Err(Error::InvalidImage(format!(
                "{rows}x{cols} image needs {} pixels, got {}",
                rows * cols,
                pixels.len()
            )));
        }
        if let Some(p) = pixels.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidImage(format!(
                "pixel intensity {p} is not a non-negative real"
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(rows, cols, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// `(n1, n2)` with `rows = 2^n1`, `cols = 2^n2`.
    pub fn qubit_dims(&self) -> Result<(usize, usize)> {
        Ok((log2_dim(self.rows)?, log2_dim(self.cols)?))
    }

    fn remap(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (sr, sc) = f(r, c);
                pixels.push(self.get(sr, sc));
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            pixels,
        }
    }

    /// Mirror about the vertical axis.
    pub fn reflect(&self) -> Self {
        self.remap(|r, c| (r, self.cols - 1 - c))
    }

    /// Rotation by 180°.
    pub fn rotate180(&self) -> Self {
        self.remap(|r, c| (self.rows - 1 - r, self.cols - 1 - c))
    }

    pub fn transform(&self, symmetry: Symmetry) -> Self {
        match symmetry {
            Symmetry::Reflection => self.reflect(),
            Symmetry::Rotation => self.rotate180(),
        }
    }
}

pub fn reflect_image(img: &ImageTensor) -> ImageTensor {
    img.reflect()
}

pub fn rotate180_image(img: &ImageTensor) -> ImageTensor {
    img.rotate180()
}

fn log2_dim(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidImage(format!(
            "dimension {d} is not a power of two ≥ 2"
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Which amplitude ordering is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingTag {
    /// Row-major standard amplitude embedding.
    #[serde(rename = "ae")]
    Standard,
    /// Swaps the reflection and rotation representations.
    Ae1,
    /// Alternating `I ⊗ X ⊗ I ⊗ X …` representation for either symmetry.
    Ae2,
}

impl fmt::Display for EmbeddingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingTag::Standard => "ae",
            EmbeddingTag::Ae1 => "ae1",
            EmbeddingTag::Ae2 => "ae2",
        })
    }
}

impl FromStr for EmbeddingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace([' ', '-', '_'], "")
            .as_str()
        {
            "ae" | "standard" | "standardae" => Ok(EmbeddingTag::Standard),
            "ae1" => Ok(EmbeddingTag::Ae1),
            "ae2" => Ok(EmbeddingTag::Ae2),
            other => Err(Error::InvalidArgument(format!(
                "unknown embedding {other:?}"
            ))),
        }
    }
}

/// Embedding choice together with the label symmetry it is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingKind {
    pub tag: EmbeddingTag,
    pub symmetry: Symmetry,
}

impl EmbeddingKind {
    pub fn new(tag: EmbeddingTag, symmetry: Symmetry) -> Self {
        Self { tag, symmetry }
    }

    /// Representation of the symmetry on the standard embedded state.
    pub fn source_rep(&self, n1: usize, n2: usize) -> Result<XorMaskRep> {
        self.symmetry.standard_rep(n1, n2)
    }

    /// Representation of the symmetry on the state produced by this embedding.
    pub fn target_rep(&self, n1: usize, n2: usize) -> Result<XorMaskRep> {
        let n = n1 + n2;
        match (self.tag, self.symmetry) {
            (EmbeddingTag::Standard, s) => s.standard_rep(n1, n2),
            (EmbeddingTag::Ae1, Symmetry::Reflection) => rotation_rep(n),
            (EmbeddingTag::Ae1, Symmetry::Rotation) => half_rep(n),
            (EmbeddingTag::Ae2, _) => alternating_rep(n),
        }
    }
}

impl fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.tag, self.symmetry)
    }
}

/// An embedding bound to fixed image dimensions, with its intertwiner precomputed.
#[derive(Clone, Debug)]
pub struct Embedding {
    kind: EmbeddingKind,
    n1: usize,
    n2: usize,
    perm: BasisPermutation,
    target: XorMaskRep,
}

impl Embedding {
    pub fn new(kind: EmbeddingKind, n1: usize, n2: usize) -> Result<Self> {
        let source = kind.source_rep(n1, n2)?;
        let target = kind.target_rep(n1, n2)?;
        let perm = match kind.tag {
            EmbeddingTag::Standard => BasisPermutation::identity(source.dim()),
            _ => build_intertwiner(&source, &target)?,
        };
        Ok(Self {
            kind,
            n1,
            n2,
            perm,
            target,
        })
    }

    pub fn for_dims(kind: EmbeddingKind, rows: usize, cols: usize) -> Result<Self> {
        Self::new(kind, log2_dim(rows)?, log2_dim(cols)?)
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn image_dims(&self) -> (usize, usize) {
        (1 << self.n1, 1 << self.n2)
    }

    pub fn permutation(&self) -> &BasisPermutation {
        &self.perm
    }

    pub fn target_rep(&self) -> &XorMaskRep {
        &self.target
    }

    pub fn embed(&self, img: &ImageTensor) -> Result<Statevector> {
        if (img.rows(), img.cols()) != self.image_dims() {
            let (r, c) = self.image_dims();
            return Err(Error::InvalidImage(format!(
                "expected {r}x{c} image, got {}x{}",
                img.rows(),
                img.cols()
            )));
        }
        let standard = embed_standard(img)?;
        if self.perm.is_identity() {
            return Ok(standard);
        }
        standard.apply_basis_permutation(&self.perm)
    }
}

/// Row-major amplitude embedding, L2 normalized.
pub fn embed_standard(img: &ImageTensor) -> Result<Statevector> {
    let (n1, n2) = img.qubit_dims()?;
    Statevector::from_real(img.pixels(), n1 + n2)
}

/// Amplitude embedding followed by the intertwiner for `kind`.
pub fn embed_permuted(img: &ImageTensor, kind: EmbeddingKind) -> Result<Statevector> {
    let (n1, n2) = img.qubit_dims()?;
    Embedding::new(kind, n1, n2)?.embed(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::reflection_rep;

    fn img2(a: f64, b: f64, c: f64, d: f64) -> ImageTensor {
        ImageTensor::new(2, 2, vec![a, b, c, d]).unwrap()
    }

    #[test]
    fn image_transforms() {
        let x = img2(1.0, 2.0, 3.0, 4.0);
        assert_eq!(x.reflect().pixels(), &[2.0, 1.0, 4.0, 3.0]);
        assert_eq!(x.rotate180().pixels(), &[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(x.reflect().reflect(), x);
        assert_eq!(x.rotate180().rotate180(), x);
    }

    #[test]
    fn image_validation() {
        assert!(ImageTensor::new(2, 2, vec![1.0; 3]).is_err());
        assert!(ImageTensor::new(1, 2, vec![1.0, -1.0]).is_err());
        assert!(ImageTensor::new(1, 1, vec![f64::NAN]).is_err());
        let odd = ImageTensor::new(3, 2, vec![1.0; 6]).unwrap();
        assert!(embed_standard(&odd).is_err());
    }

    #[test]
    fn standard_embedding() {
        let s = embed_standard(&img2(1.0, 2.0, 3.0, 4.0)).unwrap();
        let norm = 30f64.sqrt();
        for (k, a) in s.amplitudes().iter().enumerate() {
            assert!((a.re - (k + 1) as f64 / norm).abs() < 1e-15);
        }
        let s = embed_standard(&img2(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(s, Statevector::basis(2, 0).unwrap());
        assert!(matches!(
            embed_standard(&img2(0.0, 0.0, 0.0, 0.0)),
            Err(Error::Unnormalizable)
        ));
    }

    #[test]
    fn ae1_two_by_two() {
        let kind = EmbeddingKind::new(EmbeddingTag::Ae1, Symmetry::Reflection);
        let x = img2(1.0, 2.0, 3.0, 4.0);
        let s = embed_permuted(&x, kind).unwrap();
        let n = 30f64.sqrt();
        let expected = [1.0, 3.0, 4.0, 2.0];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a.re - e / n).abs() < 1e-15);
        }
        let reflected = embed_permuted(&x.reflect(), kind).unwrap();
        let xx: XorMaskRep = "11".parse().unwrap();
        assert_eq!(reflected, xx.apply(&s).unwrap());
    }

    #[test]
    fn standard_kind_is_identity() {
        let e = Embedding::new(
            EmbeddingKind::new(EmbeddingTag::Standard, Symmetry::Rotation),
            2,
            2,
        )
        .unwrap();
        assert!(e.permutation().is_identity());
        assert_eq!(e.target_rep().to_string(), "1111");
        assert_eq!(
            Embedding::new(
                EmbeddingKind::new(EmbeddingTag::Ae1, Symmetry::Rotation),
                2,
                2
            )
            .unwrap()
            .target_rep(),
            &reflection_rep(2, 2).unwrap()
        );
    }

    #[test]
    fn tag_parsing() {
        assert_eq!(
            "AE".parse::<EmbeddingTag>().unwrap(),
            EmbeddingTag::Standard
        );
        assert_eq!("ae 1".parse::<EmbeddingTag>().unwrap(), EmbeddingTag::Ae1);
        assert_eq!("AE2".parse::<EmbeddingTag>().unwrap(), EmbeddingTag::Ae2);
        assert!("ae3".parse::<EmbeddingTag>().is_err());
    }

    #[test]
    fn wrong_dims_rejected() {
        let e = Embedding::new(
            EmbeddingKind::new(EmbeddingTag::Ae2, Symmetry::Reflection),
            2,
            2,
        )
        .unwrap();
        assert!(e.embed(&img2(1.0, 1.0, 1.0, 1.0)).is_err());
    }
}
