//! Dataset ingestion: IDX (Fashion MNIST), CIFAR-10 binary batches, PNG class
//! directories, a synthetic symmetric generator, and a float32 cache.

use std::fs::{self, File};
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::ImageTensor;
use crate::error::{Error, Result};
use crate::symmetry::Symmetry;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;
pub const CIFAR_RECORD_LEN: usize = 1 + 3 * 32 * 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub image: ImageTensor,
    /// −1 or +1.
    pub label: i8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub class_ids: Vec<u8>,
    pub steps: Vec<String>,
    pub flags: Vec<String>,
}

/// Number of matching images taken for each split, in file order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: usize,
    pub test: usize,
}

impl Default for Split {
    fn default() -> Self {
        Self {
            train: 1000,
            test: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub symmetry: Symmetry,
    pub provenance: Provenance,
}

impl LabeledDataset {
    /// `(rows, cols)` shared by every image.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.train
            .iter()
            .chain(&self.test)
            .next()
            .map(|s| (s.image.rows(), s.image.cols()))
    }

    /// Checks shared dimensions and ±1 labels; returns a note when a split is
    /// more than 10% away from balanced.
    pub fn validate(&self) -> Result<Option<String>> {
        let dims = self.dims();
        for s in self.train.iter().chain(&self.test) {
            if Some((s.image.rows(), s.image.cols())) != dims {
                return Err(Error::Malformed("images differ in dimensions".into()));
            }
            if s.label != 1 && s.label != -1 {
                return Err(Error::Malformed(format!("label {} is not ±1", s.label)));
            }
        }
        let mut notes = Vec::new();
        for (name, split) in [("train", &self.train), ("test", &self.test)] {
            if split.is_empty() {
                continue;
            }
            let frac = split.iter().filter(|s| s.label > 0).count() as f64 / split.len() as f64;
            if (frac - 0.5).abs() > 0.05 {
                notes.push(format!(
                    "{name} split imbalanced: {:.1}% positive",
                    100.0 * frac
                ));
            }
        }
        Ok(if notes.is_empty() {
            None
        } else {
            Some(notes.join("; "))
        })
    }

    /// Applies `f` to every image.
    pub fn map_images(
        &self,
        step: &str,
        f: impl Fn(&ImageTensor) -> Result<ImageTensor>,
    ) -> Result<Self> {
        let map = |v: &[Sample]| {
            v.iter()
                .map(|s| {
                    Ok(Sample {
                        image: f(&s.image)?,
                        label: s.label,
                    })
                })
                .collect::<Result<Vec<_>>>()
        };
        let mut provenance = self.provenance.clone();
        provenance.steps.push(step.to_string());
        Ok(Self {
            train: map(&self.train)?,
            test: map(&self.test)?,
            symmetry: self.symmetry,
            provenance,
        })
    }

    /// Resizes every image to `(rows, cols)`.
    pub fn resized(&self, rows: usize, cols: usize) -> Result<Self> {
        if self.dims() == Some((rows, cols)) {
            return Ok(self.clone());
        }
        self.map_images(&format!("bilinear resize to {rows}x{cols}"), |img| {
            resize(img, rows, cols)
        })
    }

    /// Same dataset with every test image replaced by its symmetry partner.
    pub fn with_transformed_test(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.test {
            s.image = s.image.transform(self.symmetry);
        }
        out.provenance.steps.push(format!(
            "test images replaced by {} partners",
            self.symmetry
        ));
        out
    }

    fn finish(mut self) -> Result<Self> {
        if let Some(note) = self.validate()? {
            self.provenance.flags.push(note);
        }
        Ok(self)
    }
}

/// Maps the two class ids to labels (lower → −1, higher → +1) and splits
/// matching records in order.
fn select_classes(
    records: impl IntoIterator<Item = (ImageTensor, u8)>,
    keep: (u8, u8),
    split: Split,
    symmetry: Symmetry,
    mut provenance: Provenance,
) -> Result<LabeledDataset> {
    if keep.0 == keep.1 {
        return Err(Error::InvalidArgument(format!(
            "class ids must differ, got {} twice",
            keep.0
        )));
    }
    let (lo, hi) = if keep.0 < keep.1 {
        keep
    } else {
        (keep.1, keep.0)
    };
    let want = split.train + split.test;
    let mut seen = [false, false];
    let mut picked = Vec::with_capacity(want);
    for (image, class) in records {
        let label = if class == lo {
            -1
        } else if class == hi {
            1
        } else {
            continue;
        };
        seen[usize::from(label > 0)] = true;
        if picked.len() < want {
            picked.push(Sample { image, label });
        }
    }
    if !seen[0] {
        return Err(Error::ClassAbsent(lo));
    }
    if !seen[1] {
        return Err(Error::ClassAbsent(hi));
    }
    if picked.len() < want {
        provenance.flags.push(format!(
            "only {} matching images for a {}+{} split",
            picked.len(),
            split.train,
            split.test
        ));
    }
    let test = picked.split_off(split.train.min(picked.len()));
    provenance.class_ids = vec![lo, hi];
    provenance.steps.push(format!(
        "classes {lo} → −1, {hi} → +1; first {} train, next {} test",
        picked.len(),
        test.len()
    ));
    LabeledDataset {
        train: picked,
        test,
        symmetry,
        provenance,
    }
    .finish()
}

fn open_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let file = BufReader::new(File::open(path)?);
    if path.extension().is_some_and(|e| e == "gz") {
        GzDecoder::new(file).read_to_end(&mut buf)?;
    } else {
        let mut file = file;
        file.read_to_end(&mut buf)?;
    }
    Ok(buf)
}

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Truncated(format!("{what} header")))
}

/// Images of an IDX3 file as `(rows, cols, pixels per image)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn count(&self) -> usize {
        self.pixels.len() / (self.rows * self.cols).max(1)
    }

    pub fn image(&self, k: usize) -> &[u8] {
        let len = self.rows * self.cols;
        &self.pixels[k * len..(k + 1) * len]
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = be_u32(bytes, 0, "image")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::BadMagic {
            found: magic,
            expected: IDX_IMAGES_MAGIC,
        });
    }
    let count = be_u32(bytes, 4, "image")? as usize;
    let rows = be_u32(bytes, 8, "image")? as usize;
    let cols = be_u32(bytes, 12, "image")? as usize;
    let need = 16 + count * rows * cols;
    if bytes.len() < need {
        return Err(Error::Truncated(format!(
            "image file has {} bytes, header implies {need}",
            bytes.len()
        )));
    }
    Ok(IdxImages {
        rows,
        cols,
        pixels: bytes[16..need].to_vec(),
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0, "label")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::BadMagic {
            found: magic,
            expected: IDX_LABELS_MAGIC,
        });
    }
    let count = be_u32(bytes, 4, "label")? as usize;
    if bytes.len() < 8 + count {
        return Err(Error::Truncated(format!(
            "label file has {} bytes, header implies {}",
            bytes.len(),
            8 + count
        )));
    }
    Ok(bytes[8..8 + count].to_vec())
}

pub fn read_idx_images(path: &Path) -> Result<IdxImages> {
    parse_idx_images(&open_maybe_gz(path)?)
}

pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    parse_idx_labels(&open_maybe_gz(path)?)
}

/// Finds the image and label files in a directory holding one IDX pair,
/// compressed or not (`train-images-idx3-ubyte.gz`, `images-idx3-ubyte`, ...).
/// Training files are preferred when both splits are present.
pub fn find_idx_pair(dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().and_then(|e| e.file_name().into_string().ok()))
        .collect();
    names.sort_by_key(|n| (!n.starts_with("train"), n.clone()));
    let find = |kind: &str| {
        names
            .iter()
            .find(|n| n.contains(kind) && !n.starts_with("t10k"))
            .map(|n| dir.join(n))
            .ok_or_else(|| {
                Error::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("no *{kind}* file in {}", dir.display()),
                ))
            })
    };
    Ok((find("idx3-ubyte")?, find("idx1-ubyte")?))
}

/// Loads an IDX image/label pair (optionally gzip-compressed) and keeps two classes.
pub fn load_idx(
    images_path: &Path,
    labels_path: &Path,
    keep: (u8, u8),
    split: Split,
    symmetry: Symmetry,
) -> Result<LabeledDataset> {
    let images = read_idx_images(images_path)?;
    let labels = read_idx_labels(labels_path)?;
    if labels.len() != images.count() {
        return Err(Error::Malformed(format!(
            "{} images but {} labels",
            images.count(),
            labels.len()
        )));
    }
    let provenance = Provenance {
        source: format!("idx:{}", images_path.display()),
        steps: vec![format!("IDX {}x{} greyscale", images.rows, images.cols)],
        ..Default::default()
    };
    let (rows, cols) = (images.rows, images.cols);
    let records = labels.iter().enumerate().map(|(k, &c)| {
        (
            ImageTensor::from_bytes(rows, cols, images.image(k))
                .expect("IDX bytes form a valid image"),
            c,
        )
    });
    select_classes(records, keep, split, symmetry, provenance)
}

/// Greyscale by luminance weights 0.299 / 0.587 / 0.114, rounded to a byte.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round() as u8
}

/// Decodes CIFAR-10 binary records (label byte + 1024 R + 1024 G + 1024 B).
pub fn parse_cifar_records(bytes: &[u8]) -> Result<Vec<(ImageTensor, u8)>> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD_LEN) {
        return Err(Error::Malformed(format!(
            "CIFAR batch length {} is not a multiple of {CIFAR_RECORD_LEN}",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(CIFAR_RECORD_LEN)
        .map(|rec| {
            let (r, g, b) = (&rec[1..1025], &rec[1025..2049], &rec[2049..3073]);
            let grey: Vec<u8> = (0..1024).map(|i| luminance(r[i], g[i], b[i])).collect();
            (
                ImageTensor::from_bytes(32, 32, &grey).expect("32x32"),
                rec[0],
            )
        })
        .collect())
}

/// Loads one CIFAR-10 batch file, or a directory holding `data_batch_{1..5}.bin`
/// and `test_batch.bin` read in that order.
pub fn load_cifar_binary(
    path: &Path,
    keep: (u8, u8),
    split: Split,
    symmetry: Symmetry,
) -> Result<LabeledDataset> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = (1..=5)
            .map(|i| path.join(format!("data_batch_{i}.bin")))
            .collect();
        v.push(path.join("test_batch.bin"));
        v.into_iter().filter(|p| p.exists()).collect()
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no CIFAR batches in {}", path.display()),
        )));
    }
    let mut records = Vec::new();
    for f in &files {
        records.extend(parse_cifar_records(&open_maybe_gz(f)?)?);
    }
    let provenance = Provenance {
        source: format!("cifar10:{}", path.display()),
        steps: vec!["RGB → greyscale (0.299, 0.587, 0.114), rounded".into()],
        ..Default::default()
    };
    select_classes(records, keep, split, symmetry, provenance)
}

fn decode_png(path: &Path) -> Result<ImageTensor> {
    let mut decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    let bytes = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let grey: Vec<u8> = match info.color_type {
        png::ColorType::Grayscale => bytes.to_vec(),
        png::ColorType::GrayscaleAlpha => bytes.chunks_exact(2).map(|p| p[0]).collect(),
        png::ColorType::Rgb => bytes
            .chunks_exact(3)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect(),
        png::ColorType::Rgba => bytes
            .chunks_exact(4)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect(),
        png::ColorType::Indexed => {
            return Err(Error::Malformed(format!(
                "{}: unexpanded palette",
                path.display()
            )))
        }
    };
    ImageTensor::from_bytes(h, w, &grey)
}

/// Loads `dir/<class id>/*.png` for the two classes. Files are read in name
/// order and the two classes are interleaved, lower class id first.
pub fn load_png_dir(
    dir: &Path,
    keep: (u8, u8),
    split: Split,
    symmetry: Symmetry,
) -> Result<LabeledDataset> {
    if keep.0 == keep.1 {
        return Err(Error::InvalidArgument(format!(
            "class ids must differ, got {} twice",
            keep.0
        )));
    }
    let mut per_class = Vec::new();
    for class in [keep.0.min(keep.1), keep.0.max(keep.1)] {
        let sub = dir.join(class.to_string());
        if !sub.is_dir() {
            return Err(Error::ClassAbsent(class));
        }
        let mut files: Vec<PathBuf> = fs::read_dir(&sub)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")))
            .collect();
        files.sort();
        per_class.push((class, files));
    }
    let longest = per_class.iter().map(|(_, f)| f.len()).max().unwrap_or(0);
    let mut records = Vec::new();
    for k in 0..longest {
        for (class, files) in &per_class {
            if let Some(p) = files.get(k) {
                records.push((decode_png(p)?, *class));
            }
        }
    }
    let provenance = Provenance {
        source: format!("png:{}", dir.display()),
        steps: vec!["RGB → greyscale (0.299, 0.587, 0.114), rounded".into()],
        ..Default::default()
    };
    select_classes(records, keep, split, symmetry, provenance)
}

/// Bilinear resize with corner-aligned sampling. Upscaling by more than 2× is rejected.
pub fn resize(img: &ImageTensor, rows: usize, cols: usize) -> Result<ImageTensor> {
    for (d, name) in [(rows, "rows"), (cols, "cols")] {
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::InvalidImage(format!(
                "target {name} {d} is not a power of two"
            )));
        }
    }
    if rows > 2 * img.rows() || cols > 2 * img.cols() {
        return Err(Error::InvalidImage(format!(
            "upscaling {}x{} to {rows}x{cols} exceeds 2x",
            img.rows(),
            img.cols()
        )));
    }
    if (rows, cols) == (img.rows(), img.cols()) {
        return Ok(img.clone());
    }
    let coord = |i: usize, out: usize, src: usize| -> f64 {
        if out == 1 {
            0.0
        } else {
            i as f64 * (src - 1) as f64 / (out - 1) as f64
        }
    };
    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let y = coord(r, rows, img.rows());
        let y0 = y.floor() as usize;
        let y1 = (y0 + 1).min(img.rows() - 1);
        let fy = y - y0 as f64;
        for c in 0..cols {
            let x = coord(c, cols, img.cols());
            let x0 = x.floor() as usize;
            let x1 = (x0 + 1).min(img.cols() - 1);
            let fx = x - x0 as f64;
            let top = img.get(y0, x0) * (1.0 - fx) + img.get(y0, x1) * fx;
            let bottom = img.get(y1, x0) * (1.0 - fx) + img.get(y1, x1) * fx;
            pixels.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    ImageTensor::new(rows, cols, pixels)
}

/// Class prototypes of the synthetic task: `+1` is a vertical bar in the left
/// quarter, `−1` a horizontal bar in the top quarter.
pub fn synth_prototypes(rows: usize, cols: usize) -> Result<(ImageTensor, ImageTensor)> {
    let bar = |r0: usize, r1: usize, c0: usize, c1: usize| {
        let mut px = vec![0.0; rows * cols];
        for r in r0..r1 {
            for c in c0..c1 {
                px[r * cols + c] = 1.0;
            }
        }
        ImageTensor::new(rows, cols, px)
    };
    let (h8, w8) = ((rows / 8).max(1), (cols / 8).max(1));
    let vertical = bar(h8, rows - h8, w8, (3 * w8).min(cols))?;
    let horizontal = bar(h8, (3 * h8).min(rows), w8, cols - w8)?;
    Ok((vertical, horizontal))
}

/// Noise amplitude added uniformly to every synthetic pixel.
pub const SYNTH_NOISE: f64 = 0.3;

/// Synthetic label-symmetric dataset: prototype plus uniform noise in
/// `[0, SYNTH_NOISE)`, then the symmetry applied with probability ½.
/// Labels alternate `+1, −1, …` so both splits are balanced.
pub fn synth_symmetric(
    split: Split,
    rows: usize,
    cols: usize,
    symmetry: Symmetry,
    seed: u64,
) -> Result<LabeledDataset> {
    let (pos, neg) = synth_prototypes(rows, cols)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Result<Vec<Sample>> {
        (0..n)
            .map(|i| {
                let label: i8 = if i % 2 == 0 { 1 } else { -1 };
                let proto = if label > 0 { &pos } else { &neg };
                let px = proto
                    .pixels()
                    .iter()
                    .map(|p| p + rng.gen::<f64>() * SYNTH_NOISE)
                    .collect();
                let mut image = ImageTensor::new(rows, cols, px)?;
                if rng.gen_bool(0.5) {
                    image = image.transform(symmetry);
                }
                Ok(Sample { image, label })
            })
            .collect()
    };
    let train = draw(split.train)?;
    let test = draw(split.test)?;
    let provenance = Provenance {
        source: format!("synth:{symmetry}:{rows}x{cols}:seed={seed}"),
        class_ids: vec![0, 1],
        steps: vec![format!(
            "prototype + U[0,{SYNTH_NOISE}) noise, {symmetry} with probability 1/2"
        )],
        flags: Vec::new(),
    };
    LabeledDataset {
        train,
        test,
        symmetry,
        provenance,
    }
    .finish()
}

/// JSON sidecar of the float32 cache.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheSidecar {
    pub rows: usize,
    pub cols: usize,
    pub train_labels: Vec<i8>,
    pub test_labels: Vec<i8>,
    pub symmetry: Symmetry,
    pub provenance: Provenance,
    pub train_file: String,
    pub test_file: String,
}

fn write_f32(path: &Path, samples: &[Sample]) -> Result<()> {
    let mut bytes = Vec::with_capacity(samples.iter().map(|s| s.image.pixels().len() * 4).sum());
    for s in samples {
        for &p in s.image.pixels() {
            bytes.extend_from_slice(&(p as f32).to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn read_f32(path: &Path, rows: usize, cols: usize, labels: &[i8]) -> Result<Vec<Sample>> {
    let bytes = fs::read(path)?;
    let per = rows * cols * 4;
    if bytes.len() != per * labels.len() {
        return Err(Error::Truncated(format!(
            "{}: {} bytes, expected {}",
            path.display(),
            bytes.len(),
            per * labels.len()
        )));
    }
    bytes
        .chunks_exact(per)
        .zip(labels)
        .map(|(chunk, &label)| {
            let px = chunk
                .chunks_exact(4)
                .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
                .collect();
            Ok(Sample {
                image: ImageTensor::new(rows, cols, px)?,
                label,
            })
        })
        .collect()
}

/// Writes `<name>.json`, `<name>.train.f32` and `<name>.test.f32` into `dir`.
/// Returns the sidecar path.
pub fn save_cache(ds: &LabeledDataset, dir: &Path, name: &str) -> Result<PathBuf> {
    let (rows, cols) = ds.dims().ok_or(Error::EmptyBatch)?;
    fs::create_dir_all(dir)?;
    let train_file = format!("{name}.train.f32");
    let test_file = format!("{name}.test.f32");
    write_f32(&dir.join(&train_file), &ds.train)?;
    write_f32(&dir.join(&test_file), &ds.test)?;
    let sidecar = CacheSidecar {
        rows,
        cols,
        train_labels: ds.train.iter().map(|s| s.label).collect(),
        test_labels: ds.test.iter().map(|s| s.label).collect(),
        symmetry: ds.symmetry,
        provenance: ds.provenance.clone(),
        train_file,
        test_file,
    };
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(path)
}

/// Reads a cache written by [`save_cache`]. Pixels round-trip through `f32`.
pub fn load_cache(sidecar_path: &Path) -> Result<LabeledDataset> {
    let sidecar: CacheSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path)?)?;
    let dir = sidecar_path.parent().unwrap_or(Path::new("."));
    let train = read_f32(
        &dir.join(&sidecar.train_file),
        sidecar.rows,
        sidecar.cols,
        &sidecar.train_labels,
    )?;
    let test = read_f32(
        &dir.join(&sidecar.test_file),
        sidecar.rows,
        sidecar.cols,
        &sidecar.test_labels,
    )?;
    LabeledDataset {
        train,
        test,
        symmetry: sidecar.symmetry,
        provenance: sidecar.provenance,
    }
    .finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_files(images: &[[u8; 4]], labels: &[u8]) -> (Vec<u8>, Vec<u8>) {
        let mut im = Vec::new();
        im.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
        im.extend_from_slice(&(images.len() as u32).to_be_bytes());
        im.extend_from_slice(&2u32.to_be_bytes());
        im.extend_from_slice(&2u32.to_be_bytes());
        for i in images {
            im.extend_from_slice(i);
        }
        let mut lb = Vec::new();
        lb.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
        lb.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        lb.extend_from_slice(labels);
        (im, lb)
    }

    #[test]
    fn idx_parsing_and_errors() {
        let (im, lb) = idx_files(&[[1, 2, 3, 4], [5, 6, 7, 8]], &[3, 9]);
        let images = parse_idx_images(&im).unwrap();
        assert_eq!(images.count(), 2);
        assert_eq!(images.image(1), &[5, 6, 7, 8]);
        assert_eq!(parse_idx_labels(&lb).unwrap(), vec![3, 9]);
        assert!(matches!(parse_idx_images(&lb), Err(Error::BadMagic { .. })));
        assert!(matches!(parse_idx_labels(&im), Err(Error::BadMagic { .. })));
        assert!(matches!(
            parse_idx_images(&im[..im.len() - 1]),
            Err(Error::Truncated(_))
        ));
        assert!(matches!(
            parse_idx_labels(&lb[..5]),
            Err(Error::Truncated(_))
        ));
    }

    #[test]
    fn idx_class_filtering() {
        let dir = std::env::temp_dir().join(format!("eqcnn-idx-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let (im, lb) = idx_files(
            &[[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]],
            &[1, 0, 7, 1],
        );
        let (ip, lp) = (dir.join("img"), dir.join("lab"));
        fs::write(&ip, im).unwrap();
        fs::write(&lp, lb).unwrap();
        let ds = load_idx(
            &ip,
            &lp,
            (1, 0),
            Split { train: 2, test: 1 },
            Symmetry::Reflection,
        )
        .unwrap();
        assert_eq!(
            ds.train.iter().map(|s| s.label).collect::<Vec<_>>(),
            vec![1, -1]
        );
        assert_eq!(ds.test[0].image.pixels(), &[0.0, 0.0, 0.0, 4.0]);
        assert_eq!(ds.provenance.class_ids, vec![0, 1]);
        assert!(load_idx(&ip, &lp, (1, 1), Split::default(), Symmetry::Reflection).is_err());
        assert!(matches!(
            load_idx(&ip, &lp, (1, 5), Split::default(), Symmetry::Reflection),
            Err(Error::ClassAbsent(5))
        ));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn greyscale_weights() {
        assert_eq!(luminance(0, 0, 0), 0);
        assert_eq!(luminance(255, 0, 0), 76);
        assert_eq!(luminance(255, 255, 255), 255);
    }

    #[test]
    fn cifar_records() {
        let mut rec = vec![0u8; CIFAR_RECORD_LEN * 2];
        rec[0] = 2;
        rec[1] = 255; // red of pixel 0
        rec[CIFAR_RECORD_LEN] = 1;
        let out = parse_cifar_records(&rec).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].1, 2);
        assert_eq!(out[0].0.get(0, 0), 76.0);
        assert!(parse_cifar_records(&rec[..100]).is_err());
    }

    #[test]
    fn resize_rules() {
        let img = ImageTensor::new(4, 4, (0..16).map(f64::from).collect()).unwrap();
        assert_eq!(resize(&img, 4, 4).unwrap(), img);
        assert!(resize(&img, 16, 4).is_err());
        assert!(resize(&img, 3, 4).is_err());
        let small = resize(&img, 2, 2).unwrap();
        assert_eq!(small.pixels(), &[0.0, 3.0, 12.0, 15.0]);
        let flat = ImageTensor::new(28, 28, vec![7.5; 784]).unwrap();
        assert!(resize(&flat, 16, 16)
            .unwrap()
            .pixels()
            .iter()
            .all(|&p| (p - 7.5).abs() < 1e-12));
    }

    #[test]
    fn synth_is_reproducible_and_balanced() {
        let a = synth_symmetric(
            Split {
                train: 64,
                test: 32,
            },
            16,
            16,
            Symmetry::Reflection,
            3,
        )
        .unwrap();
        let b = synth_symmetric(
            Split {
                train: 64,
                test: 32,
            },
            16,
            16,
            Symmetry::Reflection,
            3,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train.iter().filter(|s| s.label > 0).count(), 32);
        assert!(a.provenance.flags.is_empty());
        let c = synth_symmetric(
            Split {
                train: 64,
                test: 32,
            },
            16,
            16,
            Symmetry::Reflection,
            4,
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("eqcnn-cache-{}", std::process::id()));
        let ds = synth_symmetric(Split { train: 8, test: 4 }, 4, 4, Symmetry::Rotation, 1).unwrap();
        let path = save_cache(&ds, &dir, "toy").unwrap();
        let back = load_cache(&path).unwrap();
        assert_eq!(back.train.len(), 8);
        assert_eq!(back.symmetry, Symmetry::Rotation);
        for (x, y) in ds.train.iter().zip(&back.train) {
            assert_eq!(x.label, y.label);
            for (p, q) in x.image.pixels().iter().zip(y.image.pixels()) {
                assert_eq!(*p as f32, *q as f32);
            }
        }
        fs::remove_dir_all(&dir).unwrap();
    }
}
