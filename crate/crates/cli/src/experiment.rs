//! Dataset descriptors, model selection and the persisted experiment record.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use eqcnn::ansatz::AnsatzChain;
use eqcnn::data::{self, LabeledDataset, Split};
use eqcnn::embedding::{EmbeddingKind, EmbeddingTag};
use eqcnn::model::{
    custom_config, nonequivariant_config, table1_config, DatasetKind, LateTraceOrder, ModelConfig,
};
use eqcnn::statevec::Pauli;
use eqcnn::symmetry::Symmetry;
use eqcnn::train::{AggregatePoint, TrainSettings};
use serde::{Deserialize, Serialize};

/// Where images come from: `synth`, `fashion-mnist:<dir>`, `cifar10:<file|dir>`,
/// `blood-mnist:<dir>` or `cache:<sidecar.json>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DatasetSource {
    Synth,
    Named(DatasetKind, PathBuf),
    Cache(PathBuf),
}

impl FromStr for DatasetSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, path) = match s.split_once(':') {
            Some((k, p)) => (k, Some(PathBuf::from(p))),
            None => (s, None),
        };
        let need = |p: Option<PathBuf>| {
            p.filter(|p| !p.as_os_str().is_empty())
                .with_context(|| format!("dataset {kind:?} needs a path, e.g. {kind}:<path>"))
        };
        Ok(match kind.to_ascii_lowercase().as_str() {
            "synth" => Self::Synth,
            "fashion-mnist" | "fashion" => Self::Named(DatasetKind::FashionMnist, need(path)?),
            "cifar10" | "cifar-10" => Self::Named(DatasetKind::Cifar10, need(path)?),
            "blood-mnist" | "blood" => Self::Named(DatasetKind::BloodMnist, need(path)?),
            "cache" => Self::Cache(need(path)?),
            other => bail!("unknown dataset kind {other:?} (synth, fashion-mnist, cifar10, blood-mnist, cache)"),
        })
    }
}

impl fmt::Display for DatasetSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Synth => write!(f, "synth"),
            Self::Named(kind, p) => {
                let name = match kind {
                    DatasetKind::FashionMnist => "fashion-mnist",
                    DatasetKind::Cifar10 => "cifar10",
                    DatasetKind::BloodMnist => "blood-mnist",
                };
                write!(f, "{name}:{}", p.display())
            }
            Self::Cache(p) => write!(f, "cache:{}", p.display()),
        }
    }
}

impl From<DatasetSource> for String {
    fn from(d: DatasetSource) -> Self {
        d.to_string()
    }
}

impl TryFrom<String> for DatasetSource {
    type Error = anyhow::Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl DatasetSource {
    pub fn kind(&self) -> Option<DatasetKind> {
        match self {
            Self::Named(k, _) => Some(*k),
            _ => None,
        }
    }

    pub fn default_classes(&self) -> (u8, u8) {
        match self.kind() {
            Some(DatasetKind::Cifar10) => (1, 2),
            Some(DatasetKind::BloodMnist) => (1, 6),
            _ => (0, 1),
        }
    }

    /// Named datasets use their label symmetry; caches use the one recorded in the sidecar.
    pub fn default_symmetry(&self) -> Result<Symmetry> {
        match self {
            Self::Cache(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(serde_json::from_str::<data::CacheSidecar>(&text)?.symmetry)
            }
            _ => Ok(self
                .kind()
                .map_or(Symmetry::Reflection, DatasetKind::symmetry)),
        }
    }

    pub fn default_qubits(&self) -> usize {
        self.kind().map_or(8, DatasetKind::n_qubits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Table1,
    Noneq,
    Custom,
}

/// Everything needed to rebuild a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub choice: ModelChoice,
    pub qubits: usize,
    pub embedding: EmbeddingTag,
    pub symmetry: Symmetry,
    pub conv: Vec<AnsatzChain>,
    pub pool: Vec<u8>,
    pub observable: char,
    pub equivariant: bool,
    pub trace_order: LateTraceOrder,
}

impl ModelSelection {
    pub fn build(&self) -> Result<ModelConfig> {
        let kind = EmbeddingKind::new(self.embedding, self.symmetry);
        let config = match self.choice {
            ModelChoice::Table1 => table1_config(self.qubits, kind)?,
            ModelChoice::Noneq => {
                if self.embedding != EmbeddingTag::Standard {
                    bail!("the non-equivariant model uses the standard embedding");
                }
                nonequivariant_config(self.qubits, self.symmetry)?
            }
            ModelChoice::Custom => {
                if self.conv.is_empty() || self.pool.is_empty() {
                    bail!("--model custom needs --conv and --pool");
                }
                let letter = Pauli::from_char(self.observable)?;
                custom_config(
                    self.qubits,
                    kind,
                    &self.conv,
                    &self.pool,
                    letter,
                    self.equivariant,
                )?
            }
        };
        let config = if self.trace_order == LateTraceOrder::default() {
            config
        } else {
            config.with_trace_order(self.trace_order)?
        };
        config.validate()?;
        Ok(config)
    }
}

/// Dataset ingestion options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSelection {
    pub source: DatasetSource,
    pub classes: (u8, u8),
    pub split: Split,
    pub symmetry: Symmetry,
    pub synth_seed: u64,
}

impl DataSelection {
    /// Loads and resizes to `rows × cols`.
    pub fn load(&self, rows: usize, cols: usize) -> Result<LabeledDataset> {
        let ds = match &self.source {
            DatasetSource::Synth => {
                data::synth_symmetric(self.split, rows, cols, self.symmetry, self.synth_seed)?
            }
            DatasetSource::Named(DatasetKind::FashionMnist, dir) => {
                let (images, labels) = if dir.is_dir() {
                    data::find_idx_pair(dir)?
                } else {
                    bail!("{} is not a directory holding an IDX pair", dir.display());
                };
                data::load_idx(&images, &labels, self.classes, self.split, self.symmetry)?
            }
            DatasetSource::Named(DatasetKind::Cifar10, path) => {
                data::load_cifar_binary(path, self.classes, self.split, self.symmetry)?
            }
            DatasetSource::Named(DatasetKind::BloodMnist, dir) => {
                data::load_png_dir(dir, self.classes, self.split, self.symmetry)?
            }
            DatasetSource::Cache(path) => data::load_cache(path)?,
        };
        if ds.symmetry != self.symmetry {
            bail!(
                "dataset symmetry {} does not match requested {}",
                ds.symmetry,
                self.symmetry
            );
        }
        let mut ds = ds.resized(rows, cols)?;
        if let Some((r, c)) = ds.dims() {
            if (r, c) != (rows, cols) {
                bail!("images are {r}x{c}, model expects {rows}x{cols}");
            }
        }
        if ds.train.is_empty() || ds.test.is_empty() {
            bail!(
                "dataset has an empty split ({} train, {} test)",
                ds.train.len(),
                ds.test.len()
            );
        }
        ds.provenance
            .steps
            .push(format!("{} train / {} test", ds.train.len(), ds.test.len()));
        Ok(ds)
    }
}

/// Final-iteration summary stored with the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub final_point: Option<AggregatePoint>,
    pub seed_files: Vec<String>,
    pub dataset_flags: Vec<String>,
}

/// Written as `experiment.json` next to the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub data: DataSelection,
    pub model: ModelSelection,
    pub model_config: ModelConfig,
    pub settings: TrainSettings,
    pub out: PathBuf,
    pub provenance: data::Provenance,
    pub summary: Option<Summary>,
}

impl ExperimentSpec {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(
            dir.join("experiment.json"),
            serde_json::to_string_pretty(self)?,
        )?;
        Ok(())
    }
}
