//! `eqcnn` command-line harness.
//!
//! Exit codes: 0 success, 1 audit or verification failure, 2 input error.

mod experiment;
mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eqcnn::ansatz::{catalog_text, AnsatzChain};
use eqcnn::data::{self, Split};
use eqcnn::embedding::{Embedding, EmbeddingKind, EmbeddingTag, ImageTensor};
use eqcnn::model::{validate_equivariance, LateTraceOrder, Model, ModelConfig};
use eqcnn::symmetry::Symmetry;
use eqcnn::train::{self, TrainRecord, TrainSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use experiment::{
    DataSelection, DatasetSource, ExperimentSpec, ModelChoice, ModelSelection, Summary,
};

/// Gap above which a sampled forward pass counts as an invariance violation.
const INVARIANCE_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "eqcnn",
    version,
    about = "Equivariant QCNN statevector experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model's layer-by-layer equivariance and sample forward invariance.
    Audit(AuditArgs),
    /// Train a model over several seeds and write CSV curves.
    Train(TrainArgs),
    /// Print the basis permutation of an embedding and verify it.
    Permutation(PermutationArgs),
    /// Print the ansatz catalog.
    Catalog,
    /// Write a synthetic symmetric dataset as a float32 cache.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "table1")]
    model: ModelChoice,
    /// ae, ae1 or ae2.
    #[arg(long, default_value = "ae")]
    embedding: EmbeddingTag,
    /// reflection or rotation; defaults to the dataset's symmetry.
    #[arg(long)]
    symmetry: Option<Symmetry>,
    /// 8 or 10; defaults to the dataset's size.
    #[arg(long)]
    qubits: Option<usize>,
    /// Convolution ansatz per layer for custom models, e.g. `1,1+2,4`.
    #[arg(long, value_delimiter = ',')]
    conv: Vec<AnsatzChain>,
    /// Pooling ansatz per layer for custom models, e.g. `6,6,7`.
    #[arg(long, value_delimiter = ',')]
    pool: Vec<u8>,
    /// Observable letter on qubit 1 for custom models.
    #[arg(long, default_value = "Z")]
    observable: char,
    /// Declare a custom model equivariant.
    #[arg(long)]
    equivariant: bool,
    /// Order of the late traces at 10 qubits: 5-9 or 9-5.
    #[arg(long, default_value = "5-9", value_parser = parse_trace_order)]
    trace_order: LateTraceOrder,
    /// Read the model from a JSON config instead.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_trace_order(s: &str) -> Result<LateTraceOrder> {
    match s {
        "5-9" => Ok(LateTraceOrder::FiveThenNine),
        "9-5" => Ok(LateTraceOrder::NineThenFive),
        _ => bail!("expected 5-9 or 9-5"),
    }
}

impl ModelArgs {
    fn selection(&self, default_qubits: usize, default_symmetry: Symmetry) -> ModelSelection {
        ModelSelection {
            choice: self.model,
            qubits: self.qubits.unwrap_or(default_qubits),
            embedding: self.embedding,
            symmetry: self.symmetry.unwrap_or(default_symmetry),
            conv: self.conv.clone(),
            pool: self.pool.clone(),
            observable: self.observable,
            equivariant: self.equivariant,
            trace_order: self.trace_order,
        }
    }

    fn config(&self, selection: &ModelSelection) -> Result<ModelConfig> {
        match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let config = ModelConfig::from_json(&text)?;
                config.validate()?;
                Ok(config)
            }
            None => selection.build(),
        }
    }
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Random (image, parameter) pairs for the invariance check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Treat the model as equivariant even if its config does not claim it.
    #[arg(long)]
    expect_equivariant: bool,
    /// Directory for the report file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// synth, fashion-mnist:<dir>, cifar10:<file|dir>, blood-mnist:<dir> or cache:<json>.
    #[arg(long, default_value = "synth")]
    dataset: DatasetSource,
    #[command(flatten)]
    model: ModelArgs,
    /// Two class ids, e.g. `0,1`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    classes: Option<Vec<u8>>,
    #[arg(long, default_value_t = 1000)]
    train_size: usize,
    #[arg(long, default_value_t = 500)]
    test_size: usize,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[arg(long, default_value_t = 300)]
    iterations: usize,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 10)]
    eval_every: usize,
    /// Worker threads; defaults to the number of seeds.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed of the synthetic generator.
    #[arg(long, default_value_t = 0)]
    synth_seed: u64,
    /// Also write accuracy.svg.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PermutationArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long, default_value = "ae1")]
    embedding: EmbeddingTag,
    #[arg(long, default_value = "reflection")]
    symmetry: Symmetry,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 8)]
    qubits: usize,
    #[arg(long, default_value = "reflection")]
    symmetry: Symmetry,
    #[arg(long, default_value_t = 512)]
    train_size: usize,
    #[arg(long, default_value_t = 256)]
    test_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "synth")]
    name: String,
    #[arg(long)]
    out: PathBuf,
}

/// Failure kinds mapped to exit codes.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Audit(a) => audit(&a),
        Command::Train(a) => train_cmd(&a),
        Command::Permutation(a) => permutation(&a),
        Command::Catalog => {
            println!("{}", catalog_text());
            Ok(Outcome::Ok)
        }
        Command::Synth(a) => synth(&a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn square_dims(n: usize) -> Result<(usize, usize)> {
    if n < 2 || !n.is_multiple_of(2) {
        bail!("qubit count {n} must be even");
    }
    Ok((1 << (n / 2), 1 << (n / 2)))
}

fn audit(args: &AuditArgs) -> Result<Outcome> {
    let selection = args.model.selection(8, Symmetry::Reflection);
    let config = args.model.config(&selection)?;
    let report = validate_equivariance(&config)?;
    let model = Model::new(config.clone())?;
    let (rows, cols) = model.embedding().image_dims();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = 0.0f64;
    let mut violations = 0;
    for _ in 0..args.samples {
        let img = ImageTensor::new(
            rows,
            cols,
            (0..rows * cols).map(|_| rng.gen_range(0.0..1.0)).collect(),
        )?;
        let params: Vec<f64> = (0..model.n_params())
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let gap = model.invariance_gap(&params, &img)?;
        worst = worst.max(gap);
        if gap > INVARIANCE_TOL {
            violations += 1;
        }
    }
    let claimed = config.equivariant || args.expect_equivariant;
    let sampled_ok = violations == 0;
    let mut text = report.to_text();
    text.push_str(&format!(
        "sampled invariance: {violations}/{} pairs above {INVARIANCE_TOL:e}, max gap {worst:.3e}\n",
        args.samples
    ));
    text.push_str(&format!("claimed equivariant: {claimed}\n"));
    let failed = claimed && !(report.passed() && sampled_ok);
    text.push_str(&format!("result: {}\n", if failed { "FAIL" } else { "OK" }));
    print!("{text}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("audit_{}.txt", config.name));
        fs::write(&path, &text)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(if failed { Outcome::Failed } else { Outcome::Ok })
}

fn train_cmd(args: &TrainArgs) -> Result<Outcome> {
    let source = &args.dataset;
    let selection = args
        .model
        .selection(source.default_qubits(), source.default_symmetry()?);
    let config = args.model.config(&selection)?;
    let classes = match &args.classes {
        Some(c) => (c[0], c[1]),
        None => source.default_classes(),
    };
    let data_sel = DataSelection {
        source: source.clone(),
        classes,
        split: Split {
            train: args.train_size,
            test: args.test_size,
        },
        symmetry: config.embedding.symmetry,
        synth_seed: args.synth_seed,
    };
    let (rows, cols) = (1 << config.row_qubits, 1 << config.col_qubits);
    let dataset = data_sel.load(rows, cols)?;
    let settings = TrainSettings {
        iterations: args.iterations,
        batch_size: args.batch,
        lr: args.lr,
        momentum: args.momentum,
        seeds: args.seeds,
        base_seed: args.base_seed,
        eval_every: args.eval_every,
        threads: args.threads.unwrap_or(args.seeds),
    };
    settings.validate()?;
    let model = Model::new(config.clone())?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let record = train::train(&model, &dataset, &settings)?;
    let summary = write_outputs(&args.out, &record, args.plot)?;
    for flag in &dataset.provenance.flags {
        eprintln!("note: {flag}");
    }
    if let Some(p) = &summary.final_point {
        println!(
            "{}: iteration {} accuracy {:.4} ± {:.4}",
            record.model, p.iteration, p.mean_acc, p.std_acc
        );
    }
    let spec = ExperimentSpec {
        data: data_sel,
        model: selection,
        model_config: config,
        settings,
        out: args.out.clone(),
        provenance: dataset.provenance.clone(),
        summary: Some(Summary {
            dataset_flags: dataset.provenance.flags.clone(),
            ..summary
        }),
    };
    spec.write(&args.out)?;
    Ok(Outcome::Ok)
}

fn write_outputs(dir: &Path, record: &TrainRecord, plot: bool) -> Result<Summary> {
    let mut seed_files = Vec::new();
    for run in &record.runs {
        let name = format!("seed_{}.csv", run.seed);
        fs::write(dir.join(&name), TrainRecord::seed_csv(run))?;
        seed_files.push(name);
    }
    fs::write(dir.join("aggregate.csv"), record.aggregate_csv())?;
    let aggregate = record.aggregate();
    if plot {
        fs::write(
            dir.join("accuracy.svg"),
            plot::accuracy_svg(&record.model, &aggregate),
        )?;
    }
    Ok(Summary {
        final_point: aggregate.last().copied(),
        seed_files,
        dataset_flags: Vec::new(),
    })
}

fn permutation(args: &PermutationArgs) -> Result<Outcome> {
    let kind = EmbeddingKind::new(args.embedding, args.symmetry);
    let embedding = Embedding::new(kind, args.n1, args.n2)?;
    let source = kind.source_rep(args.n1, args.n2)?;
    let perm = embedding.permutation();
    print!("{}", perm.to_text());
    let ok = perm.intertwines(&source, embedding.target_rep());
    println!("source: {source}");
    println!("target: {}", embedding.target_rep());
    println!("verdict: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

fn synth(args: &SynthArgs) -> Result<Outcome> {
    let (rows, cols) = square_dims(args.qubits)?;
    let ds = data::synth_symmetric(
        Split {
            train: args.train_size,
            test: args.test_size,
        },
        rows,
        cols,
        args.symmetry,
        args.seed,
    )?;
    let path = data::save_cache(&ds, &args.out, &args.name)?;
    println!("{}", path.display());
    Ok(Outcome::Ok)
}
