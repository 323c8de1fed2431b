//! Training: MSE loss, adjoint gradients, Nesterov momentum and seeded runs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::statevec::{apply_pauli_masks, GateOp, PauliWord, Statevector};

/// Embedded states with their ±1 labels.
#[derive(Clone, Debug)]
pub struct EncodedSplit {
    pub states: Vec<Statevector>,
    pub labels: Vec<f64>,
}

impl EncodedSplit {
    pub fn encode(model: &Model, samples: &[crate::data::Sample]) -> Result<Self> {
        let states = samples
            .iter()
            .map(|s| model.embed(&s.image))
            .collect::<Result<Vec<_>>>()?;
        let labels = samples.iter().map(|s| f64::from(s.label)).collect();
        Ok(Self { states, labels })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `(1/p) Σ (f − y)²`.
pub fn mse_loss(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            actual: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(predictions
        .iter()
        .zip(labels)
        .map(|(f, y)| (f - y).powi(2))
        .sum::<f64>()
        / labels.len() as f64)
}

/// Predicted class: `+1` when `f ≥ 0`.
pub fn predict(f: f64) -> f64 {
    if f >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Expectation value and its gradient for one embedded input.
pub fn expectation_and_gradient(
    model: &Model,
    input: &Statevector,
    params: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let circuit = model.circuit();
    if params.len() != circuit.n_params {
        return Err(Error::LengthMismatch {
            expected: circuit.n_params,
            actual: params.len(),
        });
    }
    adjoint_gradient(&circuit.gates, model.observable(), input, params)
}

/// `⟨ψ|U†OU|ψ⟩` and its gradient by adjoint differentiation: one forward
/// pass, then a backward sweep carrying `φ` and `λ = U†_{>k} O ψ_out`.
pub fn adjoint_gradient(
    gates: &[GateOp],
    observable: &PauliWord,
    input: &Statevector,
    params: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let n = input.n_qubits();
    if observable.n_qubits() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: observable.n_qubits(),
        });
    }
    for g in gates {
        g.validate(n, params.len())?;
    }
    let mut phi = input.amplitudes().to_vec();
    for g in gates {
        g.apply_raw(&mut phi, n, params);
    }
    let (flip, sign, n_y) = observable.masks();
    let mut lambda = phi.clone();
    apply_pauli_masks(&mut lambda, flip, sign, n_y);
    let value = inner(&phi, &lambda).re;

    let mut grad = vec![0.0; params.len()];
    let mut mu = vec![Complex64::new(0.0, 0.0); phi.len()];
    for g in gates.iter().rev() {
        g.apply_inverse_raw(&mut phi, n, params);
        for (k, slot) in g.param_slots().into_iter().enumerate() {
            mu.copy_from_slice(&phi);
            g.apply_derivative_raw(&mut mu, n, params, k);
            grad[slot] += 2.0 * inner(&lambda, &mu).re;
        }
        g.apply_inverse_raw(&mut lambda, n, params);
    }
    Ok((value, grad))
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Batch MSE and its gradient `(2/p) Σ (f − y) ∇f`.
pub fn loss_and_gradient(
    model: &Model,
    params: &[f64],
    split: &EncodedSplit,
    batch: &[usize],
) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let p = batch.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; params.len()];
    for &i in batch {
        let (f, df) = expectation_and_gradient(model, &split.states[i], params)?;
        let r = f - split.labels[i];
        loss += r * r;
        for (g, d) in grad.iter_mut().zip(df) {
            *g += 2.0 * r * d / p;
        }
    }
    Ok((loss / p, grad))
}

/// Mean squared error and accuracy over a whole split.
pub fn evaluate(model: &Model, params: &[f64], split: &EncodedSplit) -> Result<(f64, f64)> {
    let preds = split
        .states
        .iter()
        .map(|s| model.forward_state(s, params))
        .collect::<Result<Vec<_>>>()?;
    let loss = mse_loss(&preds, &split.labels)?;
    let correct = preds
        .iter()
        .zip(&split.labels)
        .filter(|(f, y)| predict(**f) == **y)
        .count();
    Ok((loss, correct as f64 / split.len() as f64))
}

/// Nesterov momentum: the gradient is taken at `θ − μa`, then
/// `a ← μa + η∇`, `θ ← θ − a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nesterov {
    pub lr: f64,
    pub momentum: f64,
    accumulation: Vec<f64>,
}

impl Nesterov {
    pub fn new(lr: f64, momentum: f64, n_params: usize) -> Self {
        Self {
            lr,
            momentum,
            accumulation: vec![0.0; n_params],
        }
    }

    pub fn accumulation(&self) -> &[f64] {
        &self.accumulation
    }

    /// One update. `grad_at` receives the look-ahead point and returns `(loss, gradient)`.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grad_at: impl FnOnce(&[f64]) -> Result<(f64, Vec<f64>)>,
    ) -> Result<f64> {
        let shifted: Vec<f64> = params
            .iter()
            .zip(&self.accumulation)
            .map(|(t, a)| t - self.momentum * a)
            .collect();
        let (loss, grad) = grad_at(&shifted)?;
        if grad.len() != params.len() {
            return Err(Error::LengthMismatch {
                expected: params.len(),
                actual: grad.len(),
            });
        }
        for ((t, a), g) in params.iter_mut().zip(&mut self.accumulation).zip(grad) {
            *a = self.momentum * *a + self.lr * g;
            *t -= *a;
        }
        Ok(loss)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub iterations: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    pub seeds: usize,
    /// Seed `k` runs with RNG seed `base_seed + k`.
    pub base_seed: u64,
    pub eval_every: usize,
    /// Worker threads for seed-level parallelism; 0 uses the rayon default.
    pub threads: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            iterations: 300,
            batch_size: 32,
            lr: 0.01,
            momentum: 0.9,
            seeds: 5,
            base_seed: 0,
            eval_every: 10,
            threads: 0,
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if self.seeds == 0 {
            return bad("at least one seed is required");
        }
        if self.eval_every == 0 {
            return bad("evaluation interval must be positive");
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must lie in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub iteration: usize,
    /// MSE over the full training split.
    pub train_loss: f64,
    pub test_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub history: Vec<EvalPoint>,
    pub final_params: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub iteration: usize,
    pub mean_acc: f64,
    /// Population standard deviation across seeds.
    pub std_acc: f64,
    pub mean_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub model: String,
    pub settings: TrainSettings,
    pub runs: Vec<SeedRun>,
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl TrainRecord {
    pub fn aggregate(&self) -> Vec<AggregatePoint> {
        let Some(first) = self.runs.first() else {
            return Vec::new();
        };
        (0..first.history.len())
            .map(|k| {
                let accs: Vec<f64> = self
                    .runs
                    .iter()
                    .map(|r| r.history[k].test_accuracy)
                    .collect();
                let losses: Vec<f64> = self.runs.iter().map(|r| r.history[k].train_loss).collect();
                let (mean_acc, std_acc) = mean_std(&accs);
                AggregatePoint {
                    iteration: first.history[k].iteration,
                    mean_acc,
                    std_acc,
                    mean_loss: mean_std(&losses).0,
                }
            })
            .collect()
    }

    /// Final-evaluation accuracy of each seed.
    pub fn final_accuracies(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.history.last().map(|p| p.test_accuracy))
            .collect()
    }

    pub fn seed_csv(run: &SeedRun) -> String {
        let mut out = String::from("seed,iteration,train_loss,test_accuracy\n");
        for p in &run.history {
            out.push_str(&format!(
                "{},{},{},{}\n",
                run.seed, p.iteration, p.train_loss, p.test_accuracy
            ));
        }
        out
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("iteration,mean_acc,std_acc\n");
        for p in self.aggregate() {
            out.push_str(&format!("{},{},{}\n", p.iteration, p.mean_acc, p.std_acc));
        }
        out
    }
}

/// Initial parameters, uniform in `[0, 2π)`.
pub fn init_params(n_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_params).map(|_| rng.gen_range(0.0..TAU)).collect()
}

/// One seeded run on pre-embedded splits.
pub fn train_seed(
    model: &Model,
    settings: &TrainSettings,
    train: &EncodedSplit,
    test: &EncodedSplit,
    seed: u64,
) -> Result<SeedRun> {
    settings.validate()?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut params = init_params(model.n_params(), seed);
    // Batch draws use a stream separate from initialisation.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut opt = Nesterov::new(settings.lr, settings.momentum, params.len());
    let mut history = Vec::new();
    let mut record = |it: usize, params: &[f64]| -> Result<()> {
        let (train_loss, _) = evaluate(model, params, train)?;
        let (_, test_accuracy) = evaluate(model, params, test)?;
        history.push(EvalPoint {
            iteration: it,
            train_loss,
            test_accuracy,
        });
        Ok(())
    };
    record(0, &params)?;
    for it in 1..=settings.iterations {
        let batch: Vec<usize> = (0..settings.batch_size)
            .map(|_| rng.gen_range(0..train.len()))
            .collect();
        opt.step(&mut params, |shifted| {
            loss_and_gradient(model, shifted, train, &batch)
        })?;
        if it % settings.eval_every == 0 || it == settings.iterations {
            record(it, &params)?;
        }
    }
    Ok(SeedRun {
        seed,
        history,
        final_params: params,
    })
}

/// Trains every seed on `data`. Seeds run in parallel; each run is deterministic.
pub fn train(
    model: &Model,
    data: &LabeledDataset,
    settings: &TrainSettings,
) -> Result<TrainRecord> {
    settings.validate()?;
    let train_split = EncodedSplit::encode(model, &data.train)?;
    let test_split = EncodedSplit::encode(model, &data.test)?;
    let seeds: Vec<u64> = (0..settings.seeds as u64)
        .map(|k| settings.base_seed + k)
        .collect();
    let run_all = || {
        seeds
            .par_iter()
            .map(|&s| train_seed(model, settings, &train_split, &test_split, s))
            .collect::<Result<Vec<_>>>()
    };
    let runs = if settings.threads == 0 {
        run_all()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(settings.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run_all)?
    };
    Ok(TrainRecord {
        model: model.config().name.clone(),
        settings: settings.clone(),
        runs,
    })
}
