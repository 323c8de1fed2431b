//! QCNN circuit construction.
//!
//! A model is a stack of layers over a shrinking ring of active qubits. Each
//! layer applies one shared-parameter convolutional ansatz to every adjacent
//! pair of the ring, then one shared-parameter pooling ansatz from each traced
//! qubit (control) to its ring predecessor (target). Traced qubits are never
//! touched again; the final single-qubit observable is read on qubit 1.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ansatz::{self, AnsatzChain};
use crate::embedding::{Embedding, EmbeddingKind, EmbeddingTag, ImageTensor};
use crate::error::{Error, Result};
use crate::statevec::{GateOp, Pauli, PauliWord, Statevector};
use crate::symmetry::{
    alternating_rep, half_rep, pauli_word_commutes, restrict_to_pair, rotation_rep, ActiveRep,
    LocalMask, Symmetry, XorMaskRep,
};

/// A pooling application: `control` is traced out, `target` is retained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PoolPair {
    pub target: usize,
    pub control: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPlan {
    /// Active qubits in ring order.
    pub active: Vec<usize>,
    pub conv: AnsatzChain,
    pub pool: u8,
    pub pool_pairs: Vec<PoolPair>,
}

impl LayerPlan {
    pub fn traced(&self) -> Vec<usize> {
        self.pool_pairs.iter().map(|p| p.control).collect()
    }

    pub fn survivors(&self) -> Vec<usize> {
        let traced = self.traced();
        self.active
            .iter()
            .copied()
            .filter(|q| !traced.contains(q))
            .collect()
    }

    /// Adjacent ring pairs in application order: pairs starting at even ring
    /// offsets, then at odd offsets. A two-qubit ring has a single pair.
    pub fn conv_pairs(&self) -> Vec<(usize, usize)> {
        ring_pairs(&self.active)
    }

    pub fn conv_param_count(&self) -> Result<usize> {
        self.conv.param_count()
    }

    pub fn param_count(&self) -> Result<usize> {
        Ok(self.conv.param_count()? + ansatz::get(self.pool)?.param_count)
    }
}

pub(crate) fn ring_pairs(ring: &[usize]) -> Vec<(usize, usize)> {
    let k = ring.len();
    match k {
        0 | 1 => Vec::new(),
        2 => vec![(ring[0], ring[1])],
        _ => (0..k)
            .step_by(2)
            .chain((1..k).step_by(2))
            .map(|i| (ring[i], ring[(i + 1) % k]))
            .collect(),
    }
}

/// Order in which the two last qubits are traced for 10-qubit models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LateTraceOrder {
    /// Layer 3 traces qubit 5, layer 4 traces qubit 9.
    #[default]
    FiveThenNine,
    /// Layer 3 traces qubit 9, layer 4 traces qubit 5.
    NineThenFive,
}

/// Qubits traced in each layer.
pub fn standard_schedules(n: usize) -> Result<Vec<Vec<usize>>> {
    standard_schedules_with(n, LateTraceOrder::default())
}

pub fn standard_schedules_with(n: usize, order: LateTraceOrder) -> Result<Vec<Vec<usize>>> {
    match (n, order) {
        (8, _) => Ok(vec![vec![2, 4, 6, 8], vec![3, 7], vec![5]]),
        (10, LateTraceOrder::FiveThenNine) => {
            Ok(vec![vec![2, 4, 6, 8, 10], vec![3, 7], vec![5], vec![9]])
        }
        (10, LateTraceOrder::NineThenFive) => {
            Ok(vec![vec![2, 4, 6, 8, 10], vec![3, 7], vec![9], vec![5]])
        }
        _ => Err(Error::InvalidConfig(format!(
            "no standard schedule for {n} qubits"
        ))),
    }
}

/// Builds layer plans from a trace schedule; each traced qubit pools into its ring predecessor.
pub fn plan_layers(
    n: usize,
    schedule: &[Vec<usize>],
    conv: &[AnsatzChain],
    pool: &[u8],
) -> Result<Vec<LayerPlan>> {
    if conv.len() != schedule.len() || pool.len() != schedule.len() {
        return Err(Error::InvalidConfig(format!(
            "{} layers in schedule, {} conv and {} pool ansatze",
            schedule.len(),
            conv.len(),
            pool.len()
        )));
    }
    let mut active: Vec<usize> = (1..=n).collect();
    let mut layers = Vec::with_capacity(schedule.len());
    for ((traced, conv), &pool) in schedule.iter().zip(conv).zip(pool) {
        let k = active.len();
        let mut pool_pairs = Vec::with_capacity(traced.len());
        for &q in traced {
            let pos = active
                .iter()
                .position(|&a| a == q)
                .ok_or(Error::InactiveQubit(q))?;
            let target = active[(pos + k - 1) % k];
            if traced.contains(&target) {
                return Err(Error::InvalidConfig(format!(
                    "qubit {q} pools into traced qubit {target}"
                )));
            }
            pool_pairs.push(PoolPair { target, control: q });
        }
        let plan = LayerPlan {
            active: active.clone(),
            conv: conv.clone(),
            pool,
            pool_pairs,
        };
        active = plan.survivors();
        layers.push(plan);
    }
    Ok(layers)
}

/// Complete circuit recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    pub n_qubits: usize,
    /// Image rows = `2^row_qubits`.
    pub row_qubits: usize,
    /// Image columns = `2^col_qubits`.
    pub col_qubits: usize,
    pub embedding: EmbeddingKind,
    pub layers: Vec<LayerPlan>,
    pub observable: PauliWord,
    pub equivariant: bool,
}

/// Datasets with a reference configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    /// 16×16 greyscale, reflection symmetric, 8 qubits.
    FashionMnist,
    /// 32×32 greyscale, reflection symmetric, 10 qubits.
    Cifar10,
    /// 32×32 greyscale, rotation symmetric, 10 qubits.
    BloodMnist,
}

impl DatasetKind {
    pub fn n_qubits(self) -> usize {
        match self {
            DatasetKind::FashionMnist => 8,
            DatasetKind::Cifar10 | DatasetKind::BloodMnist => 10,
        }
    }

    pub fn symmetry(self) -> Symmetry {
        match self {
            DatasetKind::FashionMnist | DatasetKind::Cifar10 => Symmetry::Reflection,
            DatasetKind::BloodMnist => Symmetry::Rotation,
        }
    }
}

fn square_dims(n: usize) -> Result<(usize, usize)> {
    match n {
        8 | 10 => Ok((n / 2, n / 2)),
        _ => Err(Error::InvalidConfig(format!(
            "unsupported qubit count {n}; expected 8 or 10"
        ))),
    }
}

fn chains(ids: &[u8]) -> Vec<AnsatzChain> {
    ids.iter().map(|&i| AnsatzChain::single(i)).collect()
}

/// Reference equivariant model for an `n`-qubit square image and embedding.
///
/// The row is selected by the target representation of the embedding:
/// half-`X` (`0^{n/2}1^{n/2}`), all-`X`, or alternating.
pub fn table1_config(n: usize, kind: EmbeddingKind) -> Result<ModelConfig> {
    let (n1, n2) = square_dims(n)?;
    let target = kind.target_rep(n1, n2)?;
    let (conv, pool, letter): (&[u8], &[u8], Pauli) = if target == half_rep(n)? {
        if n == 8 {
            (&[1, 1, 4], &[6, 6, 7], Pauli::Z)
        } else {
            (&[1, 1, 1, 4], &[6, 7, 9, 8], Pauli::Z)
        }
    } else if target == rotation_rep(n)? {
        if n == 8 {
            (&[1, 2, 3], &[6, 6, 6], Pauli::X)
        } else {
            (&[1, 2, 3, 3], &[6, 6, 6, 6], Pauli::X)
        }
    } else if target == alternating_rep(n)? {
        if n == 8 {
            (&[1, 5, 5], &[7, 9, 9], Pauli::Z)
        } else {
            (&[1, 5, 5, 5], &[7, 9, 9, 9], Pauli::Z)
        }
    } else {
        return Err(Error::InvalidConfig(format!(
            "no reference configuration for target representation {target}"
        )));
    };
    let schedule = standard_schedules(n)?;
    Ok(ModelConfig {
        name: format!("eqcnn-{}-{}-{n}q", kind.tag, kind.symmetry),
        n_qubits: n,
        row_qubits: n1,
        col_qubits: n2,
        embedding: kind,
        layers: plan_layers(n, &schedule, &chains(conv), pool)?,
        observable: PauliWord::single(n, 1, letter)?,
        equivariant: true,
    })
}

/// Reference configuration for a named dataset.
pub fn table1_for_dataset(dataset: DatasetKind, tag: EmbeddingTag) -> Result<ModelConfig> {
    table1_config(
        dataset.n_qubits(),
        EmbeddingKind::new(tag, dataset.symmetry()),
    )
}

/// Non-equivariant baseline: circuit 5 convolutions, circuit 9 pooling,
/// standard embedding, `σZ` on qubit 1.
pub fn nonequivariant_config(n: usize, symmetry: Symmetry) -> Result<ModelConfig> {
    let (n1, n2) = square_dims(n)?;
    let schedule = standard_schedules(n)?;
    let depth = schedule.len();
    Ok(ModelConfig {
        name: format!("qcnn-noneq-{n}q"),
        n_qubits: n,
        row_qubits: n1,
        col_qubits: n2,
        embedding: EmbeddingKind::new(EmbeddingTag::Standard, symmetry),
        layers: plan_layers(
            n,
            &schedule,
            &vec![AnsatzChain::single(5); depth],
            &vec![9; depth],
        )?,
        observable: PauliWord::single(n, 1, Pauli::Z)?,
        equivariant: false,
    })
}

/// Free-form model on the standard schedule.
pub fn custom_config(
    n: usize,
    kind: EmbeddingKind,
    conv: &[AnsatzChain],
    pool: &[u8],
    observable: Pauli,
    equivariant: bool,
) -> Result<ModelConfig> {
    let (n1, n2) = square_dims(n)?;
    let schedule = standard_schedules(n)?;
    Ok(ModelConfig {
        name: format!("custom-{}-{}-{n}q", kind.tag, kind.symmetry),
        n_qubits: n,
        row_qubits: n1,
        col_qubits: n2,
        embedding: kind,
        layers: plan_layers(n, &schedule, conv, pool)?,
        observable: PauliWord::single(n, 1, observable)?,
        equivariant,
    })
}

impl ModelConfig {
    pub fn param_count(&self) -> Result<usize> {
        self.layers.iter().map(LayerPlan::param_count).sum()
    }

    /// Replaces circuits 2 and 3 by circuit 1 and circuit 7 by circuit 8.
    pub fn with_generator_subset(mut self) -> Self {
        for l in &mut self.layers {
            for id in l.conv.0.iter_mut() {
                if *id == 2 || *id == 3 {
                    *id = 1;
                }
            }
            if l.pool == 7 {
                l.pool = 8;
            }
        }
        self.name.push_str("-subset");
        self
    }

    /// Uses the same convolution chain in every layer.
    pub fn with_conv_chain(mut self, chain: AnsatzChain) -> Self {
        for l in &mut self.layers {
            l.conv = chain.clone();
        }
        self.name = format!("{}-conv{}", self.name, chain.label());
        self
    }

    /// Re-plans the trace schedule with the given late trace order, keeping ansatze.
    pub fn with_trace_order(mut self, order: LateTraceOrder) -> Result<Self> {
        let schedule = standard_schedules_with(self.n_qubits, order)?;
        let conv: Vec<AnsatzChain> = self.layers.iter().map(|l| l.conv.clone()).collect();
        let pool: Vec<u8> = self.layers.iter().map(|l| l.pool).collect();
        self.layers = plan_layers(self.n_qubits, &schedule, &conv, &pool)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.row_qubits + self.col_qubits != self.n_qubits {
            return Err(Error::InvalidConfig(
                "image qubits do not add up to register size".into(),
            ));
        }
        if self.observable.n_qubits() != self.n_qubits {
            return Err(Error::InvalidConfig(
                "observable size differs from register".into(),
            ));
        }
        let mut active: Vec<usize> = (1..=self.n_qubits).collect();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.active != active {
                return Err(Error::InvalidConfig(format!(
                    "layer {} active set {:?}, expected {:?}",
                    i + 1,
                    layer.active,
                    active
                )));
            }
            layer.param_count()?;
            if ansatz::get(layer.pool)?.role != ansatz::AnsatzRole::Pooling {
                return Err(Error::InvalidConfig(format!(
                    "layer {} pool ansatz {} is not a pooling circuit",
                    i + 1,
                    layer.pool
                )));
            }
            for s in layer.conv.specs()? {
                if s.role != ansatz::AnsatzRole::Convolutional {
                    return Err(Error::InvalidConfig(format!(
                        "layer {} conv ansatz {} is not convolutional",
                        i + 1,
                        s.id
                    )));
                }
            }
            let traced = layer.traced();
            for p in &layer.pool_pairs {
                if !active.contains(&p.control)
                    || !active.contains(&p.target)
                    || traced.contains(&p.target)
                {
                    return Err(Error::InvalidConfig(format!(
                        "layer {} pool pair {:?} invalid",
                        i + 1,
                        p
                    )));
                }
            }
            active = layer.survivors();
        }
        if active != [1] {
            return Err(Error::InvalidConfig(format!(
                "final active set {active:?}, expected [1]"
            )));
        }
        Ok(())
    }

    /// Flattens the layers into a gate list over a shared parameter vector.
    /// Per layer, the conv parameters come first, then the pooling parameters.
    pub fn compile(&self) -> Result<Circuit> {
        self.validate()?;
        let mut gates = Vec::new();
        let mut slot = 0;
        let mut layer_slots = Vec::new();
        for layer in &self.layers {
            let conv_slot = slot;
            for pair in layer.conv_pairs() {
                gates.extend(layer.conv.place(pair, conv_slot)?);
            }
            slot += layer.conv.param_count()?;
            let pool = ansatz::get(layer.pool)?;
            for p in &layer.pool_pairs {
                gates.extend(pool.place((p.target, p.control), slot));
            }
            slot += pool.param_count;
            layer_slots.push(conv_slot..slot);
        }
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
            n_params: slot,
            layer_slots,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Compiled gate list.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
    pub n_params: usize,
    /// Parameter slot range owned by each layer.
    pub layer_slots: Vec<std::ops::Range<usize>>,
}

/// A compiled model ready for evaluation.
#[derive(Clone, Debug)]
pub struct Model {
    config: ModelConfig,
    embedding: Embedding,
    circuit: Circuit,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self> {
        let circuit = config.compile()?;
        let embedding = Embedding::new(config.embedding, config.row_qubits, config.col_qubits)?;
        Ok(Self {
            config,
            embedding,
            circuit,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    pub fn observable(&self) -> &PauliWord {
        &self.config.observable
    }

    pub fn embed(&self, img: &ImageTensor) -> Result<Statevector> {
        self.embedding.embed(img)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.circuit.n_params {
            return Err(Error::LengthMismatch {
                expected: self.circuit.n_params,
                actual: params.len(),
            });
        }
        Ok(())
    }

    /// Output state of the circuit on an embedded input.
    pub fn run(&self, input: &Statevector, params: &[f64]) -> Result<Statevector> {
        self.check_params(params)?;
        let mut state = input.clone();
        state.apply_gates(&self.circuit.gates, params)?;
        Ok(state)
    }

    /// Expectation value of the observable on an embedded input.
    pub fn forward_state(&self, input: &Statevector, params: &[f64]) -> Result<f64> {
        self.run(input, params)?
            .expectation(&self.config.observable)
    }

    pub fn forward(&self, params: &[f64], img: &ImageTensor) -> Result<f64> {
        self.forward_state(&self.embed(img)?, params)
    }

    /// `|f(g·x) − f(x)|` for the configured symmetry.
    pub fn invariance_gap(&self, params: &[f64], img: &ImageTensor) -> Result<f64> {
        let g = img.transform(self.config.embedding.symmetry);
        Ok((self.forward(params, &g)? - self.forward(params, img)?).abs())
    }
}

/// Builds and evaluates a model in one call.
pub fn forward(config: &ModelConfig, params: &[f64], img: &ImageTensor) -> Result<f64> {
    Model::new(config.clone())?.forward(params, img)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Conv,
    Pool,
}

/// One (layer, pair) equivariance check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub layer: usize,
    pub stage: Stage,
    /// `(a, b)`; for pooling `(target, control)`.
    pub pair: (usize, usize),
    pub local: LocalMask,
    pub ansatz: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: usize,
    pub active: Vec<usize>,
    /// Representation seen by the layer's convolutions.
    pub rep: String,
    /// Representation after pooling.
    pub reduced: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub config: String,
    pub representation: String,
    pub layers: Vec<LayerSummary>,
    pub checks: Vec<PairCheck>,
    pub observable: String,
    pub final_rep: String,
    pub observable_pass: bool,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.observable_pass && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config: {}", self.config);
        let _ = writeln!(out, "representation: {}", self.representation);
        for l in &self.layers {
            let _ = writeln!(out, "layer {}: active {:?}", l.layer, l.active);
            let _ = writeln!(out, "  rep {{I, {}}}", l.rep);
            for c in self.checks.iter().filter(|c| c.layer == l.layer) {
                let stage = match c.stage {
                    Stage::Conv => "conv",
                    Stage::Pool => "pool",
                };
                let _ = writeln!(
                    out,
                    "  {stage} {:>2}-{:<2} local {{II, {}}} ansatz {:<4} {}",
                    c.pair.0,
                    c.pair.1,
                    c.local,
                    c.ansatz,
                    if c.pass { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(out, "  reduced {{I, {}}}", l.reduced);
        }
        let _ = writeln!(
            out,
            "observable {} vs final rep {{I, {}}}: {}",
            self.observable,
            self.final_rep,
            if self.observable_pass { "ok" } else { "FAIL" }
        );
        let _ = writeln!(
            out,
            "verdict: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

/// Audits every layer against the representation induced by the model's embedding.
pub fn validate_equivariance(config: &ModelConfig) -> Result<EquivarianceReport> {
    let rep = config
        .embedding
        .target_rep(config.row_qubits, config.col_qubits)?;
    validate_equivariance_against(config, &rep)
}

/// Audits every layer against an explicit input representation.
pub fn validate_equivariance_against(
    config: &ModelConfig,
    rep: &XorMaskRep,
) -> Result<EquivarianceReport> {
    config.validate()?;
    if rep.n_qubits() != config.n_qubits {
        return Err(Error::SizeMismatch(format!(
            "representation on {} qubits, model on {}",
            rep.n_qubits(),
            config.n_qubits
        )));
    }
    let mut current = ActiveRep::full(*rep);
    let mut layers = Vec::new();
    let mut checks = Vec::new();
    for (i, layer) in config.layers.iter().enumerate() {
        let idx = i + 1;
        let conv_set = layer.conv.equivariance_set()?;
        for pair in layer.conv_pairs() {
            let local = restrict_to_pair(&current, pair)?.nontrivial();
            checks.push(PairCheck {
                layer: idx,
                stage: Stage::Conv,
                pair,
                local,
                ansatz: layer.conv.label(),
                pass: conv_set.contains(&local),
            });
        }
        let pool = ansatz::get(layer.pool)?;
        for p in &layer.pool_pairs {
            let pair = (p.target, p.control);
            let local = restrict_to_pair(&current, pair)?.nontrivial();
            checks.push(PairCheck {
                layer: idx,
                stage: Stage::Pool,
                pair,
                local,
                ansatz: layer.pool.to_string(),
                pass: pool.equivariance_set.contains(&local),
            });
        }
        let reduced = current.reduce(&layer.traced())?;
        layers.push(LayerSummary {
            layer: idx,
            active: layer.active.clone(),
            rep: current.tensor_notation(),
            reduced: reduced.tensor_notation(),
        });
        current = reduced;
    }
    let mut flags = vec![false; config.n_qubits];
    for &l in current.labels() {
        flags[l - 1] = current.has_x(l)?;
    }
    let final_full = XorMaskRep::from_flags(&flags)?;
    let observable_pass = pauli_word_commutes(&config.observable, &final_full)?;
    Ok(EquivarianceReport {
        config: config.name.clone(),
        representation: ActiveRep::full(*rep).tensor_notation(),
        layers,
        checks,
        observable: config.observable.to_string(),
        final_rep: current.tensor_notation(),
        observable_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(tag: EmbeddingTag, s: Symmetry) -> EmbeddingKind {
        EmbeddingKind::new(tag, s)
    }

    fn ids(cfg: &ModelConfig) -> (Vec<String>, Vec<u8>) {
        (
            cfg.layers.iter().map(|l| l.conv.label()).collect(),
            cfg.layers.iter().map(|l| l.pool).collect(),
        )
    }

    #[test]
    fn schedules() {
        let s8 = standard_schedules(8).unwrap();
        assert_eq!(s8.len(), 3);
        let s10 = standard_schedules(10).unwrap();
        assert_eq!(s10.len(), 4);
        assert!(standard_schedules(6).is_err());
        let layers = plan_layers(10, &s10, &chains(&[1, 1, 1, 4]), &[6, 7, 9, 8]).unwrap();
        assert_eq!(layers[1].survivors(), vec![1, 5, 9]);
        assert_eq!(layers[3].survivors(), vec![1]);
        let layers = plan_layers(8, &s8, &chains(&[1, 1, 4]), &[6, 6, 7]).unwrap();
        assert_eq!(layers[2].survivors(), vec![1]);
        assert_eq!(
            layers[0].pool_pairs,
            vec![
                PoolPair {
                    target: 1,
                    control: 2
                },
                PoolPair {
                    target: 3,
                    control: 4
                },
                PoolPair {
                    target: 5,
                    control: 6
                },
                PoolPair {
                    target: 7,
                    control: 8
                }
            ]
        );
        assert_eq!(
            layers[1].pool_pairs,
            vec![
                PoolPair {
                    target: 1,
                    control: 3
                },
                PoolPair {
                    target: 5,
                    control: 7
                }
            ]
        );
    }

    #[test]
    fn ring_pair_order() {
        assert_eq!(
            ring_pairs(&[1, 2, 3, 4]),
            vec![(1, 2), (3, 4), (2, 3), (4, 1)]
        );
        assert_eq!(ring_pairs(&[1, 5, 9]), vec![(1, 5), (9, 1), (5, 9)]);
        assert_eq!(ring_pairs(&[1, 5]), vec![(1, 5)]);
        assert!(ring_pairs(&[1]).is_empty());
        assert_eq!(ring_pairs(&[1, 2, 3, 4, 5, 6, 7, 8]).len(), 8);
    }

    #[test]
    fn table1_rows() {
        let c = table1_for_dataset(DatasetKind::FashionMnist, EmbeddingTag::Standard).unwrap();
        assert_eq!(
            ids(&c),
            (vec!["1".into(), "1".into(), "4".into()], vec![6, 6, 7])
        );
        assert_eq!(c.observable.to_string(), "ZIIIIIII");
        let c = table1_for_dataset(DatasetKind::FashionMnist, EmbeddingTag::Ae1).unwrap();
        assert_eq!(
            ids(&c),
            (vec!["1".into(), "2".into(), "3".into()], vec![6, 6, 6])
        );
        assert_eq!(c.observable.letter(1), Pauli::X);
        let c = table1_for_dataset(DatasetKind::FashionMnist, EmbeddingTag::Ae2).unwrap();
        assert_eq!(
            ids(&c),
            (vec!["1".into(), "5".into(), "5".into()], vec![7, 9, 9])
        );
        let c = table1_for_dataset(DatasetKind::Cifar10, EmbeddingTag::Ae2).unwrap();
        assert_eq!(ids(&c).1, vec![7, 9, 9, 9]);
        let c = table1_for_dataset(DatasetKind::Cifar10, EmbeddingTag::Standard).unwrap();
        assert_eq!(ids(&c).1, vec![6, 7, 9, 8]);
        let c = table1_for_dataset(DatasetKind::BloodMnist, EmbeddingTag::Standard).unwrap();
        assert_eq!(
            ids(&c),
            (
                vec!["1".into(), "2".into(), "3".into(), "3".into()],
                vec![6, 6, 6, 6]
            )
        );
        assert_eq!(c.observable.letter(1), Pauli::X);
        let c = table1_for_dataset(DatasetKind::BloodMnist, EmbeddingTag::Ae1).unwrap();
        assert_eq!(ids(&c).1, vec![6, 7, 9, 8]);
    }

    #[test]
    fn nonequivariant_counts() {
        let c = nonequivariant_config(8, Symmetry::Reflection).unwrap();
        assert_eq!(c.layers.len(), 3);
        assert_eq!(c.param_count().unwrap(), 24);
        for l in &c.layers {
            assert_eq!(l.conv_param_count().unwrap(), 6);
        }
        assert_eq!(
            nonequivariant_config(10, Symmetry::Reflection)
                .unwrap()
                .layers
                .len(),
            4
        );
    }

    #[test]
    fn every_table1_config_validates() {
        for n in [8, 10] {
            for tag in [EmbeddingTag::Standard, EmbeddingTag::Ae1, EmbeddingTag::Ae2] {
                for s in [Symmetry::Reflection, Symmetry::Rotation] {
                    let c = table1_config(n, kind(tag, s)).unwrap();
                    let r = validate_equivariance(&c).unwrap();
                    assert!(r.passed(), "{}\n{}", c.name, r.to_text());
                }
            }
        }
    }

    #[test]
    fn nonequivariant_fails_audit() {
        let c = nonequivariant_config(8, Symmetry::Reflection).unwrap();
        assert!(!validate_equivariance(&c).unwrap().passed());
    }

    #[test]
    fn c2_in_first_layer_fails_on_ix_pairs() {
        let c = custom_config(
            8,
            kind(EmbeddingTag::Standard, Symmetry::Reflection),
            &chains(&[2, 1, 4]),
            &[6, 6, 7],
            Pauli::Z,
            true,
        )
        .unwrap();
        let r = validate_equivariance(&c).unwrap();
        let failed: Vec<_> = r.failures().collect();
        assert!(!failed.is_empty());
        assert!(failed
            .iter()
            .all(|f| f.layer == 1 && f.local != LocalMask::XX && f.local != LocalMask::II));
        assert!(failed.iter().any(|f| f.local == LocalMask::IX));
    }

    #[test]
    fn sigma_z_fails_on_all_x_rows() {
        let mut c = table1_config(8, kind(EmbeddingTag::Ae1, Symmetry::Reflection)).unwrap();
        c.observable = PauliWord::single(8, 1, Pauli::Z).unwrap();
        let r = validate_equivariance(&c).unwrap();
        assert!(!r.observable_pass);
        assert!(r.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn walkthrough_reduced_reps() {
        let c = table1_config(8, kind(EmbeddingTag::Standard, Symmetry::Reflection)).unwrap();
        let r = validate_equivariance(&c).unwrap();
        assert_eq!(r.layers[0].reduced, "I1 ⊗ I3 ⊗ X5 ⊗ X7");
        assert_eq!(r.layers[1].reduced, "I1 ⊗ X5");
        let c = table1_config(10, kind(EmbeddingTag::Standard, Symmetry::Reflection)).unwrap();
        let r = validate_equivariance(&c).unwrap();
        assert_eq!(r.layers[0].reduced, "I1 ⊗ I3 ⊗ I5 ⊗ X7 ⊗ X9");
        assert_eq!(r.layers[1].reduced, "I1 ⊗ I5 ⊗ X9");
        assert!(r.to_text().contains("verdict: PASS"));
    }

    #[test]
    fn alternate_trace_order_is_selectable() {
        let c = table1_config(10, kind(EmbeddingTag::Standard, Symmetry::Reflection))
            .unwrap()
            .with_trace_order(LateTraceOrder::NineThenFive)
            .unwrap();
        assert_eq!(c.layers[2].traced(), vec![9]);
        assert_eq!(c.layers[3].traced(), vec![5]);
        c.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let c = table1_config(10, kind(EmbeddingTag::Ae2, Symmetry::Rotation)).unwrap();
        let text = c.to_json().unwrap();
        assert_eq!(ModelConfig::from_json(&text).unwrap(), c);
        assert!(text.contains("\"observable\": \"ZIIIIIIIII\""));
    }

    #[test]
    fn compile_layout() {
        let c = table1_config(8, kind(EmbeddingTag::Standard, Symmetry::Reflection)).unwrap();
        let circ = c.compile().unwrap();
        assert_eq!(circ.n_params, 3 * (3 + 2));
        assert_eq!(circ.layer_slots, vec![0..5, 5..10, 10..15]);
        // layer 1: 8 conv pairs × 3 gates + 4 pool gates
        let l1 = 8 * 3 + 4;
        assert!(circ.gates[..l1]
            .iter()
            .all(|g| g.param_slots().iter().all(|&s| s < 5)));
    }

    #[test]
    fn forward_on_basis_image() {
        for c in [
            table1_config(8, kind(EmbeddingTag::Standard, Symmetry::Reflection)).unwrap(),
            nonequivariant_config(8, Symmetry::Reflection).unwrap(),
        ] {
            let model = Model::new(c).unwrap();
            let mut px = vec![0.0; 256];
            px[0] = 1.0;
            let img = ImageTensor::new(16, 16, px).unwrap();
            let params = vec![0.0; model.n_params()];
            assert!((model.forward(&params, &img).unwrap() - 1.0).abs() < 1e-12);
            assert!(model.forward(&params[1..], &img).is_err());
        }
    }
}
