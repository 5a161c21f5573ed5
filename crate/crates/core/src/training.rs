//! Training procedures: plain VQE, sequential Hamiltonian assembly (SHA),
//! layerwise learning, Layer-VQE, QAOA and the SHA hybrids.
//!
//! Every procedure is a sequence of stages. A stage fixes a circuit, a
//! stage Hamiltonian and the set of trainable parameter slots, and runs
//! [`minimize`] on the shot-estimated expectation. All stages of a run share
//! one evaluation counter, which doubles as the shot RNG stream, so a run is
//! fully determined by its inputs and seed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::{
    build_ansatz, prepend_ry_layer, qaoa_circuit, qaoa_circuit_layers, qaoa_initial_params,
    AnsatzTemplate,
};
use crate::bits::Counts;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::instances::{brute_force_oracle, OracleReport, ProblemInstance, ProblemKind};
use crate::metrics::MetricSnapshot;
use crate::optimizer::{minimize, OptimizerConfig, StageResult, StopReason};
use crate::partition::{PartitionSchedule, Strategy};
use crate::simulator::{run_circuit, sample_with, shot_rng, ParamCircuit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Global settings; `max_iterations` is the budget of the whole run and
    /// `progress_threshold` applies to stages on the full Hamiltonian.
    pub optimizer: OptimizerConfig,
    /// Shots per objective evaluation.
    pub shots: u64,
    /// Progress threshold for stages on a partial Hamiltonian.
    pub partial_progress_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: OptimizerConfig::default(),
            shots: 200,
            partial_progress_threshold: 0.8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if !(self.partial_progress_threshold >= 0.0) {
            return Err(Error::InvalidArgument(
                "partial progress threshold must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// A training method, written as in `"vqe"`, `"sha:nw:4"`, `"ll"`,
/// `"lvqe"`, `"qaoa:3"`, `"sha+ll:sq:2"`, `"sha+lvqe:cl:4"` or
/// `"sha+qaoa:rd:6:3"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Vqe,
    Sha(Strategy),
    Layerwise,
    LayerVqe,
    Qaoa(usize),
    ShaLayerwise(Strategy),
    ShaLayerVqe(Strategy),
    ShaQaoa(Strategy, usize),
}

impl Method {
    /// Whether the method builds its circuit from an ansatz template.
    pub fn uses_ansatz(&self) -> bool {
        !matches!(self, Method::Qaoa(_) | Method::ShaQaoa(..))
    }

    pub fn strategy(&self) -> Option<Strategy> {
        match *self {
            Method::Sha(s) | Method::ShaLayerwise(s) | Method::ShaLayerVqe(s) | Method::ShaQaoa(s, _) => {
                Some(s)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Vqe => f.write_str("vqe"),
            Method::Sha(s) => write!(f, "sha:{s}"),
            Method::Layerwise => f.write_str("ll"),
            Method::LayerVqe => f.write_str("lvqe"),
            Method::Qaoa(p) => write!(f, "qaoa:{p}"),
            Method::ShaLayerwise(s) => write!(f, "sha+ll:{s}"),
            Method::ShaLayerVqe(s) => write!(f, "sha+lvqe:{s}"),
            Method::ShaQaoa(s, p) => write!(f, "sha+qaoa:{s}:{p}"),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_depth(input: &str, p: &str) -> Result<usize> {
    match p.parse::<usize>() {
        Ok(p) if p >= 1 => Ok(p),
        _ => Err(Error::parse(input, "QAOA depth must be a positive integer")),
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let strategy = |r: Option<&str>| -> Result<Strategy> {
            r.ok_or_else(|| Error::parse(s, "missing partition strategy"))?
                .parse()
        };
        match (head, rest) {
            ("vqe", None) => Ok(Method::Vqe),
            ("ll", None) => Ok(Method::Layerwise),
            ("lvqe", None) => Ok(Method::LayerVqe),
            ("qaoa", Some(p)) => Ok(Method::Qaoa(parse_depth(s, p)?)),
            ("sha", r) => Ok(Method::Sha(strategy(r)?)),
            ("sha+ll", r) => Ok(Method::ShaLayerwise(strategy(r)?)),
            ("sha+lvqe", r) => Ok(Method::ShaLayerVqe(strategy(r)?)),
            ("sha+qaoa", Some(r)) => {
                let (strat, p) = r
                    .rsplit_once(':')
                    .ok_or_else(|| Error::parse(s, "expected sha+qaoa:<strategy>:<p>"))?;
                Ok(Method::ShaQaoa(strat.parse()?, parse_depth(s, p)?))
            }
            _ => Err(Error::parse(s, "unknown training method")),
        }
    }
}

/// One optimization stage of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub label: String,
    /// Terms in the stage Hamiltonian.
    pub n_terms: usize,
    pub trainable: usize,
    pub budget: usize,
    pub progress_threshold: f64,
    pub iterations: usize,
    pub stop: StopReason,
    pub params_in: Vec<f64>,
    pub params_out: Vec<f64>,
}

/// Everything a training run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub instance: String,
    #[serde(default)]
    pub ansatz: Option<String>,
    pub seed: u64,
    pub kind: ProblemKind,
    pub n_qubits: usize,
    /// `(global iteration, stage loss)` for every evaluation.
    pub loss_trace: Vec<(usize, f64)>,
    pub snapshots: Vec<MetricSnapshot>,
    pub stages: Vec<StageRecord>,
    pub final_params: Vec<f64>,
    pub total_iterations: usize,
    /// Exact expectation of the training objective at `final_params`.
    pub final_expectation: f64,
    /// Exact probability of measuring a solution at `final_params`.
    pub final_accuracy: f64,
    /// Maximum cut of the instance (Max-Cut only), so gaps can be computed
    /// from the record alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum_cut: Option<usize>,
}

impl RunRecord {
    /// Expected cut at the final parameters (Max-Cut only).
    pub fn final_expected_cut(&self) -> Option<f64> {
        match self.kind {
            ProblemKind::MaxCut => Some(-self.final_expectation / 2.0),
            ProblemKind::Coloring { .. } => None,
        }
    }
}

/// Splits `total` evenly over `stages`, remainder to the last stage.
pub fn stage_budgets(total: usize, stages: usize) -> Vec<usize> {
    if stages == 0 {
        return Vec::new();
    }
    let mut b = alloc::vec![total / stages; stages];
    b[stages - 1] += total % stages;
    b
}

struct Run<'a> {
    instance: &'a ProblemInstance,
    oracle: OracleReport,
    cfg: &'a TrainConfig,
    seed: u64,
    budgets: Vec<usize>,
    evals: usize,
    loss_trace: Vec<(usize, f64)>,
    snapshots: Vec<MetricSnapshot>,
    stages: Vec<StageRecord>,
}

struct Stage<'c> {
    label: String,
    circuit: &'c ParamCircuit,
    hamiltonian: DiagonalHamiltonian,
    n_terms: usize,
    trainable: Vec<usize>,
    full: bool,
}

impl<'a> Run<'a> {
    fn new(instance: &'a ProblemInstance, cfg: &'a TrainConfig, seed: u64, n_stages: usize) -> Result<Self> {
        cfg.validate()?;
        Ok(Run {
            instance,
            oracle: brute_force_oracle(instance)?,
            cfg,
            seed,
            budgets: stage_budgets(cfg.optimizer.max_iterations, n_stages),
            evals: 0,
            loss_trace: Vec::new(),
            snapshots: Vec::new(),
            stages: Vec::new(),
        })
    }

    fn check_circuit(&self, c: &ParamCircuit) -> Result<()> {
        if c.n_qubits() != self.instance.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: self.instance.n_qubits(),
                actual: c.n_qubits(),
            });
        }
        Ok(())
    }

    fn partial(&self, terms: &[usize]) -> Result<DiagonalHamiltonian> {
        self.instance.objective().partial_hamiltonian(terms)
    }

    /// Runs one stage from `params` and returns the parameters it settled on.
    fn stage(&mut self, st: Stage<'_>, params: &[f64]) -> Result<Vec<f64>> {
        self.check_circuit(st.circuit)?;
        if params.len() != st.circuit.n_params() {
            return Err(Error::LengthMismatch {
                expected: st.circuit.n_params(),
                actual: params.len(),
            });
        }
        let budget = self.budgets.get(self.stages.len()).copied().unwrap_or(0);
        let threshold = if st.full {
            self.cfg.optimizer.progress_threshold
        } else {
            self.cfg.partial_progress_threshold
        };
        let opt = self
            .cfg
            .optimizer
            .with_budget(budget)
            .with_progress_threshold(threshold);

        let (shots, seed, start) = (self.cfg.shots, self.seed, self.evals);
        let h = &st.hamiltonian;
        let mut full = params.to_vec();
        let mut shot_trace: Vec<Counts> = Vec::new();
        let mut failure: Option<Error> = None;
        let mut objective = |x: &[f64]| -> f64 {
            for (&slot, &v) in st.trainable.iter().zip(x) {
                full[slot] = v;
            }
            let eval = run_circuit(st.circuit, &full, None).and_then(|state| {
                let stream = (start + shot_trace.len()) as u64;
                let counts = sample_with(&state, shots, &mut shot_rng(seed, stream));
                let loss = h.expectation_from_counts(&counts)?;
                shot_trace.push(counts);
                Ok(loss)
            });
            eval.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::INFINITY
            })
        };

        let x0: Vec<f64> = st.trainable.iter().map(|&i| params[i]).collect();
        let result = if budget == 0 {
            StageResult {
                params_out: x0.clone(),
                best_loss: None,
                iterations_used: 0,
                loss_trace: Vec::new(),
                shot_trace: Vec::new(),
                stop: StopReason::Budget,
            }
        } else if h.is_constant() || x0.is_empty() {
            let loss = objective(&x0);
            StageResult {
                params_out: x0.clone(),
                best_loss: Some(loss),
                iterations_used: 1,
                loss_trace: alloc::vec![(0, loss)],
                shot_trace: Vec::new(),
                stop: StopReason::Trivial,
            }
        } else {
            minimize(&mut objective, &x0, &opt)
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let result = StageResult {
            shot_trace,
            ..result
        };

        for ((it, loss), counts) in result.loss_trace.iter().zip(&result.shot_trace) {
            let global = start + it;
            self.loss_trace.push((global, *loss));
            self.snapshots.push(MetricSnapshot::from_counts(
                global,
                *loss,
                counts,
                self.instance,
                &self.oracle,
            )?);
        }
        self.evals += result.iterations_used;

        let mut out = params.to_vec();
        for (&slot, &v) in st.trainable.iter().zip(&result.params_out) {
            out[slot] = v;
        }
        log::debug!(
            "stage {} ({} terms): {} evaluations, stop {:?}",
            st.label,
            st.n_terms,
            result.iterations_used,
            result.stop
        );
        self.stages.push(StageRecord {
            label: st.label,
            n_terms: st.n_terms,
            trainable: st.trainable.len(),
            budget,
            progress_threshold: threshold,
            iterations: result.iterations_used,
            stop: result.stop,
            params_in: params.to_vec(),
            params_out: out.clone(),
        });
        Ok(out)
    }

    fn finish(self, method: &str, circuit: &ParamCircuit, params: Vec<f64>) -> Result<RunRecord> {
        let state = run_circuit(circuit, &params, None)?;
        let final_expectation = self.instance.objective().expectation_exact(state.amplitudes())?;
        let probs = state.probabilities();
        let final_accuracy = self
            .oracle
            .optimizer_args
            .iter()
            .filter(|b| self.oracle.is_solution(b.index()))
            .map(|b| probs[b.index()])
            .sum::<f64>()
            .min(1.0);
        Ok(RunRecord {
            method: method.to_string(),
            instance: self.instance.id.clone(),
            ansatz: None,
            seed: self.seed,
            kind: self.instance.kind(),
            n_qubits: self.instance.n_qubits(),
            loss_trace: self.loss_trace,
            snapshots: self.snapshots,
            stages: self.stages,
            final_params: params,
            total_iterations: self.evals,
            final_expectation,
            final_accuracy,
            optimum_cut: self.oracle.optimum_cut(),
        })
    }
}

fn all_slots(c: &ParamCircuit) -> Vec<usize> {
    (0..c.n_params()).collect()
}

fn check_schedule(instance: &ProblemInstance, schedule: &PartitionSchedule) -> Result<()> {
    if schedule.n_terms() != instance.n_terms() || schedule.n_stages() == 0 {
        return Err(Error::InvalidSchedule(alloc::format!(
            "schedule over {} terms does not fit an instance with {} terms",
            schedule.n_terms(),
            instance.n_terms()
        )));
    }
    Ok(())
}

fn check_identity(t: &AnsatzTemplate) -> Result<()> {
    if !t.identity_at_zero {
        return Err(Error::NotIdentityAtZero(t.id.clone()));
    }
    Ok(())
}

/// Trains every parameter of `ansatz` from zero on the full objective.
pub fn train_vqe(
    instance: &ProblemInstance,
    ansatz: &ParamCircuit,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    let mut run = Run::new(instance, cfg, seed, 1)?;
    run.check_circuit(ansatz)?;
    let params = run.stage(
        Stage {
            label: "full".into(),
            circuit: ansatz,
            hamiltonian: instance.objective().clone(),
            n_terms: instance.n_terms(),
            trainable: all_slots(ansatz),
            full: true,
        },
        &alloc::vec![0.0; ansatz.n_params()],
    )?;
    run.finish("vqe", ansatz, params)
}

/// Sequential Hamiltonian assembly: stage `k` trains every parameter on the
/// cumulative partial objective `S_k`, starting where stage `k - 1` ended.
pub fn train_sha(
    instance: &ProblemInstance,
    ansatz: &ParamCircuit,
    schedule: &PartitionSchedule,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    check_schedule(instance, schedule)?;
    let mut run = Run::new(instance, cfg, seed, schedule.n_stages())?;
    run.check_circuit(ansatz)?;
    let mut params = alloc::vec![0.0; ansatz.n_params()];
    params = sha_stages(&mut run, ansatz, schedule, &all_slots(ansatz), "", params)?;
    run.finish("sha", ansatz, params)
}

fn sha_stages(
    run: &mut Run<'_>,
    circuit: &ParamCircuit,
    schedule: &PartitionSchedule,
    trainable: &[usize],
    prefix: &str,
    mut params: Vec<f64>,
) -> Result<Vec<f64>> {
    let m = schedule.n_stages();
    for (k, terms) in schedule.cumulative().iter().enumerate() {
        params = run.stage(
            Stage {
                label: alloc::format!("{prefix}S{}", k + 1),
                circuit,
                hamiltonian: run.partial(terms)?,
                n_terms: terms.len(),
                trainable: trainable.to_vec(),
                full: k + 1 == m,
            },
            &params,
        )?;
    }
    Ok(params)
}

fn grow(params: &[f64], circuit: &ParamCircuit) -> Vec<f64> {
    let mut p = params.to_vec();
    p.resize(circuit.n_params(), 0.0);
    p
}

/// Layerwise learning: grow the circuit one layer at a time training only
/// the newest layer, then train the full circuit once.
pub fn train_layerwise(
    instance: &ProblemInstance,
    template: &AnsatzTemplate,
    layers: usize,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    layered(instance, template, layers, None, seed, cfg, Growth::Layerwise)
}

/// Layer-VQE: an initial RY layer, then layers added one at a time with all
/// parameters trained after each addition.
pub fn train_layer_vqe(
    instance: &ProblemInstance,
    template: &AnsatzTemplate,
    layers: usize,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    layered(instance, template, layers, None, seed, cfg, Growth::LayerVqe)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Growth {
    Layerwise,
    LayerVqe,
}

fn layered(
    instance: &ProblemInstance,
    template: &AnsatzTemplate,
    layers: usize,
    schedule: Option<&PartitionSchedule>,
    seed: u64,
    cfg: &TrainConfig,
    growth: Growth,
) -> Result<RunRecord> {
    check_identity(template)?;
    if layers == 0 {
        return Err(Error::InvalidArgument("at least one layer is required".into()));
    }
    if let Some(s) = schedule {
        check_schedule(instance, s)?;
    }
    let n = instance.n_qubits();
    let per_growth = schedule.map_or(1, PartitionSchedule::n_stages);
    let phase2 = usize::from(growth == Growth::Layerwise);
    let mut run = Run::new(instance, cfg, seed, layers * per_growth + phase2)?;
    let build = |l: usize| -> Result<ParamCircuit> {
        let c = build_ansatz(template, n, l)?;
        match growth {
            Growth::Layerwise => Ok(c),
            Growth::LayerVqe => prepend_ry_layer(&c),
        }
    };

    let mut params = Vec::new();
    let mut circuit = build(1)?;
    for l in 1..=layers {
        if l > 1 {
            circuit = build(l)?;
        }
        params = grow(&params, &circuit);
        let trainable = match growth {
            // The newest template layer is the last block of slots.
            Growth::Layerwise => circuit.layer_params(circuit.n_layers() - 1),
            Growth::LayerVqe => all_slots(&circuit),
        };
        let label = alloc::format!("L{l}");
        params = match schedule {
            Some(s) => sha_stages(&mut run, &circuit, s, &trainable, &alloc::format!("{label}/"), params)?,
            None => run.stage(
                Stage {
                    label,
                    circuit: &circuit,
                    hamiltonian: instance.objective().clone(),
                    n_terms: instance.n_terms(),
                    trainable,
                    full: true,
                },
                &params,
            )?,
        };
    }
    if growth == Growth::Layerwise {
        params = run.stage(
            Stage {
                label: "full".into(),
                circuit: &circuit,
                hamiltonian: instance.objective().clone(),
                n_terms: instance.n_terms(),
                trainable: all_slots(&circuit),
                full: true,
            },
            &params,
        )?;
    }
    let method = match (growth, schedule.is_some()) {
        (Growth::Layerwise, false) => "ll",
        (Growth::LayerVqe, false) => "lvqe",
        (Growth::Layerwise, true) => "sha+ll",
        (Growth::LayerVqe, true) => "sha+lvqe",
    };
    let mut rec = run.finish(method, &circuit, params)?;
    rec.ansatz = Some(template.id.clone());
    Ok(rec)
}

/// QAOA of depth `p` on the training objective, all `2p` angles trained
/// from the linear ramp.
pub fn train_qaoa(instance: &ProblemInstance, p: usize, seed: u64, cfg: &TrainConfig) -> Result<RunRecord> {
    let circuit = qaoa_circuit(instance.objective(), p)?;
    let mut run = Run::new(instance, cfg, seed, 1)?;
    let params = run.stage(
        Stage {
            label: "full".into(),
            circuit: &circuit,
            hamiltonian: instance.objective().clone(),
            n_terms: instance.n_terms(),
            trainable: all_slots(&circuit),
            full: true,
        },
        &qaoa_initial_params(p)?,
    )?;
    run.finish("qaoa", &circuit, params)
}

/// Cumulative stage used by QAOA layer `layer` (1-based) of `p` when the
/// schedule has `m` stages: `ceil(layer * m / p)`, 1-based.
pub fn qaoa_stage_for_layer(layer: usize, p: usize, m: usize) -> usize {
    (layer * m).div_ceil(p)
}

/// The method a hybrid runs inside each SHA stage sequence.
#[derive(Clone, Copy, Debug)]
pub enum HybridBase<'a> {
    Layerwise { template: &'a AnsatzTemplate, layers: usize },
    LayerVqe { template: &'a AnsatzTemplate, layers: usize },
    Qaoa { p: usize },
}

/// SHA combined with a layer-growing method.
///
/// For layerwise learning and Layer-VQE every growth step runs the whole SHA
/// stage sequence. For QAOA, layer `l` of `p` uses the cost of stage
/// `S_ceil(l M / p)` and step `l` trains all angles so far against it.
pub fn train_sha_hybrid(
    base: HybridBase<'_>,
    instance: &ProblemInstance,
    schedule: &PartitionSchedule,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    match base {
        HybridBase::Layerwise { template, layers } => {
            layered(instance, template, layers, Some(schedule), seed, cfg, Growth::Layerwise)
        }
        HybridBase::LayerVqe { template, layers } => {
            layered(instance, template, layers, Some(schedule), seed, cfg, Growth::LayerVqe)
        }
        HybridBase::Qaoa { p } => train_sha_qaoa(instance, schedule, p, seed, cfg),
    }
}

fn train_sha_qaoa(
    instance: &ProblemInstance,
    schedule: &PartitionSchedule,
    p: usize,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    check_schedule(instance, schedule)?;
    let init = qaoa_initial_params(p)?;
    let m = schedule.n_stages();
    let mut run = Run::new(instance, cfg, seed, p)?;
    let costs = schedule
        .cumulative()
        .iter()
        .map(|s| run.partial(s))
        .collect::<Result<Vec<_>>>()?;
    let stage_of = |l: usize| qaoa_stage_for_layer(l, p, m);

    let mut params: Vec<f64> = Vec::new();
    let mut circuit = None;
    for l in 1..=p {
        let layer_costs: Vec<&DiagonalHamiltonian> = (1..=l).map(|j| &costs[stage_of(j) - 1]).collect();
        let c = qaoa_circuit_layers(&layer_costs)?;
        params.extend_from_slice(&init[2 * (l - 1)..2 * l]);
        let k = stage_of(l);
        params = run.stage(
            Stage {
                label: alloc::format!("p{l}/S{k}"),
                circuit: &c,
                hamiltonian: costs[k - 1].clone(),
                n_terms: schedule.cumulative()[k - 1].len(),
                trainable: all_slots(&c),
                full: k == m,
            },
            &params,
        )?;
        circuit = Some(c);
    }
    let circuit = circuit.expect("p >= 1");
    run.finish("sha+qaoa", &circuit, params)
}

/// Runs `method` with `template` (ignored by the QAOA methods) and fills in
/// the record's identifiers. Random and k-means schedules use `seed`.
pub fn train(
    method: &Method,
    instance: &ProblemInstance,
    template: Option<&AnsatzTemplate>,
    layers: usize,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunRecord> {
    let need_template = || {
        template.ok_or_else(|| {
            Error::InvalidArgument(alloc::format!("method {method} needs an ansatz template"))
        })
    };
    let schedule = match method.strategy() {
        Some(s) => Some(s.schedule(instance, seed)?),
        None => None,
    };
    let schedule = || schedule.as_ref().expect("strategy methods carry a schedule");
    let mut rec = match *method {
        Method::Vqe => {
            let c = build_ansatz(need_template()?, instance.n_qubits(), layers)?;
            train_vqe(instance, &c, seed, cfg)?
        }
        Method::Sha(_) => {
            let c = build_ansatz(need_template()?, instance.n_qubits(), layers)?;
            train_sha(instance, &c, schedule(), seed, cfg)?
        }
        Method::Layerwise => train_layerwise(instance, need_template()?, layers, seed, cfg)?,
        Method::LayerVqe => train_layer_vqe(instance, need_template()?, layers, seed, cfg)?,
        Method::Qaoa(p) => train_qaoa(instance, p, seed, cfg)?,
        Method::ShaLayerwise(_) => {
            let base = HybridBase::Layerwise { template: need_template()?, layers };
            train_sha_hybrid(base, instance, schedule(), seed, cfg)?
        }
        Method::ShaLayerVqe(_) => {
            let base = HybridBase::LayerVqe { template: need_template()?, layers };
            train_sha_hybrid(base, instance, schedule(), seed, cfg)?
        }
        Method::ShaQaoa(_, p) => train_sha_hybrid(HybridBase::Qaoa { p }, instance, schedule(), seed, cfg)?,
    };
    rec.method = method.to_string();
    rec.ansatz = if method.uses_ansatz() {
        template.map(|t| t.id.clone())
    } else {
        None
    };
    Ok(rec)
}
