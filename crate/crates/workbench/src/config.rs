//! Experiment configuration, read from JSON.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha_core::ansatz::AnsatzTemplate;
use sha_core::graph::gnp_random_graph;
use sha_core::instances::{ProblemInstance, ProblemKind};
use sha_core::optimizer::OptimizerConfig;
use sha_core::training::{Method, TrainConfig};

use crate::{fixtures, graph_io};

/// Where the graphs of an experiment come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSpec {
    /// A shipped fixture by name, e.g. `graph_03`.
    Fixture(String),
    /// A graph file in the text edge-list format.
    File(PathBuf),
    /// `count` seeded G(n, p) graphs. Seeds are tried in order from
    /// `first_seed`; with `require_connected`, disconnected draws are skipped.
    Gnp {
        n: usize,
        p: f64,
        count: usize,
        #[serde(default)]
        first_seed: u64,
        #[serde(default)]
        require_connected: bool,
    },
}

// Give up on a G(n, p) spec after this many draws per requested graph.
const GNP_ATTEMPTS: u64 = 1000;

impl InstanceSpec {
    /// Resolves to named problem instances.
    pub fn resolve(&self, kind: ProblemKind) -> Result<Vec<ProblemInstance>> {
        match self {
            InstanceSpec::Fixture(name) => {
                let f = fixtures::by_name(name)?;
                Ok(vec![ProblemInstance::build(&f.graph, kind)?.with_id(name.clone())])
            }
            InstanceSpec::File(path) => {
                let g = graph_io::read_graph(path)?;
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                Ok(vec![ProblemInstance::build(&g, kind)?.with_id(id)])
            }
            InstanceSpec::Gnp { n, p, count, first_seed, require_connected } => {
                let mut out = Vec::with_capacity(*count);
                let mut seed = *first_seed;
                let limit = first_seed.saturating_add(GNP_ATTEMPTS * (*count as u64).max(1));
                while out.len() < *count {
                    if seed >= limit {
                        bail!("found only {} connected G({n}, {p}) graphs", out.len());
                    }
                    let g = gnp_random_graph(*n, *p, seed)?;
                    if !*require_connected || g.is_connected() {
                        let id = format!("gnp_n{n}_p{p}_s{seed}");
                        out.push(ProblemInstance::build(&g, kind)?.with_id(id));
                    }
                    seed += 1;
                }
                Ok(out)
            }
        }
    }
}

fn default_layers() -> usize {
    3
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_shots() -> u64 {
    200
}

fn default_partial_threshold() -> f64 {
    0.8
}

fn default_window() -> f64 {
    0.02
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    pub problem: ProblemKind,
    pub methods: Vec<Method>,
    /// Template ids; ignored by the QAOA methods.
    #[serde(default)]
    pub ansatze: Vec<String>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default = "default_partial_threshold")]
    pub partial_progress_threshold: f64,
    /// Trailing share of evaluations used by the windowed metrics.
    #[serde(default = "default_window")]
    pub metric_window: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Parallel cells; `None` defers to `SHA_WORKERS` or the core count.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            bail!("config lists no instances");
        }
        if self.methods.is_empty() {
            bail!("config lists no methods");
        }
        if self.seeds.is_empty() {
            bail!("config lists no seeds");
        }
        if self.layers == 0 {
            bail!("layers must be at least 1");
        }
        if self.methods.iter().any(Method::uses_ansatz) && self.ansatze.is_empty() {
            bail!("template-based methods need at least one ansatz");
        }
        for id in &self.ansatze {
            id.parse::<AnsatzTemplate>()?;
        }
        if !(self.metric_window > 0.0 && self.metric_window <= 1.0) {
            bail!("metric_window must be in (0, 1]");
        }
        self.train_config().validate()?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            optimizer: self.optimizer.clone(),
            shots: self.shots,
            partial_progress_threshold: self.partial_progress_threshold,
        }
    }

    pub fn templates(&self) -> Result<Vec<AnsatzTemplate>> {
        Ok(self
            .ansatze
            .iter()
            .map(|id| id.parse())
            .collect::<Result<_, _>>()?)
    }

    pub fn resolve_instances(&self) -> Result<Vec<ProblemInstance>> {
        let mut out = Vec::new();
        for spec in &self.instances {
            out.extend(spec.resolve(self.problem)?);
        }
        Ok(out)
    }
}
