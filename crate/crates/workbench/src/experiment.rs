//! Runs the instance x method x ansatz x seed matrix of an experiment.

use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha_core::ansatz::AnsatzTemplate;
use sha_core::instances::ProblemInstance;
use sha_core::training::{train, Method, RunRecord, TrainConfig};

use crate::config::ExperimentConfig;
use crate::{store, summary};

/// Environment variable consulted for the worker count when the config
/// does not set one.
pub const WORKERS_ENV: &str = "SHA_WORKERS";

/// One cell of the experiment matrix.
#[derive(Clone, Debug)]
pub struct Cell<'a> {
    pub instance: &'a ProblemInstance,
    pub method: Method,
    pub template: Option<&'a AnsatzTemplate>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub instance: String,
    pub method: String,
    pub ansatz: Option<String>,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    /// Completed runs, in matrix order.
    pub records: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn all_completed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Expands the matrix. Methods without a template get a single cell per
/// instance and seed.
pub fn cells<'a>(
    instances: &'a [ProblemInstance],
    methods: &[Method],
    templates: &'a [AnsatzTemplate],
    seeds: &[u64],
) -> Vec<Cell<'a>> {
    let mut out = Vec::new();
    for instance in instances {
        for &method in methods {
            let ts: Vec<Option<&AnsatzTemplate>> = if method.uses_ansatz() {
                templates.iter().map(Some).collect()
            } else {
                vec![None]
            };
            for template in ts {
                for &seed in seeds {
                    out.push(Cell { instance, method, template, seed });
                }
            }
        }
    }
    out
}

pub fn run_cell(cell: &Cell<'_>, layers: usize, cfg: &TrainConfig) -> Result<RunRecord> {
    Ok(train(&cell.method, cell.instance, cell.template, layers, cell.seed, cfg)?)
}

/// Worker count: explicit value, else `SHA_WORKERS`, else the core count.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

/// Runs every cell, persisting each record as it completes, then writes the
/// summary tables. A failing cell is logged and recorded; the rest go on.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let instances = cfg.resolve_instances()?;
    let templates = cfg.templates()?;
    let matrix = cells(&instances, &cfg.methods, &templates, &cfg.seeds);
    let train_cfg = cfg.train_config();
    let records_dir = cfg.output_dir.join(store::RECORDS_DIR);
    std::fs::create_dir_all(&records_dir)
        .with_context(|| format!("creating {}", records_dir.display()))?;
    store::write_json(&cfg.output_dir.join("config.json"), cfg)?;

    let workers = resolve_workers(cfg.workers);
    log::info!("running {} cells on {workers} worker(s)", matrix.len());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let results: Vec<Result<RunRecord>> = pool.install(|| {
        matrix
            .par_iter()
            .map(|cell| {
                let rec = run_cell(cell, cfg.layers, &train_cfg)?;
                let path = store::save_record(&records_dir, &rec)?;
                log::info!("{} ({} iterations)", path.display(), rec.total_iterations);
                Ok(rec)
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (cell, res) in matrix.iter().zip(results) {
        match res {
            Ok(r) => records.push(r),
            Err(e) => {
                log::error!("{} {} seed {}: {e:#}", cell.instance.id, cell.method, cell.seed);
                failures.push(CellFailure {
                    instance: cell.instance.id.clone(),
                    method: cell.method.to_string(),
                    ansatz: cell.template.map(|t| t.id.clone()),
                    seed: cell.seed,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    let failures_path = cfg.output_dir.join("failures.json");
    if failures.is_empty() {
        let _ = std::fs::remove_file(&failures_path);
    } else {
        store::write_json(&failures_path, &failures)?;
    }
    let files = summary::write_all(&records, cfg.metric_window, &cfg.output_dir)?;
    Ok(ExperimentOutcome { records, failures, files })
}
