//! Flat per-run table, per-method aggregates and tidy per-figure tables,
//! all computed from run records alone.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Serialize};
use sha_core::metrics::{most_likely_accuracy, record_energy_gap};
use sha_core::training::{Method, RunRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub instance: String,
    pub ansatz: String,
    pub seed: u64,
    pub final_accuracy: f64,
    pub most_likely_accuracy: f64,
    pub total_iterations: usize,
    pub energy_gap: Option<f64>,
}

impl SummaryRow {
    pub fn from_record(rec: &RunRecord, window: f64) -> Result<Self> {
        Ok(SummaryRow {
            method: rec.method.clone(),
            instance: rec.instance.clone(),
            ansatz: rec.ansatz.clone().unwrap_or_default(),
            seed: rec.seed,
            final_accuracy: rec.final_accuracy,
            most_likely_accuracy: most_likely_accuracy(rec, window)?,
            total_iterations: rec.total_iterations,
            energy_gap: match rec.optimum_cut {
                Some(_) => Some(record_energy_gap(rec, window)?),
                None => None,
            },
        })
    }
}

pub fn rows(records: &[RunRecord], window: f64) -> Result<Vec<SummaryRow>> {
    records.iter().map(|r| SummaryRow::from_record(r, window)).collect()
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 0 { (v[mid - 1] + v[mid]) / 2.0 } else { v[mid] })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub mean_final_accuracy: f64,
    pub median_final_accuracy: f64,
    pub mean_most_likely_accuracy: f64,
    pub median_most_likely_accuracy: f64,
    pub mean_total_iterations: f64,
    pub median_total_iterations: f64,
    pub mean_energy_gap: Option<f64>,
    pub median_energy_gap: Option<f64>,
}

/// Aggregates per method, in order of first appearance.
pub fn by_method(rows: &[SummaryRow]) -> Vec<MethodSummary> {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    methods
        .into_iter()
        .map(|m| {
            let sel: Vec<&SummaryRow> = rows.iter().filter(|r| r.method == m).collect();
            let col = |f: &dyn Fn(&SummaryRow) -> Option<f64>| -> Vec<f64> {
                sel.iter().filter_map(|r| f(r)).collect()
            };
            let acc = col(&|r| Some(r.final_accuracy));
            let ml = col(&|r| Some(r.most_likely_accuracy));
            let its = col(&|r| Some(r.total_iterations as f64));
            let gap = col(&|r| r.energy_gap);
            MethodSummary {
                method: m.to_string(),
                runs: sel.len(),
                mean_final_accuracy: mean(&acc).unwrap_or(f64::NAN),
                median_final_accuracy: median(&acc).unwrap_or(f64::NAN),
                mean_most_likely_accuracy: mean(&ml).unwrap_or(f64::NAN),
                median_most_likely_accuracy: median(&ml).unwrap_or(f64::NAN),
                mean_total_iterations: mean(&its).unwrap_or(f64::NAN),
                median_total_iterations: median(&its).unwrap_or(f64::NAN),
                mean_energy_gap: mean(&gap),
                median_energy_gap: median(&gap),
            }
        })
        .collect()
}

/// One observation in long format.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TidyRow<'a> {
    pub method: &'a str,
    pub instance: &'a str,
    pub ansatz: &'a str,
    pub seed: u64,
    pub metric: &'static str,
    pub value: f64,
}

type Metric = (&'static str, fn(&SummaryRow) -> Option<f64>);

const ACCURACY: [Metric; 2] = [
    ("final_accuracy", |r| Some(r.final_accuracy)),
    ("most_likely_accuracy", |r| Some(r.most_likely_accuracy)),
];
const ITERATIONS: [Metric; 1] = [("total_iterations", |r| Some(r.total_iterations as f64))];
const GAP: [Metric; 1] = [("energy_gap", |r| r.energy_gap)];

struct Table {
    file: &'static str,
    keep: fn(&Method) -> bool,
    metrics: &'static [Metric],
}

const TABLES: [Table; 6] = [
    Table {
        file: "strategies.csv",
        keep: |m| matches!(m, Method::Sha(_)),
        metrics: &ACCURACY,
    },
    Table {
        file: "accuracy.csv",
        keep: |m| matches!(m, Method::Vqe | Method::Sha(_) | Method::Layerwise | Method::LayerVqe | Method::Qaoa(_)),
        metrics: &ACCURACY,
    },
    Table {
        file: "hybrids.csv",
        keep: |m| {
            matches!(
                m,
                Method::Vqe | Method::Sha(_) | Method::Layerwise | Method::LayerVqe | Method::ShaLayerwise(_) | Method::ShaLayerVqe(_)
            )
        },
        metrics: &ACCURACY,
    },
    Table {
        file: "qaoa_hybrids.csv",
        keep: |m| matches!(m, Method::Qaoa(_) | Method::ShaQaoa(..)),
        metrics: &ACCURACY,
    },
    Table {
        file: "iterations.csv",
        keep: |_| true,
        metrics: &ITERATIONS,
    },
    Table {
        file: "energy_gap.csv",
        keep: |_| true,
        metrics: &GAP,
    },
];

fn tidy<'a>(rows: &'a [SummaryRow], table: &Table) -> Vec<TidyRow<'a>> {
    let mut out = Vec::new();
    for r in rows {
        let Ok(m) = r.method.parse::<Method>() else { continue };
        if !(table.keep)(&m) {
            continue;
        }
        for (name, f) in table.metrics {
            if let Some(value) = f(r) {
                out.push(TidyRow {
                    method: &r.method,
                    instance: &r.instance,
                    ansatz: &r.ansatz,
                    seed: r.seed,
                    metric: name,
                    value,
                });
            }
        }
    }
    out
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    crate::store::write_atomic(path, &bytes)
}

#[derive(Serialize)]
struct TraceRow<'a> {
    method: &'a str,
    instance: &'a str,
    ansatz: &'a str,
    seed: u64,
    iteration: usize,
    loss: f64,
    overall_accuracy: f64,
}

/// Writes `summary.csv`, `methods.csv`, the per-figure tables and
/// `traces.csv` into `out`. Returns the paths written.
pub fn write_all(records: &[RunRecord], window: f64, out: &Path) -> Result<Vec<PathBuf>> {
    let rows = rows(records, window)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = out.join(name);
        f(&p)?;
        written.push(p);
        Ok(())
    };
    emit("summary.csv", &|p| write_csv(p, &rows))?;
    emit("methods.csv", &|p| write_csv(p, &by_method(&rows)))?;
    for t in &TABLES {
        emit(t.file, &|p| write_csv(p, &tidy(&rows, t)))?;
    }
    emit("traces.csv", &|p| {
        let trace: Vec<TraceRow> = records
            .iter()
            .flat_map(|r| {
                r.snapshots.iter().map(move |s| TraceRow {
                    method: &r.method,
                    instance: &r.instance,
                    ansatz: r.ansatz.as_deref().unwrap_or(""),
                    seed: r.seed,
                    iteration: s.iteration,
                    loss: s.loss,
                    overall_accuracy: s.overall_accuracy,
                })
            })
            .collect();
        write_csv(p, &trace)
    })?;
    Ok(written)
}
