//! Per-evaluation metrics and the run-level summaries built from them.

use serde::{Deserialize, Serialize};

use crate::bits::{Bitstring, Counts};
use crate::error::{Error, Result};
use crate::instances::{OracleReport, ProblemInstance, ProblemKind};
use crate::training::RunRecord;

/// What the sampled counts of one objective evaluation looked like.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSnapshot {
    /// Global evaluation index within the run.
    pub iteration: usize,
    /// Fraction of shots on solution bitstrings.
    pub overall_accuracy: f64,
    /// Modal bitstring, ties broken towards the lexicographically smallest.
    pub most_likely: Bitstring,
    pub most_likely_valid: bool,
    /// Loss the optimizer saw (the stage objective estimated from the counts).
    pub loss: f64,
    /// Largest cut among the sampled bitstrings (Max-Cut only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_cut_found: Option<u32>,
}

impl MetricSnapshot {
    pub fn from_counts(
        iteration: usize,
        loss: f64,
        counts: &Counts,
        instance: &ProblemInstance,
        oracle: &OracleReport,
    ) -> Result<Self> {
        let overall_accuracy = overall_accuracy(counts, oracle, instance.kind())?;
        let most_likely = counts.most_likely().ok_or(Error::EmptyCounts)?;
        let best_cut_found = match instance.kind() {
            ProblemKind::MaxCut => counts
                .iter()
                .map(|(i, _)| instance.cut_of_index(i) as u32)
                .max(),
            ProblemKind::Coloring { .. } => None,
        };
        Ok(MetricSnapshot {
            iteration,
            overall_accuracy,
            most_likely_valid: oracle.is_solution(most_likely.index()),
            most_likely,
            loss,
            best_cut_found,
        })
    }
}

/// Fraction of shots that hit a solution: a proper coloring, or a maximum
/// cut.
pub fn overall_accuracy(counts: &Counts, oracle: &OracleReport, kind: ProblemKind) -> Result<f64> {
    if kind != oracle.kind {
        return Err(Error::WrongProblemKind {
            expected: kind_name(oracle.kind),
        });
    }
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let hits: u64 = counts
        .iter()
        .filter(|&(i, _)| oracle.is_solution(i))
        .map(|(_, c)| c)
        .sum();
    Ok(hits as f64 / total as f64)
}

fn kind_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::MaxCut => "maxcut",
        ProblemKind::Coloring { .. } => "coloring",
    }
}

/// Number of trailing evaluations covered by `fraction` of a run of `len`
/// evaluations: `ceil(fraction * len)`, at least one.
pub fn window_len(len: usize, fraction: f64) -> usize {
    let w = libm::ceil(fraction * len as f64) as usize;
    w.clamp(1, len.max(1))
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "window fraction {fraction} is outside (0, 1]"
        )));
    }
    Ok(())
}

/// Share of the trailing window whose modal bitstring is a solution.
/// Returns 0 for a run without snapshots.
pub fn most_likely_accuracy(record: &RunRecord, window_fraction: f64) -> Result<f64> {
    check_fraction(window_fraction)?;
    let snaps = &record.snapshots;
    if snaps.is_empty() {
        return Ok(0.0);
    }
    let w = window_len(snaps.len(), window_fraction);
    let hits = snaps[snaps.len() - w..]
        .iter()
        .filter(|s| s.most_likely_valid)
        .count();
    Ok(hits as f64 / w as f64)
}

/// Optimal cut minus the best cut sampled anywhere in the trailing window.
pub fn energy_gap(record: &RunRecord, oracle: &OracleReport, window_fraction: f64) -> Result<f64> {
    let optimum = oracle.optimum_cut().ok_or(Error::WrongProblemKind {
        expected: "maxcut",
    })?;
    gap_to(record, optimum, window_fraction)
}

/// [`energy_gap`] against the optimum stored in the record itself.
pub fn record_energy_gap(record: &RunRecord, window_fraction: f64) -> Result<f64> {
    let optimum = record.optimum_cut.ok_or(Error::WrongProblemKind {
        expected: "maxcut",
    })?;
    gap_to(record, optimum, window_fraction)
}

fn gap_to(record: &RunRecord, optimum: usize, window_fraction: f64) -> Result<f64> {
    check_fraction(window_fraction)?;
    if record.kind != ProblemKind::MaxCut {
        return Err(Error::WrongProblemKind { expected: "maxcut" });
    }
    let snaps = &record.snapshots;
    let w = window_len(snaps.len(), window_fraction);
    let best = snaps[snaps.len().saturating_sub(w)..]
        .iter()
        .filter_map(|s| s.best_cut_found)
        .max()
        .unwrap_or(0) as usize;
    Ok(optimum.saturating_sub(best) as f64)
}
