//! Derivative-free minimization with linear models on a simplex.
//!
//! This is the unconstrained core of Powell's COBYLA: the objective is
//! interpolated linearly on `d + 1` points, the model is minimized inside a
//! trust region of radius `rho`, and `rho` only ever shrinks. Steps that
//! repair a degenerate simplex alternate with trust-region steps.
//!
//! One objective evaluation is one iteration.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bits::Counts;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Evaluation budget.
    pub max_iterations: usize,
    /// Starting trust radius `rho_beg`.
    pub initial_trust_radius: f64,
    /// Stop once the trust radius drops below this (`rho_end`).
    pub final_tolerance: f64,
    /// Stop when the best loss improved by less than this over the last
    /// `progress_window` evaluations. Zero disables the rule.
    pub progress_threshold: f64,
    pub progress_window: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 4000,
            initial_trust_radius: 1.0,
            final_tolerance: 1e-4,
            progress_threshold: 1e-6,
            progress_window: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.initial_trust_radius > 0.0 && self.final_tolerance > 0.0) {
            return Err(Error::InvalidArgument("trust radii must be positive".into()));
        }
        if !(self.progress_threshold >= 0.0) || self.progress_window == 0 {
            return Err(Error::InvalidArgument(
                "progress threshold must be >= 0 with a non-empty window".into(),
            ));
        }
        Ok(())
    }

    pub fn with_budget(&self, max_iterations: usize) -> Self {
        OptimizerConfig {
            max_iterations,
            ..self.clone()
        }
    }

    pub fn with_progress_threshold(&self, progress_threshold: f64) -> Self {
        OptimizerConfig {
            progress_threshold,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Evaluation budget used up.
    Budget,
    /// Trust radius fell below `final_tolerance`.
    TrustRadius,
    /// Best loss stalled over the progress window.
    Progress,
    /// Nothing to optimize (no parameters, no budget or a constant objective).
    Trivial,
}

/// Outcome of one optimization stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    /// Best point evaluated.
    pub params_out: Vec<f64>,
    pub best_loss: Option<f64>,
    pub iterations_used: usize,
    /// `(iteration, loss)` for every evaluation, iterations counted from 0
    /// within the stage.
    pub loss_trace: Vec<(usize, f64)>,
    /// Sampled counts behind each evaluation, when the objective is shot
    /// based. Filled in by the training layer.
    pub shot_trace: Vec<Counts>,
    pub stop: StopReason,
}

impl StageResult {
    fn trivial(x0: &[f64]) -> Self {
        StageResult {
            params_out: x0.to_vec(),
            best_loss: None,
            iterations_used: 0,
            loss_trace: Vec::new(),
            shot_trace: Vec::new(),
            stop: StopReason::Trivial,
        }
    }
}

// Trust step counts as failed below this actual/predicted ratio.
const RATIO_ACCEPT: f64 = 0.1;
// A vertex farther than this many radii from the base is replaced.
const MAX_EDGE: f64 = 1.1;
// A vertex closer than this many radii to its opposite face is replaced.
const MIN_HEIGHT: f64 = 0.25;
// Length of a geometry-repair step, in radii.
const REPAIR_STEP: f64 = 0.5;

struct Evaluator<'a, F> {
    f: F,
    cfg: &'a OptimizerConfig,
    dim: usize,
    trace: Vec<(usize, f64)>,
    best: Vec<f64>,
    stop: Option<StopReason>,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.stop.is_some() {
            return None;
        }
        let v = (self.f)(x);
        let n = self.trace.len();
        self.trace.push((n, v));
        let best = self.best.last().map_or(v, |&b| if v < b { v } else { b });
        self.best.push(best);

        let count = n + 1;
        let w = self.cfg.progress_window;
        if count >= self.cfg.max_iterations {
            self.stop = Some(StopReason::Budget);
        } else if self.cfg.progress_threshold > 0.0 && count >= self.dim + 1 + w {
            let improvement = self.best[count - 1 - w] - self.best[count - 1];
            if improvement < self.cfg.progress_threshold {
                self.stop = Some(StopReason::Progress);
            }
        }
        Some(v)
    }
}

struct Simplex {
    base: Vec<f64>,
    f_base: f64,
    /// Vertex `j` sits at `base + dirs[j]`.
    dirs: Vec<Vec<f64>>,
    f_dirs: Vec<f64>,
}

impl Simplex {
    /// Makes vertex `j` the base if it is better.
    fn pivot(&mut self, j: usize) {
        if self.f_dirs[j] >= self.f_base {
            return;
        }
        let dj = self.dirs[j].clone();
        for (b, d) in self.base.iter_mut().zip(&dj) {
            *b += d;
        }
        for (i, dir) in self.dirs.iter_mut().enumerate() {
            if i == j {
                dir.iter_mut().for_each(|x| *x = -*x);
            } else {
                dir.iter_mut().zip(&dj).for_each(|(x, d)| *x -= d);
            }
        }
        core::mem::swap(&mut self.f_base, &mut self.f_dirs[j]);
    }

    fn point(&self, step: &[f64]) -> Vec<f64> {
        self.base.iter().zip(step).map(|(b, s)| b + s).collect()
    }
}

/// Minimizes `f` from `x0`.
///
/// Stops on the evaluation budget, when the trust radius drops below
/// `final_tolerance`, or when the best loss improved by less than
/// `progress_threshold` over the last `progress_window` evaluations (checked
/// once the initial simplex is complete). Deterministic for deterministic
/// `f`.
pub fn minimize<F>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> StageResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    if d == 0 || cfg.max_iterations == 0 {
        return StageResult::trivial(x0);
    }
    let mut ev = Evaluator {
        f,
        cfg,
        dim: d,
        trace: Vec::new(),
        best: Vec::new(),
        stop: None,
    };
    let mut rho = cfg.initial_trust_radius;

    let f0 = ev.eval(x0).expect("budget is at least one evaluation");
    let mut sx = Simplex {
        base: x0.to_vec(),
        f_base: f0,
        dirs: Vec::with_capacity(d),
        f_dirs: Vec::with_capacity(d),
    };
    if !build_simplex(&mut sx, &mut ev, rho) {
        return finish(sx, ev);
    }

    while ev.stop.is_none() {
        let Some(inv) = invert(&sx.dirs) else {
            if !rebuild(&mut sx, &mut ev, rho) {
                break;
            }
            continue;
        };
        // Linear model gradient: dirs * g = f_dirs - f_base.
        let df: Vec<f64> = sx.f_dirs.iter().map(|fj| fj - sx.f_base).collect();
        let g: Vec<f64> = (0..d).map(|i| dot(&inv[i], &df)).collect();

        if let Some(j) = worst_vertex(&sx, &inv, rho) {
            // Column j of inv is orthogonal to every other edge.
            let mut step: Vec<f64> = (0..d).map(|i| inv[i][j]).collect();
            let len = norm(&step);
            let mut scale = REPAIR_STEP * rho / len;
            if dot(&g, &step) > 0.0 {
                scale = -scale;
            }
            step.iter_mut().for_each(|x| *x *= scale);
            let Some(fv) = ev.eval(&sx.point(&step)) else { break };
            sx.dirs[j] = step;
            sx.f_dirs[j] = fv;
            sx.pivot(j);
            continue;
        }

        let gnorm = norm(&g);
        if gnorm == 0.0 || !gnorm.is_finite() {
            rho *= 0.5;
            if rho < cfg.final_tolerance {
                ev.stop = Some(StopReason::TrustRadius);
            }
            continue;
        }
        let step: Vec<f64> = g.iter().map(|gi| -rho * gi / gnorm).collect();
        let Some(ft) = ev.eval(&sx.point(&step)) else { break };
        let ratio = (sx.f_base - ft) / (rho * gnorm);

        // Replace the vertex whose removal keeps the simplex fattest.
        let mut pick = None;
        let mut best_score = 0.0;
        for j in 0..d {
            let lambda = (0..d).map(|i| inv[i][j] * step[i]).sum::<f64>();
            let dist = norm(&sx.dirs[j]) / rho;
            let score = libm::fabs(lambda) * if dist > 1.0 { dist * dist } else { 1.0 };
            if score > best_score {
                best_score = score;
                pick = Some(j);
            }
        }
        if let Some(j) = pick {
            sx.dirs[j] = step;
            sx.f_dirs[j] = ft;
            sx.pivot(j);
        }
        if !(ratio > RATIO_ACCEPT) {
            rho *= 0.5;
            if rho < cfg.final_tolerance {
                ev.stop.get_or_insert(StopReason::TrustRadius);
            }
        }
    }
    finish(sx, ev)
}

fn finish<F>(sx: Simplex, ev: Evaluator<'_, F>) -> StageResult {
    StageResult {
        params_out: sx.base,
        best_loss: Some(sx.f_base),
        iterations_used: ev.trace.len(),
        loss_trace: ev.trace,
        shot_trace: Vec::new(),
        stop: ev.stop.unwrap_or(StopReason::TrustRadius),
    }
}

/// Coordinate simplex of radius `rho` around the base. Returns false when
/// the budget ran out.
fn build_simplex<F: FnMut(&[f64]) -> f64>(
    sx: &mut Simplex,
    ev: &mut Evaluator<'_, F>,
    rho: f64,
) -> bool {
    let d = sx.base.len();
    for j in 0..d {
        let mut dir = alloc::vec![0.0; d];
        dir[j] = rho;
        let Some(fv) = ev.eval(&sx.point(&dir)) else {
            return false;
        };
        sx.dirs.push(dir);
        sx.f_dirs.push(fv);
        sx.pivot(j);
    }
    true
}

fn rebuild<F: FnMut(&[f64]) -> f64>(
    sx: &mut Simplex,
    ev: &mut Evaluator<'_, F>,
    rho: f64,
) -> bool {
    sx.dirs.clear();
    sx.f_dirs.clear();
    build_simplex(sx, ev, rho)
}

/// The vertex most in need of replacement: the farthest one beyond
/// `MAX_EDGE * rho`, else the flattest one below `MIN_HEIGHT * rho`.
fn worst_vertex(sx: &Simplex, inv: &[Vec<f64>], rho: f64) -> Option<usize> {
    let d = sx.dirs.len();
    let (far_j, far) = (0..d)
        .map(|j| (j, norm(&sx.dirs[j])))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if far > MAX_EDGE * rho {
        return Some(far_j);
    }
    let mut flat = None;
    let mut lowest = MIN_HEIGHT * rho;
    for j in 0..d {
        let col = libm::sqrt((0..d).map(|i| inv[i][j] * inv[i][j]).sum::<f64>());
        let height = 1.0 / col;
        if height < lowest {
            lowest = height;
            flat = Some(j);
        }
    }
    flat
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Inverse of the matrix whose rows are `rows`, by Gauss-Jordan elimination
/// with partial pivoting. `None` when (numerically) singular.
fn invert(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = alloc::vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &x| m.max(libm::fabs(x)));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))
            .expect("non-empty range");
        if libm::fabs(a[piv][col]) <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for k in 0..n {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                if factor != 0.0 {
                    for k in 0..n {
                        a[r][k] -= factor * a[col][k];
                        inv[r][k] -= factor * inv[col][k];
                    }
                }
            }
        }
    }
    Some(inv)
}
