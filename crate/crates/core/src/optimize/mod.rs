//! Search over metrics of total length 1 for the extremal values of the
//! Neumann eigenvalue `λ_j`, i.e. estimates of `sup λ_j·L²` and
//! `inf λ_j·L²` over all metrics on a fixed graph.
//!
//! Each run is a Nelder–Mead search in Helmert coordinates of the simplex
//! `{ℓ ≥ ε, Σℓ = 1}`, with every trial point projected back onto it. Run 0
//! starts at the equilateral metric, runs `1..=restarts` at seeded uniform
//! points. Each run is polished by restarting from its best point with a
//! smaller simplex while that still improves.

mod nelder_mead;
mod simplex;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{bound_value, BoundKind, BoundParams};
use crate::graph::random::simplex_point;
use crate::graph::{BoundarySpec, GraphError, MetricGraph};
use crate::output::{csv_line, fmt_f64};
use crate::spectral::compute_spectrum;

use simplex::Chart;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("no restart produced a finite objective")]
    NoConvergence,
    #[error("objective {objective} exceeds the {kind} bound {bound}")]
    BoundExceeded { objective: f64, bound: f64, kind: BoundKind },
    #[error("objective {objective} is below the lower bound pi^2")]
    BelowLowerBound { objective: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "max")]
    Maximize,
    #[serde(rename = "min")]
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub mode: Mode,
    /// Neumann index `j ≥ 1`.
    pub j: usize,
    /// Minimum edge length ε; needs `ε·m < 1`.
    pub floor: f64,
    /// Random starts besides the equilateral one.
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Relative spread of simplex values at which a run stops.
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { mode: Mode::Maximize, j: 1, floor: 1e-3, restarts: 8, max_iter: 2000, seed: 0, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub run: usize,
    pub start: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, best objective so far)`; iterations continue across
    /// polishing passes.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub mode: Mode,
    pub j: usize,
    /// Best `λ_j·L²`.
    pub objective: f64,
    /// Best metric (total length 1) keyed by edge id.
    pub metric: BTreeMap<String, f64>,
    /// The same lengths in edge order.
    pub lengths: Vec<f64>,
    /// Some edge sits at the floor.
    pub boundary: bool,
    /// Run that produced the best objective.
    pub best_run: usize,
    pub evaluations: usize,
    /// Candidate metrics whose spectrum could not be computed.
    pub rejected: usize,
    pub history: Vec<RunHistory>,
}

impl OptimizerResult {
    /// `run,iteration,objective`.
    pub fn history_csv(&self) -> String {
        let mut out = csv_line(["run", "iteration", "objective"]);
        out.push('\n');
        for h in &self.history {
            for &(it, v) in &h.trace {
                out.push_str(&csv_line([h.run.to_string(), it.to_string(), fmt_f64(v)]));
                out.push('\n');
            }
        }
        out
    }
}

/// `λ_j` of `g` with the given lengths, or `None` when the spectral solver
/// fails (the candidate is then rejected).
pub fn objective(g: &MetricGraph, lengths: &[f64], j: usize) -> Option<f64> {
    let h = g.with_lengths(lengths).ok()?;
    let scale = h.total_length();
    match compute_spectrum(&h, &BoundarySpec::neumann(), j, 1e-10) {
        Ok(s) => s.lambda(j).map(|l| l * scale * scale),
        Err(e) => {
            log::warn!("rejected metric {lengths:?}: {e}");
            None
        }
    }
}

/// Smallest closed-form upper bound on `Λ_j(G)` that applies to `g`.
pub fn tightest_upper_bound(g: &MetricGraph, j: usize) -> (BoundKind, f64) {
    let params = BoundParams::from_graph(g, &BoundarySpec::neumann(), j);
    let mut kinds = if g.is_tree() { vec![BoundKind::TreeSharp] } else { Vec::new() };
    kinds.push(BoundKind::NeumannGeneral);
    if g.pendant_count() == 0 {
        kinds.push(BoundKind::DirichletNoPendant);
    }
    if j == 1 {
        if !(g.edge_count() == 1 && g.has_loops()) {
            kinds.push(BoundKind::Kkmm);
        }
        if !g.has_loops() && g.pendant_count() == 0 && g.admits_induced_tree_of_order_n_minus_1() {
            kinds.push(BoundKind::InducedTreeGap);
        }
        if g.is_k4() {
            kinds.push(BoundKind::K4Gap);
        }
    }
    kinds
        .into_iter()
        .filter_map(|k| bound_value(k, &params).ok().map(|v| (k, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("the general bound always applies")
}

fn validate(g: &MetricGraph, cfg: &OptimizerConfig) -> Result<(), OptimizeError> {
    let bad = |m: String| Err(OptimizeError::InvalidConfig(m));
    if cfg.j == 0 {
        return bad("j must be at least 1".into());
    }
    if !(cfg.floor > 0.0 && cfg.floor * (g.edge_count() as f64) < 1.0) {
        return bad(format!("floor {} must be positive with floor * m < 1", cfg.floor));
    }
    if cfg.max_iter == 0 {
        return bad("max_iter must be positive".into());
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return bad(format!("tol {} must lie in (0, 1)", cfg.tol));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    Ok(())
}

struct Run {
    history: RunHistory,
    lengths: Vec<f64>,
    evaluations: usize,
    rejected: usize,
}

fn run_one(g: &MetricGraph, cfg: &OptimizerConfig, chart: &Chart, start: Vec<f64>, run: usize) -> Run {
    let sign = match cfg.mode {
        Mode::Maximize => -1.0,
        Mode::Minimize => 1.0,
    };
    let m = g.edge_count();
    let mut evaluations = 0;
    let mut rejected = 0;
    let mut f = |y: &DVector<f64>| {
        evaluations += 1;
        match objective(g, &chart.lengths(y), cfg.j) {
            Some(v) => sign * v,
            None => {
                rejected += 1;
                f64::INFINITY
            }
        }
    };
    let constrain = |y: DVector<f64>| chart.coords(&chart.lengths(&y));
    let mut y = chart.coords(&start);
    let mut step = 0.5 / m as f64;
    let mut best = f64::INFINITY;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for _pass in 0..6 {
        let budget = cfg.max_iter.saturating_sub(iterations);
        if budget == 0 {
            break;
        }
        let out = nelder_mead::minimize(&mut f, &constrain, y.clone(), step, cfg.tol, budget);
        trace.extend(out.trace.iter().map(|&(it, v)| (iterations + it, sign * v)));
        iterations += out.iterations;
        converged = out.converged;
        let improved = out.value.is_finite()
            && (!best.is_finite() || out.value < best - cfg.tol * best.abs().max(1.0));
        if out.value < best {
            best = out.value;
            y = out.x;
        }
        if !improved {
            break;
        }
        step *= 0.1;
    }
    let lengths = chart.lengths(&y);
    Run {
        history: RunHistory { run, start, objective: sign * best, iterations, converged, trace },
        lengths,
        evaluations,
        rejected,
    }
}

/// Estimates `Λ_j(G)` (maximize) or `μ_j(G)` (minimize) for the Neumann
/// problem. Runs are independent and merged by objective, ties going to the
/// lower run index, so the result does not depend on scheduling.
pub fn estimate_extremal(g: &MetricGraph, cfg: &OptimizerConfig) -> Result<OptimizerResult, OptimizeError> {
    validate(g, cfg)?;
    let m = g.edge_count();
    let chart = Chart::new(m, cfg.floor);
    let starts: Vec<Vec<f64>> = (0..=cfg.restarts)
        .map(|i| {
            if i == 0 {
                vec![1.0 / m as f64; m]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                simplex_point(&mut rng, m, 1.0, cfg.floor)
            }
        })
        .collect();
    let runs: Vec<Run> = if m == 1 {
        // a single edge has only the metric ℓ = 1
        let value = objective(g, &[1.0], cfg.j);
        vec![Run {
            history: RunHistory {
                run: 0,
                start: vec![1.0],
                objective: value.unwrap_or(f64::NAN),
                iterations: 0,
                converged: value.is_some(),
                trace: Vec::new(),
            },
            lengths: vec![1.0],
            evaluations: 1,
            rejected: usize::from(value.is_none()),
        }]
    } else {
        starts.into_par_iter().enumerate().map(|(i, s)| run_one(g, cfg, &chart, s, i)).collect()
    };

    let better = |a: f64, b: f64| match cfg.mode {
        Mode::Maximize => a > b,
        Mode::Minimize => a < b,
    };
    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        let v = r.history.objective;
        if !v.is_finite() {
            continue;
        }
        if best.is_none_or(|b| better(v, runs[b].history.objective)) {
            best = Some(i);
        }
    }
    let best = best.ok_or(OptimizeError::NoConvergence)?;
    let objective = runs[best].history.objective;
    let lengths = runs[best].lengths.clone();

    match cfg.mode {
        Mode::Maximize => {
            let (kind, bound) = tightest_upper_bound(g, cfg.j);
            if objective > bound * (1.0 + 1e-6) {
                return Err(OptimizeError::BoundExceeded { objective, bound, kind });
            }
        }
        Mode::Minimize => {
            if cfg.j == 1 && objective < PI * PI * (1.0 - 1e-6) {
                return Err(OptimizeError::BelowLowerBound { objective });
            }
        }
    }

    let boundary = lengths.iter().any(|&l| l <= cfg.floor * (1.0 + 1e-9));
    let metric = g.edges().iter().zip(&lengths).map(|(e, &l)| (e.id.clone(), l)).collect();
    Ok(OptimizerResult {
        mode: cfg.mode,
        j: cfg.j,
        objective,
        metric,
        lengths,
        boundary,
        best_run: runs[best].history.run,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        rejected: runs.iter().map(|r| r.rejected).sum(),
        history: runs.into_iter().map(|r| r.history).collect(),
    })
}
