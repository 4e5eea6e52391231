//! Closed-form eigenvalue bounds and checks of computed spectra against them.
//!
//! Every bound is stated for the scale-free quantity `λ_j·L²` (the claw bound
//! is normalized by `(ℓ₁ + ℓ₃)²` instead of `L²`).

pub mod k4;
mod suites;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BoundarySpec, GraphError, MetricGraph};
use crate::spectral::{compute_spectrum, SpectralError, Spectrum};

pub use suites::{run_suite, SuiteReport, SuiteSummary, TrialRecord, SUITES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("parameter mismatch for {kind}: {reason}")]
    ParameterMismatch { kind: BoundKind, reason: String },
    #[error("{kind} does not apply: {reason}")]
    Inapplicable { kind: BoundKind, reason: String },
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Trees: `Λ_j = (j - 1 + p/2)² π²`.
    TreeSharp,
    /// `Λ_j ≤ (j - 1 + 2β + p/2)² π²`.
    NeumannGeneral,
    /// No loops, no pendants, induced tree on `n - 1` vertices:
    /// `Λ_1 = (1 + β)² π²`.
    InducedTreeGap,
    /// `Λ_1(K₄) = 16π²`.
    K4Gap,
    /// `D` contains every pendant vertex: `λ_j(D)·L² ≤ (j - 2 + 2β + |D|)² π²`.
    DirichletPendant,
    /// No pendant vertices: `λ_j·L² ≤ (j - 1 + 2β)² π²`.
    DirichletNoPendant,
    /// Claw with Dirichlet leaves: `λ_1·(ℓ₁ + ℓ₃)² ≤ (10/9)² π²`.
    Claw,
    /// `Λ_1 ≤ m² π²`.
    Kkmm,
    /// `λ_1·L² ≥ π²`.
    Mu1Lower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 9] = [
        BoundKind::TreeSharp,
        BoundKind::NeumannGeneral,
        BoundKind::InducedTreeGap,
        BoundKind::K4Gap,
        BoundKind::DirichletPendant,
        BoundKind::DirichletNoPendant,
        BoundKind::Claw,
        BoundKind::Kkmm,
        BoundKind::Mu1Lower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::TreeSharp => "tree_sharp",
            BoundKind::NeumannGeneral => "neumann_general",
            BoundKind::InducedTreeGap => "induced_tree_gap",
            BoundKind::K4Gap => "k4_gap",
            BoundKind::DirichletPendant => "dirichlet_pendant",
            BoundKind::DirichletNoPendant => "dirichlet_no_pendant",
            BoundKind::Claw => "claw",
            BoundKind::Kkmm => "kkmm",
            BoundKind::Mu1Lower => "mu1_lower",
        }
    }

    pub fn comparison(self) -> Comparison {
        match self {
            BoundKind::Mu1Lower => Comparison::Lower,
            _ => Comparison::Upper,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs of the bound formulas. Unused fields are ignored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub j: usize,
    pub beta: usize,
    pub pendants: usize,
    pub dirichlet: usize,
    pub edges: usize,
    /// Longest and shortest claw edge.
    pub claw: Option<(f64, f64)>,
}

impl BoundParams {
    pub fn from_graph(g: &MetricGraph, b: &BoundarySpec, j: usize) -> Self {
        let claw = g.is_claw().then(|| {
            let lengths = g.lengths();
            let max = lengths.iter().copied().fold(f64::MIN, f64::max);
            let min = lengths.iter().copied().fold(f64::MAX, f64::min);
            (max, min)
        });
        Self {
            j,
            beta: g.betti(),
            pendants: g.pendant_count(),
            dirichlet: b.len(),
            edges: g.edge_count(),
            claw,
        }
    }
}

/// Right-hand side of the bound, normalized as described in the module docs.
pub fn bound_value(kind: BoundKind, params: &BoundParams) -> Result<f64, BoundError> {
    let mismatch = |reason: &str| Err(BoundError::ParameterMismatch { kind, reason: reason.into() });
    let pi2 = PI * PI;
    let j = params.j as f64;
    let beta = params.beta as f64;
    let p = params.pendants as f64;
    let d = params.dirichlet as f64;
    let needs_first = matches!(kind, BoundKind::InducedTreeGap | BoundKind::K4Gap | BoundKind::Claw | BoundKind::Kkmm | BoundKind::Mu1Lower);
    if params.j == 0 {
        return mismatch("j must be at least 1");
    }
    if needs_first && params.j != 1 {
        return mismatch("bound is stated for j = 1 only");
    }
    let square = |x: f64| x * x * pi2;
    match kind {
        BoundKind::TreeSharp => {
            if params.beta != 0 {
                return mismatch("tree bound needs beta = 0");
            }
            Ok(square(j - 1.0 + p / 2.0))
        }
        BoundKind::NeumannGeneral => Ok(square(j - 1.0 + 2.0 * beta + p / 2.0)),
        BoundKind::InducedTreeGap => Ok(square(1.0 + beta)),
        BoundKind::K4Gap => Ok(16.0 * pi2),
        BoundKind::DirichletPendant => {
            if params.dirichlet == 0 {
                return mismatch("Dirichlet set must be non-empty");
            }
            Ok(square(j - 2.0 + 2.0 * beta + d))
        }
        BoundKind::DirichletNoPendant => {
            if params.pendants != 0 {
                return mismatch("graph must have no pendant vertices");
            }
            Ok(square(j - 1.0 + 2.0 * beta))
        }
        BoundKind::Claw => match params.claw {
            Some((l1, l3)) if l1 >= l3 && l3 > 0.0 => Ok(square(10.0 / 9.0) / (l1 + l3).powi(2)),
            Some(_) => mismatch("claw lengths must satisfy l1 >= l3 > 0"),
            None => mismatch("claw lengths missing"),
        },
        BoundKind::Kkmm => {
            if params.edges == 0 {
                return mismatch("edge count must be positive");
            }
            Ok(square(params.edges as f64))
        }
        BoundKind::Mu1Lower => Ok(pi2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ bound`.
    Upper,
    /// `value ≥ bound`.
    Lower,
    /// `value = bound`.
    Equal,
}

impl Comparison {
    pub fn slack(self, value: f64, bound: f64) -> f64 {
        match self {
            Comparison::Upper => bound - value,
            Comparison::Lower => value - bound,
            Comparison::Equal => -(value - bound).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub graph: String,
    pub kind: BoundKind,
    pub j: usize,
    pub lambda: f64,
    /// Length used for normalization (`L`, or `ℓ₁ + ℓ₃` for the claw).
    pub length: f64,
    pub normalized: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub slack: f64,
    pub pass: bool,
    pub tol: f64,
}

impl BoundReport {
    /// `pass` iff `slack ≥ -tol·|bound|`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: String,
        kind: BoundKind,
        j: usize,
        lambda: f64,
        length: f64,
        bound: f64,
        comparison: Comparison,
        tol: f64,
    ) -> Self {
        let normalized = lambda * length * length;
        let slack = comparison.slack(normalized, bound);
        let pass = slack >= -tol * bound.abs();
        Self { graph, kind, j, lambda, length, normalized, bound, comparison, slack, pass, tol }
    }
}

/// `n, m, β, p` and `D` in one line.
pub fn graph_summary(g: &MetricGraph, b: &BoundarySpec) -> String {
    let d: Vec<&str> = b.vertices().collect();
    format!(
        "n={} m={} beta={} p={} L={} D=[{}]",
        g.vertex_count(),
        g.edge_count(),
        g.betti(),
        g.pendant_count(),
        g.total_length(),
        d.join(",")
    )
}

fn applicability(g: &MetricGraph, b: &BoundarySpec, kind: BoundKind) -> Result<(), String> {
    let neumann = || if b.is_neumann() { Ok(()) } else { Err("needs the Neumann problem".to_string()) };
    match kind {
        BoundKind::TreeSharp => {
            neumann()?;
            if !g.is_tree() {
                return Err("graph is not a tree".into());
            }
        }
        BoundKind::NeumannGeneral | BoundKind::Mu1Lower => neumann()?,
        BoundKind::Kkmm => {
            neumann()?;
            if g.edge_count() == 1 && g.has_loops() {
                return Err("a single loop has lambda_1 L^2 = 4 pi^2 > m^2 pi^2".into());
            }
        }
        BoundKind::InducedTreeGap => {
            neumann()?;
            if g.has_loops() || g.pendant_count() > 0 || !g.admits_induced_tree_of_order_n_minus_1() {
                return Err("needs no loops, no pendant vertices and an induced tree of order n-1".into());
            }
        }
        BoundKind::K4Gap => {
            neumann()?;
            if !g.is_k4() {
                return Err("graph is not K4".into());
            }
        }
        BoundKind::DirichletPendant => {
            if b.is_neumann() {
                return Err("Dirichlet set must be non-empty".into());
            }
            if let Some(v) = g.pendant_vertices().into_iter().find(|&v| !b.contains(g.vertex_id(v))) {
                return Err(format!("pendant vertex '{}' is not Dirichlet", g.vertex_id(v)));
            }
        }
        BoundKind::DirichletNoPendant => {
            neumann()?;
            if g.pendant_count() > 0 {
                return Err("graph has pendant vertices".into());
            }
        }
        BoundKind::Claw => {
            if !g.is_claw() {
                return Err("graph is not K_{1,3}".into());
            }
            let leaves: Vec<&str> = g.pendant_vertices().into_iter().map(|v| g.vertex_id(v)).collect();
            if b.len() != 3 || !leaves.iter().all(|v| b.contains(v)) {
                return Err("Dirichlet set must be exactly the three leaves".into());
            }
        }
    }
    Ok(())
}

/// Computes `λ_j` and compares its normalized value with the bound for `kind`.
pub fn check_bound(
    g: &MetricGraph,
    b: &BoundarySpec,
    kind: BoundKind,
    j: usize,
    tol: f64,
) -> Result<BoundReport, BoundError> {
    check_with(g, b, kind, j, tol, kind.comparison())
}

/// Like [`check_bound`] but asserting equality, for extremal metrics.
pub fn check_sharp(
    g: &MetricGraph,
    b: &BoundarySpec,
    kind: BoundKind,
    j: usize,
    tol: f64,
) -> Result<BoundReport, BoundError> {
    check_with(g, b, kind, j, tol, Comparison::Equal)
}

fn check_with(
    g: &MetricGraph,
    b: &BoundarySpec,
    kind: BoundKind,
    j: usize,
    tol: f64,
    comparison: Comparison,
) -> Result<BoundReport, BoundError> {
    ensure_applicable(g, b, kind)?;
    let spectrum = compute_spectrum(g, b, j, 1e-10)?;
    report_for(g, b, kind, j, tol, comparison, &spectrum)
}

/// Report for `λ_j` read from an already computed spectrum.
pub(crate) fn report_for(
    g: &MetricGraph,
    b: &BoundarySpec,
    kind: BoundKind,
    j: usize,
    tol: f64,
    comparison: Comparison,
    spectrum: &Spectrum,
) -> Result<BoundReport, BoundError> {
    let params = BoundParams::from_graph(g, b, j);
    let bound = bound_value(kind, &params)?;
    let lambda = spectrum.lambda(j).ok_or_else(|| BoundError::ParameterMismatch {
        kind,
        reason: format!("spectrum holds no eigenvalue with index {j}"),
    })?;
    // the claw bound is stated for λ₁ itself; report it on the `(ℓ₁ + ℓ₃)²` scale
    let (length, bound) = match (kind, params.claw) {
        (BoundKind::Claw, Some((l1, l3))) => (l1 + l3, bound * (l1 + l3).powi(2)),
        _ => (g.total_length(), bound),
    };
    Ok(BoundReport::new(graph_summary(g, b), kind, j, lambda, length, bound, comparison, tol))
}

/// Errors unless `kind` applies to `(g, b)`.
pub(crate) fn ensure_applicable(g: &MetricGraph, b: &BoundarySpec, kind: BoundKind) -> Result<(), BoundError> {
    applicability(g, b, kind).map_err(|reason| BoundError::Inapplicable { kind, reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn params(j: usize, beta: usize, pendants: usize, dirichlet: usize) -> BoundParams {
        BoundParams { j, beta, pendants, dirichlet, ..Default::default() }
    }

    #[test]
    fn formula_examples() {
        let pi2 = PI * PI;
        assert_eq!(bound_value(BoundKind::TreeSharp, &params(1, 0, 4, 0)).unwrap(), 4.0 * pi2);
        assert_eq!(bound_value(BoundKind::NeumannGeneral, &params(2, 1, 2, 0)).unwrap(), 16.0 * pi2);
        let claw = BoundParams { j: 1, claw: Some((2.0 / 3.0, 4.0 / 9.0)), ..Default::default() };
        assert!((bound_value(BoundKind::Claw, &claw).unwrap() - pi2).abs() < 1e-12);
        assert!((bound_value(BoundKind::K4Gap, &params(1, 3, 0, 0)).unwrap() - 157.9136704174297).abs() < 1e-9);
    }

    #[test]
    fn parameter_mismatch() {
        assert!(matches!(
            bound_value(BoundKind::TreeSharp, &params(1, 1, 2, 0)),
            Err(BoundError::ParameterMismatch { .. })
        ));
        assert!(bound_value(BoundKind::DirichletPendant, &params(1, 0, 2, 0)).is_err());
        assert!(bound_value(BoundKind::Claw, &params(1, 0, 3, 3)).is_err());
        assert!(bound_value(BoundKind::K4Gap, &params(2, 3, 0, 0)).is_err());
        assert!(bound_value(BoundKind::Mu1Lower, &params(0, 0, 0, 0)).is_err());
    }

    /// The pendant bound on trees agrees with the tree-only form
    /// `(j + |D| - 2)² π²`.
    #[test]
    fn pendant_bound_on_trees() {
        for j in 1..=6 {
            for d in 1..=6 {
                let value = bound_value(BoundKind::DirichletPendant, &params(j, 0, 0, d)).unwrap();
                let tree_form = ((j + d) as f64 - 2.0).powi(2) * PI * PI;
                assert!((value - tree_form).abs() <= 1e-14 * tree_form.max(1.0));
            }
        }
    }

    #[test]
    fn sharp_star_report() {
        let s = generate(Family::Star(3), &[1.0, 1.0, 3.0]).unwrap();
        let r = check_sharp(&s, &BoundarySpec::neumann(), BoundKind::TreeSharp, 2, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.normalized - 25.0 * PI * PI / 4.0).abs() < 1e-8 * r.bound);
    }

    #[test]
    fn dipole_kkmm_equality() {
        let d = generate(Family::Dipole(4), &[1.0; 4]).unwrap();
        let r = check_sharp(&d, &BoundarySpec::neumann(), BoundKind::Kkmm, 1, 1e-8).unwrap();
        assert!(r.pass && r.slack.abs() <= 1e-8 * r.bound, "{r:?}");
    }

    #[test]
    fn inapplicable_kinds() {
        let k4 = generate(Family::Complete(4), &[1.0; 6]).unwrap();
        let n = BoundarySpec::neumann();
        assert!(matches!(check_bound(&k4, &n, BoundKind::TreeSharp, 1, 1e-8), Err(BoundError::Inapplicable { .. })));
        assert!(matches!(check_bound(&k4, &n, BoundKind::Claw, 1, 1e-8), Err(BoundError::Inapplicable { .. })));
        let s = generate(Family::Star(3), &[1.0; 3]).unwrap();
        assert!(check_bound(&s, &n, BoundKind::K4Gap, 1, 1e-8).is_err());
        assert!(check_bound(&s, &BoundarySpec::dirichlet(["v1"]), BoundKind::DirichletPendant, 1, 1e-8).is_err());
    }

    #[test]
    fn lower_bound_flips() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let r = check_bound(&p, &BoundarySpec::neumann(), BoundKind::Mu1Lower, 1, 1e-8).unwrap();
        assert_eq!(r.comparison, Comparison::Lower);
        assert!(r.pass);
        assert!(r.slack.abs() < 1e-8);
    }
}
