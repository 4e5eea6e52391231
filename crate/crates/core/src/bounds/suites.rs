//! Seeded verification suites. Row `i` of a suite draws from a ChaCha8
//! stream `(seed, i)`, so rows are independent of scheduling and can be
//! replayed one at a time.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::random::{connected_multigraph, hub_over_tree, random_lengths, random_tree, with_random_metric};
use crate::graph::{
    contract, delete_pendant_edge, generate, subdivide, BoundarySpec, Family, GraphFile, MetricGraph,
};
use crate::output::{csv_line, fmt_f64, to_json};
use crate::spectral::{compute_spectrum, fem_spectrum, SpectralError, Spectrum};

use super::k4::{k4, Region};
use super::{ensure_applicable, report_for, BoundError, BoundKind, Comparison};

pub const SUITES: [&str; 13] = [
    "tree_sharpness",
    "neumann_general",
    "induced_tree_gap",
    "dirichlet_pendant",
    "claw",
    "k4_cases",
    "kkmm",
    "mu1_lower",
    "surgery_monotonicity",
    "scaling",
    "subdivision",
    "interlacing",
    "oracle_agreement",
];

const REL_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-4;

/// One CSV row: the tightest of the checks made on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub suite: String,
    pub seed: u64,
    pub trial: usize,
    pub lambda_l2: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
    pub check: String,
    pub instance: GraphFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub tol: f64,
    /// Smallest `slack / |bound|` over all rows.
    pub worst_relative_slack: f64,
    pub failures: Vec<TrialRecord>,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn summary(&self) -> SuiteSummary {
        let failures: Vec<TrialRecord> = self.records.iter().filter(|r| !r.pass).cloned().collect();
        let worst = self
            .records
            .iter()
            .map(|r| if r.error.is_some() { f64::NEG_INFINITY } else { r.slack / r.bound.abs().max(f64::MIN_POSITIVE) })
            .fold(f64::INFINITY, f64::min);
        SuiteSummary {
            suite: self.suite.clone(),
            seed: self.seed,
            trials: self.trials,
            rows: self.records.len(),
            passed: self.records.len() - failures.len(),
            failed: failures.len(),
            tol: self.tol,
            worst_relative_slack: worst,
            failures,
        }
    }

    pub fn summary_json(&self) -> String {
        to_json(&self.summary())
    }

    /// `suite,seed,trial,lambda_l2,bound,slack,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["suite", "seed", "trial", "lambda_l2", "bound", "slack", "pass"]);
        out.push('\n');
        for r in &self.records {
            out.push_str(&csv_line([
                r.suite.clone(),
                r.seed.to_string(),
                r.trial.to_string(),
                fmt_f64(r.lambda_l2),
                fmt_f64(r.bound),
                fmt_f64(r.slack),
                r.pass.to_string(),
            ]));
            out.push('\n');
        }
        out
    }
}

struct Check {
    label: String,
    value: f64,
    bound: f64,
    comparison: Comparison,
    tol: Option<f64>,
}

impl Check {
    fn new(label: impl Into<String>, value: f64, bound: f64, comparison: Comparison) -> Self {
        Self { label: label.into(), value, bound, comparison, tol: None }
    }

    fn slack(&self) -> f64 {
        self.comparison.slack(self.value, self.bound)
    }

    fn relative(&self, tol: f64) -> f64 {
        self.slack() / (self.tol.unwrap_or(tol) * self.bound.abs().max(f64::MIN_POSITIVE))
    }
}

struct Trial {
    instance: GraphFile,
    checks: Result<Vec<Check>, BoundError>,
}

impl Trial {
    fn new(g: &MetricGraph, b: &BoundarySpec, checks: Result<Vec<Check>, BoundError>) -> Self {
        Self { instance: GraphFile::from_graph(g, b), checks }
    }
}

/// Rows per suite for `trials` requested instances.
fn row_count(name: &str, trials: usize) -> usize {
    match name {
        "tree_sharpness" => trials + 9,
        "induced_tree_gap" | "kkmm" => trials + 4,
        "dirichlet_pendant" => 2 * trials,
        "k4_cases" => Region::ALL.len() * trials,
        "surgery_monotonicity" => 4 * trials,
        _ => trials,
    }
}

/// Runs suite `name`. Every row is an independent instance; a row fails when
/// any of its checks has `slack < -tol·|bound|` or the computation errors.
/// `k4_cases` draws `trials` metrics per region and `surgery_monotonicity`
/// `trials` instances per operation.
pub fn run_suite(name: &str, trials: usize, seed: u64, tol: f64) -> Result<SuiteReport, BoundError> {
    if !SUITES.contains(&name) {
        return Err(BoundError::UnknownSuite(name.to_string()));
    }
    let rows = row_count(name, trials);
    let records = (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let trial = run_row(name, i, trials, &mut rng);
            record(name, seed, i, tol, trial)
        })
        .collect();
    Ok(SuiteReport { suite: name.to_string(), seed, trials, tol, records })
}

fn record(suite: &str, seed: u64, trial: usize, tol: f64, t: Trial) -> TrialRecord {
    let base = TrialRecord {
        suite: suite.to_string(),
        seed,
        trial,
        lambda_l2: f64::NAN,
        bound: f64::NAN,
        slack: f64::NAN,
        pass: false,
        check: String::new(),
        instance: t.instance,
        error: None,
    };
    match t.checks {
        Err(e) => TrialRecord { error: Some(e.to_string()), ..base },
        Ok(checks) if checks.is_empty() => TrialRecord { error: Some("no checks".into()), ..base },
        Ok(checks) => {
            let worst = checks
                .iter()
                .min_by(|a, b| a.relative(tol).total_cmp(&b.relative(tol)))
                .expect("non-empty");
            TrialRecord {
                lambda_l2: worst.value,
                bound: worst.bound,
                slack: worst.slack(),
                pass: worst.relative(tol) >= -1.0,
                check: worst.label.clone(),
                ..base
            }
        }
    }
}

fn run_row(name: &str, i: usize, trials: usize, rng: &mut ChaCha8Rng) -> Trial {
    match name {
        "tree_sharpness" if i < trials => random_tree_bound(rng),
        "tree_sharpness" => sharp_star(i - trials),
        "neumann_general" => neumann_general(rng),
        "induced_tree_gap" if i < trials => induced_tree(rng),
        "induced_tree_gap" => equilateral_sharp(Family::Dipole(i - trials + 2), BoundKind::InducedTreeGap),
        "dirichlet_pendant" if i < trials => dirichlet_pendant(rng),
        "dirichlet_pendant" => no_pendant(rng),
        "claw" => claw(rng),
        "k4_cases" => k4_case(Region::ALL[i / trials], rng),
        "kkmm" if i < trials => kkmm(rng),
        "kkmm" => {
            let m = i - trials + 2;
            if m % 2 == 0 {
                equilateral_sharp(Family::Dipole(m), BoundKind::Kkmm)
            } else {
                equilateral_sharp(Family::Flower(m), BoundKind::Kkmm)
            }
        }
        "mu1_lower" => mu1_lower(i, rng),
        "surgery_monotonicity" => match i / trials {
            0 => surgery_contract(i, rng),
            1 => surgery_shorten(i, rng),
            2 => surgery_pendant(i, rng),
            _ => surgery_dirichlet_pendant(rng),
        },
        "scaling" => scaling(i, rng),
        "subdivision" => subdivision(i, rng),
        "interlacing" => interlacing(rng),
        "oracle_agreement" => oracle_agreement(i, rng),
        _ => unreachable!("suite names are validated"),
    }
}

fn total_length(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.5..4.0)
}

fn multigraph(rng: &mut ChaCha8Rng, vertices: std::ops::RangeInclusive<usize>) -> MetricGraph {
    let total = total_length(rng);
    connected_multigraph(rng, vertices, 0..=3, total)
}

fn spectrum(g: &MetricGraph, b: &BoundarySpec, j: usize) -> Result<Spectrum, BoundError> {
    Ok(compute_spectrum(g, b, j, REL_TOL)?)
}

fn lambda(s: &Spectrum, j: usize) -> Result<f64, BoundError> {
    s.lambda(j)
        .ok_or_else(|| SpectralError::InvalidArgument(format!("no eigenvalue with index {j}")).into())
}

/// Bound checks for `j = 1..=j_max` from one spectrum.
fn bound_checks(
    g: &MetricGraph,
    b: &BoundarySpec,
    kind: BoundKind,
    j_max: usize,
    comparison: Comparison,
) -> Result<Vec<Check>, BoundError> {
    ensure_applicable(g, b, kind)?;
    let s = spectrum(g, b, j_max)?;
    (1..=j_max)
        .map(|j| {
            let r = report_for(g, b, kind, j, 0.0, comparison, &s)?;
            Ok(Check::new(format!("{kind} j={j}"), r.normalized, r.bound, comparison))
        })
        .collect()
}

/// Random nonempty Dirichlet set; with `pendants`, it contains every pendant
/// vertex.
fn random_dirichlet(rng: &mut ChaCha8Rng, g: &MetricGraph, pendants: bool) -> BoundarySpec {
    let mut d: Vec<String> = Vec::new();
    for v in 0..g.vertex_count() {
        let forced = pendants && g.degree(v) == 1;
        if forced || rng.random_bool(0.3) {
            d.push(g.vertex_id(v).to_string());
        }
    }
    if d.is_empty() {
        d.push(g.vertex_id(rng.random_range(0..g.vertex_count())).to_string());
    }
    BoundarySpec::dirichlet(d)
}

fn random_tree_bound(rng: &mut ChaCha8Rng) -> Trial {
    let n = rng.random_range(2..=8);
    let t = random_tree(rng, n);
    let total = total_length(rng);
    let g = with_random_metric(rng, &t, total);
    let b = BoundarySpec::neumann();
    let checks = bound_checks(&g, &b, BoundKind::TreeSharp, 3, Comparison::Upper);
    Trial::new(&g, &b, checks)
}

/// Star with `p - 1` unit edges and one of length `2j - 1`, for
/// `(p, j) ∈ {3,4,5} × {1,2,3}`.
fn sharp_star(k: usize) -> Trial {
    let (p, j) = (3 + k / 3, 1 + k % 3);
    let mut lengths = vec![1.0; p];
    lengths[p - 1] = (2 * j - 1) as f64;
    let g = generate(Family::Star(p), &lengths).expect("valid star");
    let b = BoundarySpec::neumann();
    let checks = (|| {
        ensure_applicable(&g, &b, BoundKind::TreeSharp)?;
        let s = spectrum(&g, &b, j)?;
        let r = report_for(&g, &b, BoundKind::TreeSharp, j, 0.0, Comparison::Equal, &s)?;
        let quarter = lambda(&s, j)?;
        Ok(vec![
            Check::new(format!("sharp star p={p} j={j}"), r.normalized, r.bound, Comparison::Equal),
            Check::new(format!("sharp star p={p} j={j} lambda"), quarter, PI * PI / 4.0, Comparison::Equal),
        ])
    })();
    Trial::new(&g, &b, checks)
}

fn neumann_general(rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::NeumannGeneral, 3, Comparison::Upper))
}

fn induced_tree(rng: &mut ChaCha8Rng) -> Trial {
    let order = rng.random_range(2..=6);
    let total = total_length(rng);
    let g = hub_over_tree(rng, order, total);
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::InducedTreeGap, 1, Comparison::Upper))
}

fn equilateral_sharp(family: Family, kind: BoundKind) -> Trial {
    let g = generate(family, &vec![1.0; family.edge_count()]).expect("valid family");
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, kind, 1, Comparison::Equal))
}

fn dirichlet_pendant(rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 2..=6);
    let b = random_dirichlet(rng, &g, true);
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::DirichletPendant, 3, Comparison::Upper))
}

/// Random multigraph whose pendant vertices get an extra edge until none
/// are left.
fn without_pendants(rng: &mut ChaCha8Rng, g: &MetricGraph) -> MetricGraph {
    let mut edges: Vec<(String, String, String, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.id.clone(), g.vertex_id(e.tail).to_string(), g.vertex_id(e.head).to_string(), e.length))
        .collect();
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    while let Some(v) = (0..n).find(|&v| degree[v] == 1) {
        let mut u = rng.random_range(0..n - 1);
        if u >= v {
            u += 1;
        }
        edges.push((format!("x{}", edges.len()), g.vertex_id(v).into(), g.vertex_id(u).into(), rng.random_range(0.1..1.0)));
        degree[v] += 1;
        degree[u] += 1;
    }
    let total = g.total_length();
    let sum: f64 = edges.iter().map(|e| e.3).sum();
    MetricGraph::new(g.vertices().to_vec(), edges.into_iter().map(|(id, a, b, l)| (id, a, b, l * total / sum)))
        .expect("adding edges keeps the graph valid")
}

fn no_pendant(rng: &mut ChaCha8Rng) -> Trial {
    let raw = multigraph(rng, 1..=6);
    let g = without_pendants(rng, &raw);
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::DirichletNoPendant, 3, Comparison::Upper))
}

fn claw(rng: &mut ChaCha8Rng) -> Trial {
    let total = total_length(rng);
    let g = generate(Family::Star(3), &random_lengths(rng, 3, total)).expect("valid claw");
    let b = BoundarySpec::dirichlet(["v1", "v2", "v3"]);
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::Claw, 1, Comparison::Upper))
}

fn k4_case(region: Region, rng: &mut ChaCha8Rng) -> Trial {
    let g = k4(&region.sample(rng));
    let b = BoundarySpec::neumann();
    let checks = bound_checks(&g, &b, BoundKind::K4Gap, 1, Comparison::Upper).map(|mut c| {
        c[0].label = format!("k4 {region:?}: lambda_1 <= pi^2 at L = 4");
        c
    });
    Trial::new(&g, &b, checks)
}

fn kkmm(rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 2..=6);
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::Kkmm, 1, Comparison::Upper))
}

fn mu1_lower(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = if i % 2 == 0 {
        multigraph(rng, 1..=6)
    } else {
        let n = rng.random_range(2..=8);
        let t = random_tree(rng, n);
        let total = total_length(rng);
        with_random_metric(rng, &t, total)
    };
    let b = BoundarySpec::neumann();
    Trial::new(&g, &b, bound_checks(&g, &b, BoundKind::Mu1Lower, 1, Comparison::Lower))
}

/// `λ_j(before) ≤ λ_j(after)` for `j = 1..=j_max`.
fn monotone(
    label: &str,
    before: &MetricGraph,
    bb: &BoundarySpec,
    after: &MetricGraph,
    ba: &BoundarySpec,
    j_max: usize,
) -> Result<Vec<Check>, BoundError> {
    let s0 = spectrum(before, bb, j_max)?;
    let s1 = spectrum(after, ba, j_max)?;
    (1..=j_max)
        .map(|j| Ok(Check::new(format!("{label} j={j}"), lambda(&s0, j)?, lambda(&s1, j)?, Comparison::Upper)))
        .collect()
}

fn boundary_for(i: usize, rng: &mut ChaCha8Rng, g: &MetricGraph) -> BoundarySpec {
    if i % 2 == 0 {
        BoundarySpec::neumann()
    } else {
        random_dirichlet(rng, g, false)
    }
}

fn surgery_contract(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = loop {
        let g = multigraph(rng, 2..=6);
        if g.edge_count() >= 2 {
            break g;
        }
    };
    let b = boundary_for(i, rng, &g);
    let candidates: Vec<usize> = (0..g.edge_count()).filter(|&e| !g.edge(e).is_loop()).collect();
    let e = candidates[rng.random_range(0..candidates.len())];
    let checks = (|| {
        let a = contract(&g, &g.edge(e).id)?;
        monotone(&format!("contract {}", g.edge(e).id), &g, &b, &a.graph, &b.mapped(&a), 3)
    })();
    Trial::new(&g, &b, checks)
}

fn surgery_shorten(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let b = boundary_for(i, rng, &g);
    let e = rng.random_range(0..g.edge_count());
    let factor = rng.random_range(0.1..0.95);
    let checks = (|| {
        let a = g.with_edge_length(e, g.edge(e).length * factor)?;
        monotone(&format!("shorten {}", g.edge(e).id), &g, &b, &a, &b, 3)
    })();
    Trial::new(&g, &b, checks)
}

fn pendant_graph(i: usize, rng: &mut ChaCha8Rng) -> MetricGraph {
    loop {
        let g = if i % 2 == 0 {
            let n = rng.random_range(3..=8);
            let t = random_tree(rng, n);
            let total = total_length(rng);
            with_random_metric(rng, &t, total)
        } else {
            multigraph(rng, 2..=6)
        };
        if g.edge_count() >= 2 && g.pendant_count() > 0 {
            return g;
        }
    }
}

fn surgery_pendant(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = pendant_graph(i, rng);
    let b = BoundarySpec::neumann();
    let pendants = g.pendant_vertices();
    let v = pendants[rng.random_range(0..pendants.len())];
    let e = g.incidence(v)[0].edge;
    let checks = (|| {
        let a = delete_pendant_edge(&g, &g.edge(e).id)?;
        monotone(&format!("delete pendant {}", g.edge(e).id), &g, &b, &a.graph, &b, 3)
    })();
    Trial::new(&g, &b, checks)
}

fn surgery_dirichlet_pendant(rng: &mut ChaCha8Rng) -> Trial {
    let g = pendant_graph(1, rng);
    let mut b = random_dirichlet(rng, &g, true);
    let pendants = g.pendant_vertices();
    let v = pendants[rng.random_range(0..pendants.len())];
    let v_id = g.vertex_id(v).to_string();
    if b.len() == 1 {
        // D_A must be non-empty; any other vertex will do
        let others: Vec<usize> = (0..g.vertex_count()).filter(|&u| u != v).collect();
        b = b.with_vertex(g.vertex_id(others[rng.random_range(0..others.len())]));
    }
    let e = g.incidence(v)[0].edge;
    let checks = (|| {
        let a = delete_pendant_edge(&g, &g.edge(e).id)?;
        let ba = b.without_vertex(&v_id).mapped(&a);
        let s0 = spectrum(&g, &b, 3)?;
        let s1 = spectrum(&a.graph, &ba, 3)?;
        let edge_value = PI * PI / (4.0 * g.edge(e).length.powi(2));
        (1..=3)
            .map(|j| {
                Ok(Check::new(
                    format!("dirichlet delete pendant {} j={j}", g.edge(e).id),
                    lambda(&s0, j)?,
                    lambda(&s1, j)?.max(edge_value),
                    Comparison::Upper,
                ))
            })
            .collect()
    })();
    Trial::new(&g, &b, checks)
}

fn scaling(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let b = boundary_for(i, rng, &g);
    let c = rng.random_range(0.2..5.0);
    let checks = (|| {
        let scaled = g.scaled(c)?;
        let s0 = spectrum(&g, &b, 4)?;
        let s1 = spectrum(&scaled, &b, 4)?;
        (1..=4)
            .map(|j| {
                Ok(Check::new(
                    format!("scale c={c} j={j}"),
                    lambda(&s1, j)? * c * c,
                    lambda(&s0, j)?,
                    Comparison::Equal,
                ))
            })
            .collect()
    })();
    Trial::new(&g, &b, checks)
}

fn subdivision(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let b = boundary_for(i, rng, &g);
    let e = rng.random_range(0..g.edge_count());
    let t = g.edge(e).length * rng.random_range(0.1..0.9);
    let checks = (|| {
        let a = subdivide(&g, &g.edge(e).id, t)?;
        let s0 = spectrum(&g, &b, 4)?;
        let s1 = spectrum(&a.graph, &b.mapped(&a), 4)?;
        (1..=4)
            .map(|j| {
                Ok(Check::new(
                    format!("subdivide {} j={j}", g.edge(e).id),
                    lambda(&s1, j)?,
                    lambda(&s0, j)?,
                    Comparison::Equal,
                ))
            })
            .collect()
    })();
    Trial::new(&g, &b, checks)
}

fn interlacing(rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let v = g.vertex_id(rng.random_range(0..g.vertex_count())).to_string();
    let b = BoundarySpec::neumann();
    let bv = BoundarySpec::dirichlet([v.clone()]);
    let checks = (|| {
        let s = spectrum(&g, &b, 3)?;
        let sv = spectrum(&g, &bv, 4)?;
        let mut out = Vec::new();
        for j in 1..=3 {
            let (lj, dj, dj1) = (lambda(&s, j)?, lambda(&sv, j)?, lambda(&sv, j + 1)?);
            out.push(Check::new(format!("lambda_{j}({v}) <= lambda_{j}"), dj, lj, Comparison::Upper));
            out.push(Check::new(format!("lambda_{j} <= lambda_{}({v})", j + 1), lj, dj1, Comparison::Upper));
        }
        Ok(out)
    })();
    Trial::new(&g, &b, checks)
}

fn oracle_agreement(i: usize, rng: &mut ChaCha8Rng) -> Trial {
    let g = multigraph(rng, 1..=6);
    let b = boundary_for(i, rng, &g);
    let checks = (|| {
        let s = spectrum(&g, &b, 4)?;
        let mask = b.mask(&g)?;
        let count = if b.is_neumann() { 5 } else { 4 };
        let h = 0.25 / crate::spectral::wavenumber_bound(&g, &mask, count);
        let f = fem_spectrum(&g, &b, 4, h, true)?;
        (1..=4)
            .map(|j| {
                let mut c = Check::new(
                    format!("fem vs secular j={j}"),
                    lambda(&f, j)?,
                    lambda(&s, j)?,
                    Comparison::Equal,
                );
                c.tol = Some(ORACLE_TOL);
                Ok(c)
            })
            .collect()
    })();
    Trial::new(&g, &b, checks)
}
