//! Acceptance criteria. Every criterion prints one line
//! `criterion N: PASS|FAIL <detail> (<seconds>s, limit <limit>s)` and the
//! test fails if any line is FAIL. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use qgraph_core::bounds::{check_sharp, run_suite, BoundKind};
use qgraph_core::graph::{generate, Family};
use qgraph_core::optimize::{estimate_extremal, Mode, OptimizerConfig};
use qgraph_core::{compute_spectrum, BoundarySpec};

const PI2: f64 = PI * PI;

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
    seconds: f64,
    limit: f64,
}

fn run(id: usize, limit: f64, body: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = body();
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(d) => (seconds <= limit, d),
        Err(d) => (false, d),
    };
    let o = Outcome { id, pass, detail, seconds, limit };
    println!(
        "criterion {}: {} {} ({:.2}s, limit {}s)",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        o.seconds,
        o.limit
    );
    o
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn exact_spectra() -> Result<String, String> {
    let p = generate(Family::Path(2), &[1.0]).map_err(|e| e.to_string())?;
    let n = compute_spectrum(&p, &BoundarySpec::neumann(), 5, 1e-10).map_err(|e| e.to_string())?;
    let d = compute_spectrum(&p, &BoundarySpec::dirichlet(["v0"]), 5, 1e-10).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    if n.lambda(0) != Some(0.0) {
        return Err(format!("lambda_0 = {:?}", n.lambda(0)));
    }
    for j in 1..=5 {
        let jf = j as f64;
        worst = worst.max(rel(n.lambda(j).ok_or("missing Neumann value")?, jf * jf * PI2));
        let odd = 2.0 * jf - 1.0;
        worst = worst.max(rel(d.lambda(j).ok_or("missing Dirichlet value")?, odd * odd * PI2 / 4.0));
    }
    if worst > 1e-8 {
        return Err(format!("worst relative error {worst:e}"));
    }
    Ok(format!("path(2) Neumann and one-end Dirichlet, worst rel error {worst:.1e}"))
}

fn sharp_stars() -> Result<String, String> {
    let mut worst_lambda = 0.0_f64;
    let mut worst_slack = 0.0_f64;
    for p in 3..=5 {
        for j in 1..=3 {
            let mut lengths = vec![1.0; p];
            lengths[p - 1] = 2.0 * j as f64 - 1.0;
            let s = generate(Family::Star(p), &lengths).map_err(|e| e.to_string())?;
            let r = check_sharp(&s, &BoundarySpec::neumann(), BoundKind::TreeSharp, j, 1e-8)
                .map_err(|e| e.to_string())?;
            let target = (j as f64 - 1.0 + p as f64 / 2.0).powi(2) * PI2;
            if rel(r.bound, target) > 1e-14 {
                return Err(format!("star({p}) j={j}: bound {} vs {target}", r.bound));
            }
            worst_lambda = worst_lambda.max(rel(r.lambda, PI2 / 4.0));
            worst_slack = worst_slack.max(r.slack.abs() / r.bound);
            if !r.pass || worst_lambda > 1e-8 {
                return Err(format!("star({p}) j={j}: lambda {} slack {:e}", r.lambda, r.slack));
            }
        }
    }
    Ok(format!("9 stars, worst rel lambda error {worst_lambda:.1e}, worst |slack|/bound {worst_slack:.1e}"))
}

fn dipoles() -> Result<String, String> {
    let mut worst = 0.0_f64;
    for m in 3..=6 {
        let g = generate(Family::Dipole(m), &vec![1.0; m]).map_err(|e| e.to_string())?;
        let s = compute_spectrum(&g, &BoundarySpec::neumann(), 1, 1e-10).map_err(|e| e.to_string())?;
        let l1 = s.lambda(1).ok_or("missing lambda_1")?;
        worst = worst.max(rel(l1, PI2));
        if m == 4 {
            let normalized = l1 * g.total_length().powi(2);
            if rel(normalized, 16.0 * PI2) > 1e-8 {
                return Err(format!("dipole(4): lambda_1 L^2 = {normalized}"));
            }
        }
    }
    if worst > 1e-8 {
        return Err(format!("worst rel error {worst:e}"));
    }
    Ok(format!("dipole(3..=6), worst rel error {worst:.1e}; dipole(4) lambda_1 L^2 = 16 pi^2"))
}

fn suites(names: &[&str], trials: usize, seed: u64) -> Result<String, String> {
    let mut parts = Vec::new();
    let mut failed = Vec::new();
    for &name in names {
        let report = run_suite(name, trials, seed, 1e-8).map_err(|e| e.to_string())?;
        let s = report.summary();
        parts.push(format!("{name} {}/{}", s.passed, s.rows));
        if s.failed > 0 {
            failed.push(format!("{name}: {:?}", s.failures));
        }
    }
    if failed.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(format!("{} | failures {}", parts.join(", "), failed.join("; ")))
    }
}

fn optimizer() -> Result<String, String> {
    let star = generate(Family::Star(4), &[1.0; 4]).map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig { mode: Mode::Maximize, j: 2, restarts: 8, seed: 7, ..Default::default() };
    let r = estimate_extremal(&star, &cfg).map_err(|e| e.to_string())?;
    if r.objective < 9.0 * PI2 * (1.0 - 1e-4) {
        return Err(format!("star(4) j=2 reached {} < 9 pi^2 (1 - 1e-4)", r.objective));
    }
    let k4 = generate(Family::Complete(4), &[1.0; 6]).map_err(|e| e.to_string())?;
    let cfg = OptimizerConfig { mode: Mode::Maximize, j: 1, floor: 1e-3, restarts: 16, seed: 7, ..Default::default() };
    let q = estimate_extremal(&k4, &cfg).map_err(|e| e.to_string())?;
    let cap = 16.0 * PI2;
    if q.objective < 0.93 * cap || q.objective > cap * (1.0 + 1e-6) {
        return Err(format!("K4 j=1 reached {} (gate {}, cap {})", q.objective, 0.93 * cap, cap));
    }
    Ok(format!(
        "star(4) j=2 reached {:.6} pi^2, K4 j=1 reached {:.6} pi^2 = {:.4} of 16 pi^2",
        r.objective / PI2,
        q.objective / PI2,
        q.objective / cap
    ))
}

#[test]
fn acceptance() {
    let outcomes = [
        run(1, 1.0, exact_spectra),
        run(2, 10.0, sharp_stars),
        run(3, 10.0, dipoles),
        run(4, 300.0, || {
            suites(
                &["tree_sharpness", "neumann_general", "induced_tree_gap", "dirichlet_pendant", "claw", "kkmm", "mu1_lower"],
                100,
                1,
            )
        }),
        run(5, 300.0, || suites(&["k4_cases"], 200, 2)),
        run(6, 300.0, || suites(&["surgery_monotonicity"], 100, 3)),
        run(7, 300.0, || {
            let a = suites(&["scaling", "subdivision"], 50, 4)?;
            let b = suites(&["interlacing"], 100, 4)?;
            Ok(format!("{a}, {b}"))
        }),
        run(8, 300.0, || suites(&["oracle_agreement"], 50, 5)),
        run(9, 600.0, optimizer),
    ];
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
