//! Eigenvalues and eigenfunctions of `-f'' = λf` on a metric graph with
//! continuity plus Kirchhoff conditions at free vertices and `f = 0` at
//! Dirichlet vertices.
//!
//! [`compute_spectrum`] brackets wavenumbers `k = √λ` with Richardson
//! extrapolated finite-element estimates, checks the bracket counts against
//! an exact counting function, isolates every root inside a bracket by
//! bisection on that count and finally minimizes `σ_min/σ_max` of the
//! row-scaled secular matrix. Multiplicity is the numerical nullity of
//! that matrix. Any disagreement is an error.

mod count;
mod eigenfunction;
pub(crate) mod fem;
pub mod rayleigh;
pub(crate) mod secular;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BoundarySpec, GraphError, MetricGraph};

pub use eigenfunction::{eigenfunctions, residual, EigenfunctionBasis};
pub use rayleigh::{max_rayleigh_on_span, rayleigh_quotient, GraphFunction, Segment, Term};

use count::eigenvalue_count;
use fem::FemMesh;

/// Singular values below `RANK_TOL · max(σ_max, 1)` count as zero.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "eigenvalue count mismatch on k in [{lo}, {hi}]: finite elements give {oracle}, secular count gives {secular}"
    )]
    CountMismatch { lo: f64, hi: f64, oracle: usize, secular: usize },
    #[error("multiplicity mismatch at k = {k}: count {count}, nullity {nullity}")]
    MultiplicityMismatch { k: f64, count: usize, nullity: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("mesh width {h} too coarse for the requested eigenvalues (need h <= {max_h})")]
    MeshTooCoarse { h: f64, max_h: f64 },
    #[error("lambda = {lambda} is not an eigenvalue (sigma ratio {ratio:e})")]
    NotAnEigenvalue { lambda: f64, ratio: f64 },
    #[error("function is discontinuous at vertex '{vertex}' (jump {jump:e})")]
    Discontinuous { vertex: String, jump: f64 },
    #[error("function is identically zero")]
    ZeroFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub mult: usize,
}

/// Distinct eigenvalues in increasing order. `index_base` is 0 for the
/// Neumann problem (the list starts with `(0, 1)`) and 1 otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub index_base: usize,
    pub eigenvalues: Vec<Eigenvalue>,
}

impl Spectrum {
    /// Eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues.iter().flat_map(|e| std::iter::repeat_n(e.lambda, e.mult)).collect()
    }

    /// `λ_j` in the problem's own indexing (`λ_0 = 0` for Neumann).
    pub fn lambda(&self, j: usize) -> Option<f64> {
        let i = j.checked_sub(self.index_base)?;
        let mut seen = 0;
        for e in &self.eigenvalues {
            seen += e.mult;
            if i < seen {
                return Some(e.lambda);
            }
        }
        None
    }

    /// Number of eigenvalues with multiplicity.
    pub fn count(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.mult).sum()
    }

    fn from_sorted(index_base: usize, values: &[f64], rel: f64) -> Self {
        let mut eigenvalues: Vec<Eigenvalue> = Vec::new();
        for &lambda in values {
            match eigenvalues.last_mut() {
                Some(last) if (lambda - last.lambda).abs() <= rel * lambda.abs().max(f64::MIN_POSITIVE) => {
                    last.mult += 1;
                }
                _ => eigenvalues.push(Eigenvalue { lambda, mult: 1 }),
            }
        }
        Self { index_base, eigenvalues }
    }
}

/// Row-scaled secular matrix of order `2m` at wavenumber `k`.
pub fn assemble_secular(
    g: &MetricGraph,
    b: &BoundarySpec,
    k: f64,
) -> Result<nalgebra::DMatrix<f64>, SpectralError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(SpectralError::NonPositiveWavenumber(k));
    }
    Ok(secular::secular_matrix(g, &b.mask(g)?, k))
}

/// Upper bound on `k` for the first `count` eigenvalues (with multiplicity,
/// including `λ_0` for Neumann), from `λ_j L² ≤ (j - 1 + 2β + p/2)² π²` and,
/// with Dirichlet vertices, `λ_j(D) ≤ λ_{j+|D|-1}`.
pub(crate) fn wavenumber_bound(g: &MetricGraph, dirichlet: &[bool], count: usize) -> f64 {
    let d = dirichlet.iter().filter(|&&x| x).count();
    let j = if d == 0 { count.saturating_sub(1) } else { count + d - 1 };
    let shape = j as f64 - 1.0 + 2.0 * g.betti() as f64 + 0.5 * g.pendant_count() as f64;
    std::f64::consts::PI * shape.max(1.0) / g.total_length()
}

fn validate(g: &MetricGraph, j_max: usize) -> Result<(), SpectralError> {
    if j_max == 0 {
        return Err(SpectralError::InvalidArgument("j_max must be at least 1".into()));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    Ok(())
}

/// Finite-element approximation of the first `j_max` eigenvalues (plus `λ_0`
/// for Neumann) with element width at most `h` (and at most `ℓ(e)/4` on edge
/// `e`). With `extrapolate`, the `h` and `h/2` results are combined as
/// `(4λ_{h/2} - λ_h)/3`.
pub fn fem_spectrum(
    g: &MetricGraph,
    b: &BoundarySpec,
    j_max: usize,
    h: f64,
    extrapolate: bool,
) -> Result<Spectrum, SpectralError> {
    validate(g, j_max)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(SpectralError::InvalidArgument(format!("mesh width must be positive, got {h}")));
    }
    let mask = b.mask(g)?;
    let neumann = b.is_neumann();
    let count = if neumann { j_max + 1 } else { j_max };
    let max_h = 1.0 / wavenumber_bound(g, &mask, count);
    if h > max_h {
        return Err(SpectralError::MeshTooCoarse { h, max_h });
    }
    let mesh = FemMesh::new(g, &mask, h);
    let mut values = mesh.eigenvalues(count, 1e-14);
    if extrapolate {
        let fine = mesh.refined().eigenvalues(count, 1e-14);
        for (v, f) in values.iter_mut().zip(fine) {
            *v = ((4.0 * f - *v) / 3.0).max(0.0);
        }
        // extrapolation can reorder nearly equal values
        values.sort_by(f64::total_cmp);
    }
    Ok(Spectrum::from_sorted(usize::from(!neumann), &values, 1e-10))
}

/// Bracket around one finite-element estimate, in `k`.
#[derive(Clone, Copy, Debug)]
struct Group {
    lo: f64,
    hi: f64,
    /// Number of estimates inside.
    count: usize,
    /// Index (into the estimate list) of the last estimate inside.
    last: usize,
}

fn fem_groups(g: &MetricGraph, mask: &[bool], total: usize, skip: usize, k_floor: f64) -> Vec<Group> {
    let kb = wavenumber_bound(g, mask, total);
    let mesh = FemMesh::new(g, mask, 0.5 / kb);
    let coarse = mesh.eigenvalues(total, 1e-10);
    let fine = mesh.refined().eigenvalues(total, 1e-10);
    let mut brackets: Vec<(f64, f64)> = (skip..total)
        .map(|i| {
            let (kc, kf) = (coarse[i].sqrt(), fine[i].sqrt());
            let k = ((4.0 * fine[i] - coarse[i]) / 3.0).max(0.0).sqrt();
            let half = (4.0 * (kc - kf).abs()).max(1e-6 * k).max(1e-3 * (kf - k).abs());
            ((k - half).max(k_floor), k + half)
        })
        .collect();
    brackets.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<Group> = Vec::new();
    for (i, (lo, hi)) in brackets.into_iter().enumerate().map(|(n, b)| (n + skip, b)) {
        match groups.last_mut() {
            Some(last) if lo <= last.hi => {
                last.hi = last.hi.max(hi);
                last.count += 1;
                last.last = i;
            }
            _ => groups.push(Group { lo, hi, count: 1, last: i }),
        }
    }
    groups
}

/// First `j_max` eigenvalues with multiplicity (plus `λ_0 = 0` for Neumann),
/// each to relative accuracy `rel_tol ∈ [1e-12, 1e-2]`. Whole eigenspaces
/// are returned, so the result may hold more than requested.
pub fn compute_spectrum(
    g: &MetricGraph,
    b: &BoundarySpec,
    j_max: usize,
    rel_tol: f64,
) -> Result<Spectrum, SpectralError> {
    validate(g, j_max)?;
    if !(1e-12..=1e-2).contains(&rel_tol) {
        return Err(SpectralError::InvalidArgument(format!(
            "rel_tol must lie in [1e-12, 1e-2], got {rel_tol}"
        )));
    }
    let mask = b.mask(g)?;
    let neumann = b.is_neumann();
    let needed = if neumann { j_max + 1 } else { j_max };
    let skip = usize::from(neumann);
    let k_floor = 1e-4 / g.total_length();

    // widen the estimate list until the group holding the last needed
    // eigenvalue is closed off by a later estimate
    let mut extra = 2;
    let groups = loop {
        let total = needed + extra;
        let groups = fem_groups(g, &mask, total, skip, k_floor);
        let cover = groups.iter().position(|grp| grp.last + 1 >= needed).expect("total > needed");
        if groups[cover].last + 1 < total {
            break groups[..=cover].to_vec();
        }
        extra *= 2;
        if extra > 512 {
            return Err(SpectralError::NoConvergence("eigenvalue cluster does not close".into()));
        }
    };

    let width = (1e-2 * rel_tol).min(1e-10);
    let mut below = skip;
    let mut roots: Vec<(f64, usize)> = Vec::new();
    for grp in groups {
        let n_lo = eigenvalue_count(g, &mask, grp.lo);
        if n_lo != below {
            return Err(SpectralError::CountMismatch { lo: k_floor, hi: grp.lo, oracle: below, secular: n_lo });
        }
        let n_hi = eigenvalue_count(g, &mask, grp.hi);
        if n_hi < n_lo || n_hi - n_lo != grp.count {
            return Err(SpectralError::CountMismatch {
                lo: grp.lo,
                hi: grp.hi,
                oracle: grp.count,
                secular: n_hi.saturating_sub(n_lo),
            });
        }
        roots.extend(locate(g, &mask, grp.lo, grp.hi, n_lo, n_hi, width)?);
        below = n_hi;
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));

    for &(k, c) in &roots {
        let nullity = secular::nullity_at(g, &mask, k, RANK_TOL);
        let nearby: usize = roots.iter().filter(|(k2, _)| (k2 - k).abs() <= 1e-6 * k).map(|r| r.1).sum();
        if nullity < c || nullity > nearby {
            return Err(SpectralError::MultiplicityMismatch { k, count: c, nullity });
        }
    }

    let mut eigenvalues = Vec::new();
    if neumann {
        eigenvalues.push(Eigenvalue { lambda: 0.0, mult: 1 });
    }
    let mut merged: Vec<(f64, usize)> = Vec::new();
    for (k, c) in roots {
        match merged.last_mut() {
            Some(last) if (k - last.0).abs() <= 1e-11 * k => {
                last.0 = (last.0 * last.1 as f64 + k * c as f64) / (last.1 + c) as f64;
                last.1 += c;
            }
            _ => merged.push((k, c)),
        }
    }
    eigenvalues.extend(merged.into_iter().map(|(k, mult)| Eigenvalue { lambda: k * k, mult }));
    Ok(Spectrum { index_base: usize::from(!neumann), eigenvalues })
}

/// Relative width below which bisection on the count stops being trusted:
/// near an edge Dirichlet value the condensed form loses about half the
/// digits, so the count can be wrong within `~√ε` of such a root.
const COUNT_WIDTH: f64 = 1e-6;
const POLE_SLACK: f64 = 1e-7;

/// Roots in `[lo, hi]` (holding `n_hi - n_lo` of them) as `(k, multiplicity)`.
/// Bisection on the count narrows each root down to relative `width` and
/// each cluster down to `1e-12`, after which `σ_min` is minimized. Within
/// [`COUNT_WIDTH`] of an edge Dirichlet value bisection stops at that width,
/// the interval is widened by [`POLE_SLACK`] before minimizing, and a
/// cluster counts as a multiple root once its nullity matches.
fn locate(
    g: &MetricGraph,
    mask: &[bool],
    lo: f64,
    hi: f64,
    n_lo: usize,
    n_hi: usize,
    width: f64,
) -> Result<Vec<(f64, usize)>, SpectralError> {
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi, n_lo, n_hi)];
    while let Some((a, b, na, nb)) = stack.pop() {
        let c = nb - na;
        if c == 0 {
            continue;
        }
        let split = |stack: &mut Vec<_>| {
            let mid = 0.5 * (a + b);
            let nm = eigenvalue_count(g, mask, mid).clamp(na, nb);
            stack.push((mid, b, nm, nb));
            stack.push((a, mid, na, nm));
        };
        if b - a > COUNT_WIDTH * b {
            split(&mut stack);
            continue;
        }
        let pole = near_edge_pole(g, a - COUNT_WIDTH * b, b + COUNT_WIDTH * b);
        let divisible = if c > 1 { b - a > 1e-12 * b } else { b - a > width * b };
        if divisible && !pole {
            split(&mut stack);
            continue;
        }
        let slack = if pole { (POLE_SLACK * b).min(b - a) } else { 0.0 };
        let (k, ratio) = secular::minimize_sigma(g, mask, (a - slack).max(lo), (b + slack).min(hi));
        if c > 1 && divisible && secular::nullity_at(g, mask, k, RANK_TOL) < c {
            split(&mut stack);
            continue;
        }
        if ratio > RANK_TOL {
            return Err(SpectralError::NoConvergence(format!(
                "sigma ratio {ratio:e} at k = {k} did not fall below {RANK_TOL:e}"
            )));
        }
        out.push((k, c));
    }
    Ok(out)
}

/// Whether `[lo, hi]` holds some `nπ/ℓ(e)`, `n ≥ 1`.
fn near_edge_pole(g: &MetricGraph, lo: f64, hi: f64) -> bool {
    g.edges().iter().any(|e| {
        let n = (lo * e.length / std::f64::consts::PI).ceil().max(1.0);
        n * std::f64::consts::PI / e.length <= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn path_neumann_and_dirichlet() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let s = compute_spectrum(&p, &BoundarySpec::neumann(), 3, 1e-10).unwrap();
        assert_eq!(s.index_base, 0);
        assert_eq!(s.eigenvalues[0], Eigenvalue { lambda: 0.0, mult: 1 });
        for j in 1..=3 {
            assert!(rel(s.lambda(j).unwrap(), (j * j) as f64 * PI * PI) < 1e-10);
        }
        let d = compute_spectrum(&p, &BoundarySpec::dirichlet(["v0"]), 2, 1e-10).unwrap();
        assert_eq!(d.index_base, 1);
        assert!(rel(d.lambda(1).unwrap(), PI * PI / 4.0) < 1e-10);
        assert!(rel(d.lambda(2).unwrap(), 9.0 * PI * PI / 4.0) < 1e-10);
        assert_eq!(d.lambda(0), None);
    }

    #[test]
    fn star_multiplicity() {
        let s = generate(Family::Star(3), &[1.0; 3]).unwrap();
        let spec = compute_spectrum(&s, &BoundarySpec::neumann(), 3, 1e-10).unwrap();
        assert_eq!(spec.eigenvalues[1].mult, 2);
        assert!(rel(spec.eigenvalues[1].lambda, PI * PI / 4.0) < 1e-10);
        assert_eq!(spec.lambda(3), Some(spec.eigenvalues[2].lambda));
    }

    #[test]
    fn secular_examples() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let m = assemble_secular(&p, &BoundarySpec::neumann(), PI).unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert!(m.determinant().abs() < 1e-12);
        let m = assemble_secular(&p, &BoundarySpec::dirichlet(["v0", "v1"]), PI / 2.0).unwrap();
        assert!(m.determinant().abs() > 0.5);
        assert!(matches!(
            assemble_secular(&p, &BoundarySpec::neumann(), 0.0),
            Err(SpectralError::NonPositiveWavenumber(_))
        ));
        let s = generate(Family::Star(3), &[1.0; 3]).unwrap();
        assert_eq!(secular::nullity_at(&s, &[false; 4], PI / 2.0, RANK_TOL), 2);
    }

    #[test]
    fn argument_checks() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let b = BoundarySpec::neumann();
        assert!(matches!(compute_spectrum(&p, &b, 0, 1e-8), Err(SpectralError::InvalidArgument(_))));
        assert!(matches!(compute_spectrum(&p, &b, 2, 1e-1), Err(SpectralError::InvalidArgument(_))));
        assert!(matches!(fem_spectrum(&p, &b, 20, 0.25, false), Err(SpectralError::MeshTooCoarse { .. })));
    }

    #[test]
    fn fem_examples() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let s = fem_spectrum(&p, &BoundarySpec::neumann(), 1, 1.0 / 64.0, false).unwrap();
        assert!(rel(s.lambda(1).unwrap(), PI * PI) < 1e-3);
        let d = generate(Family::Dipole(3), &[1.0; 3]).unwrap();
        let s = fem_spectrum(&d, &BoundarySpec::neumann(), 1, 1.0 / 64.0, true).unwrap();
        assert!(rel(s.lambda(1).unwrap(), PI * PI) < 1e-3);
    }
}
