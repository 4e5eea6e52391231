//! Secular matrix of the vertex conditions in the per-edge basis
//! `f_e(x) = A_e cos(kx) + B_e sin(kx)`.
//!
//! Unknown `2e` is `A_e`, unknown `2e + 1` is `B_e`. A Neumann vertex of
//! degree `d` contributes `d - 1` continuity rows (each end against the first
//! incident end) and one flux row; a Dirichlet vertex contributes `d` rows
//! forcing every incident end value to zero.
//!
//! Each row is divided by the root-sum-square of the norms of the end rows
//! it combines (`√2` for continuity, `k√d` for flux, `1` for Dirichlet), so
//! every row has norm at most one. Dividing by the actual row norm instead
//! breaks at loops: both rows of a loop vanish identically at `kℓ ∈ 2πℤ`,
//! and rescaling them to unit norm just before that point hides the root.

use nalgebra::DMatrix;

use crate::graph::{EdgeEnd, End, MetricGraph};

/// Coefficients of the end value in terms of `(A_e, B_e)`.
pub(crate) fn value_row(g: &MetricGraph, end: EdgeEnd, k: f64) -> [f64; 2] {
    match end.end {
        End::Tail => [1.0, 0.0],
        End::Head => {
            let (s, c) = (k * g.edge(end.edge).length).sin_cos();
            [c, s]
        }
    }
}

/// Coefficients of the derivative pointing away from the vertex into the edge.
pub(crate) fn outward_derivative_row(g: &MetricGraph, end: EdgeEnd, k: f64) -> [f64; 2] {
    match end.end {
        End::Tail => [0.0, k],
        End::Head => {
            let (s, c) = (k * g.edge(end.edge).length).sin_cos();
            [k * s, -k * c]
        }
    }
}

pub(crate) fn end_value(g: &MetricGraph, coeffs: &[f64], end: EdgeEnd, k: f64) -> f64 {
    let r = value_row(g, end, k);
    r[0] * coeffs[2 * end.edge] + r[1] * coeffs[2 * end.edge + 1]
}

pub(crate) fn end_outward_derivative(g: &MetricGraph, coeffs: &[f64], end: EdgeEnd, k: f64) -> f64 {
    let r = outward_derivative_row(g, end, k);
    r[0] * coeffs[2 * end.edge] + r[1] * coeffs[2 * end.edge + 1]
}

pub(crate) fn secular_matrix(g: &MetricGraph, dirichlet: &[bool], k: f64) -> DMatrix<f64> {
    let size = 2 * g.edge_count();
    let mut mat = DMatrix::zeros(size, size);
    let mut row = 0;
    let put = |mat: &mut DMatrix<f64>, row: usize, end: EdgeEnd, coeffs: [f64; 2], sign: f64| {
        mat[(row, 2 * end.edge)] += sign * coeffs[0];
        mat[(row, 2 * end.edge + 1)] += sign * coeffs[1];
    };
    for v in 0..g.vertex_count() {
        let ends = g.incidence(v);
        if dirichlet[v] {
            for &end in ends {
                put(&mut mat, row, end, value_row(g, end, k), 1.0);
                row += 1;
            }
        } else {
            let first = ends[0];
            let scale = std::f64::consts::FRAC_1_SQRT_2;
            for &end in &ends[1..] {
                put(&mut mat, row, end, value_row(g, end, k), scale);
                put(&mut mat, row, first, value_row(g, first, k), -scale);
                row += 1;
            }
            let scale = 1.0 / (k * (ends.len() as f64).sqrt());
            for &end in ends {
                put(&mut mat, row, end, outward_derivative_row(g, end, k), scale);
            }
            row += 1;
        }
    }
    debug_assert_eq!(row, size);
    mat
}

/// Singular values in ascending order.
pub(crate) fn singular_values(mat: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = mat.singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Reference scale for the singular values: `max(σ_max, 1)`. Rows have norm
/// at most one, so `σ_max` is `O(1)` except where a flower's rows all vanish
/// together, and there the absolute scale is the meaningful one.
pub(crate) fn sigma_scale(s_max: f64) -> f64 {
    s_max.max(1.0)
}

/// `σ_min` of the secular matrix relative to [`sigma_scale`].
pub(crate) fn sigma_ratio(g: &MetricGraph, dirichlet: &[bool], k: f64) -> f64 {
    let s = singular_values(&secular_matrix(g, dirichlet, k));
    s[0] / sigma_scale(s[s.len() - 1])
}

/// Number of singular values below `rank_tol` times [`sigma_scale`].
pub(crate) fn nullity_at(g: &MetricGraph, dirichlet: &[bool], k: f64, rank_tol: f64) -> usize {
    let s = singular_values(&secular_matrix(g, dirichlet, k));
    let cutoff = rank_tol * sigma_scale(s[s.len() - 1]);
    s.iter().take_while(|&&x| x < cutoff).count()
}

/// Minimizes `σ_min/σ_max` over `[lo, hi]` by golden-section search.
pub(crate) fn minimize_sigma(g: &MetricGraph, dirichlet: &[bool], lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let f = |k: f64| sigma_ratio(g, dirichlet, k);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * b {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // the endpoints of the original bracket are candidates too
    [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
}
