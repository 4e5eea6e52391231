use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::graph::{BoundarySpec, EdgeEnd, MetricGraph};
use crate::output::{csv_line, fmt_f64};

use super::secular::{end_outward_derivative, end_value, minimize_sigma, secular_matrix, sigma_scale};
use super::{SpectralError, RANK_TOL};

/// L²-orthonormal basis of one eigenspace. Vector `i` holds
/// `[A_0, B_0, A_1, B_1, ...]` with `f_e(x) = A_e cos(kx) + B_e sin(kx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenfunctionBasis {
    pub k: f64,
    pub basis: Vec<Vec<f64>>,
}

impl EigenfunctionBasis {
    pub fn lambda(&self) -> f64 {
        self.k * self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn value(&self, i: usize, edge: usize, x: f64) -> f64 {
        let c = &self.basis[i];
        let (s, co) = (self.k * x).sin_cos();
        c[2 * edge] * co + c[2 * edge + 1] * s
    }

    /// Value at vertex `v`, read from its first incident end.
    pub fn vertex_value(&self, g: &MetricGraph, i: usize, v: usize) -> f64 {
        end_value(g, &self.basis[i], g.incidence(v)[0], self.k)
    }

    /// CSV `basis,edge,x,value` with `samples` evenly spaced points per edge
    /// including both ends.
    pub fn sample_csv(&self, g: &MetricGraph, samples: usize) -> String {
        let samples = samples.max(2);
        let mut out = csv_line(["basis", "edge", "x", "value"]);
        out.push('\n');
        for i in 0..self.dim() {
            for (e, edge) in g.edges().iter().enumerate() {
                for s in 0..samples {
                    let x = edge.length * s as f64 / (samples - 1) as f64;
                    let row = [i.to_string(), edge.id.clone(), fmt_f64(x), fmt_f64(self.value(i, e, x))];
                    out.push_str(&csv_line(row));
                    out.push('\n');
                }
            }
        }
        out
    }

    /// `∫_G f_i f_j` in closed form.
    pub fn inner(&self, g: &MetricGraph, i: usize, j: usize) -> f64 {
        l2_gram(g, self.k, &self.basis[i], &self.basis[j])
    }
}

/// Integrals of `cos²`, `sin²` and `sin·cos` of `kx` over `[0, ℓ]`.
fn trig_moments(k: f64, length: f64) -> (f64, f64, f64) {
    let s2 = (2.0 * k * length).sin() / (4.0 * k);
    let sin = (k * length).sin();
    (0.5 * length + s2, 0.5 * length - s2, sin * sin / (2.0 * k))
}

fn l2_gram(g: &MetricGraph, k: f64, u: &[f64], v: &[f64]) -> f64 {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (cc, ss, sc) = trig_moments(k, edge.length);
            let (a, b, c, d) = (u[2 * e], u[2 * e + 1], v[2 * e], v[2 * e + 1]);
            a * c * cc + b * d * ss + (a * d + b * c) * sc
        })
        .sum()
}

/// Eigenspace at `lambda`. The wavenumber is first refined within relative
/// distance `1e-6`; the null space of the secular matrix there is then
/// orthonormalized in `L²(G)` and each vector's largest coefficient is made
/// positive.
pub fn eigenfunctions(
    g: &MetricGraph,
    b: &BoundarySpec,
    lambda: f64,
) -> Result<EigenfunctionBasis, SpectralError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SpectralError::NonPositiveWavenumber(lambda));
    }
    let mask = b.mask(g)?;
    let k0 = lambda.sqrt();
    let (k, ratio) = minimize_sigma(g, &mask, k0 * (1.0 - 1e-6), k0 * (1.0 + 1e-6));
    if ratio > RANK_TOL {
        return Err(SpectralError::NotAnEigenvalue { lambda, ratio });
    }
    let svd = secular_matrix(g, &mask, k).svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s_max = sigma_scale(svd.singular_values.max());
    let null: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s < RANK_TOL * s_max)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    let n = null.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = l2_gram(g, k, null[i].as_slice(), null[j].as_slice());
        }
    }
    // Löwdin-style: rotate onto the Gram eigenvectors, then scale
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let basis = order
        .into_iter()
        .map(|c| {
            let weight = eig.eigenvalues[c].max(f64::MIN_POSITIVE).sqrt();
            let mut v = DVector::zeros(2 * g.edge_count());
            for (i, nv) in null.iter().enumerate() {
                v += nv * eig.eigenvectors[(i, c)];
            }
            v /= weight;
            let pivot = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if pivot < 0.0 {
                v.neg_mut();
            }
            v.as_slice().to_vec()
        })
        .collect();
    Ok(EigenfunctionBasis { k, basis })
}

/// `sup |A cos(kx) + B sin(kx)|` over `[0, ℓ]`.
fn edge_sup(a: f64, b: f64, k: f64, length: f64) -> f64 {
    let r = a.hypot(b);
    let phi = b.atan2(a);
    let (s, c) = (k * length).sin_cos();
    let ends = a.abs().max((a * c + b * s).abs());
    // interior extrema where kx - φ ∈ πℤ
    let n = (-phi / std::f64::consts::PI).ceil();
    if phi + n * std::f64::consts::PI <= k * length {
        r
    } else {
        ends
    }
}

/// Largest violation of the vertex conditions over the basis: value jumps
/// and Dirichlet values relative to the sup-norm, flux sums relative to `k`
/// times the sup-norm.
pub fn residual(g: &MetricGraph, b: &BoundarySpec, ef: &EigenfunctionBasis) -> Result<f64, SpectralError> {
    let mask = b.mask(g)?;
    let k = ef.k;
    let mut worst = 0.0_f64;
    for coeffs in &ef.basis {
        let sup = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| edge_sup(coeffs[2 * e], coeffs[2 * e + 1], k, edge.length))
            .fold(0.0, f64::max);
        if sup == 0.0 {
            return Ok(f64::INFINITY);
        }
        for v in 0..g.vertex_count() {
            let ends: &[EdgeEnd] = g.incidence(v);
            let first = end_value(g, coeffs, ends[0], k);
            for &end in ends {
                let value = end_value(g, coeffs, end, k);
                let jump = if mask[v] { value.abs() } else { (value - first).abs() };
                worst = worst.max(jump / sup);
            }
            if !mask[v] {
                let flux: f64 = ends.iter().map(|&end| end_outward_derivative(g, coeffs, end, k)).sum();
                worst = worst.max(flux.abs() / (k * sup));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use std::f64::consts::PI;

    #[test]
    fn path_cosine() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let ef = eigenfunctions(&p, &BoundarySpec::neumann(), PI * PI).unwrap();
        assert_eq!(ef.dim(), 1);
        assert!((ef.k - PI).abs() < 1e-12);
        // cos(πx) normalized: A = √2, B = 0
        assert!((ef.basis[0][0] - 2f64.sqrt()).abs() < 1e-8);
        assert!(ef.basis[0][1].abs() < 1e-8);
        let exact = EigenfunctionBasis { k: PI, basis: vec![vec![1.0, 0.0]] };
        assert!(residual(&p, &BoundarySpec::neumann(), &exact).unwrap() < 1e-15);
    }

    #[test]
    fn star_pairs_orthonormal() {
        let s = generate(Family::Star(3), &[1.0; 3]).unwrap();
        let b = BoundarySpec::neumann();
        let ef = eigenfunctions(&s, &b, PI * PI / 4.0).unwrap();
        assert_eq!(ef.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ef.inner(&s, i, j) - want).abs() < 1e-10);
            }
            // vanishes at the centre
            assert!(ef.vertex_value(&s, i, 0).abs() < 1e-8);
        }
        assert!(residual(&s, &b, &ef).unwrap() < 1e-8);
    }

    #[test]
    fn not_an_eigenvalue() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        assert!(matches!(
            eigenfunctions(&p, &BoundarySpec::neumann(), 2.0),
            Err(SpectralError::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn sup_norm_is_exact() {
        assert!((edge_sup(1.0, 1.0, 1.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((edge_sup(1.0, 1.0, 1.0, 0.5) - (0.5f64.cos() + 0.5f64.sin())).abs() < 1e-15);
        assert!((edge_sup(0.0, 1.0, 1.0, 0.5) - 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn csv_dump() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let ef = eigenfunctions(&p, &BoundarySpec::neumann(), PI * PI).unwrap();
        let csv = ef.sample_csv(&p, 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "basis,edge,x,value");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,e0,5.0000000000000000e-1,"));
    }
}
