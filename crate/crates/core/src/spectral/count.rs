//! Exact eigenvalue counting for root isolation.
//!
//! Splitting `H¹` into functions that solve `-f'' = k² f` edgewise with given
//! vertex values, plus functions vanishing at every vertex, gives
//!
//! ```text
//! #{λ < k²} = Σ_e #{n ≥ 1 : nπ/ℓ_e < k} + n₋(M(k))
//! ```
//!
//! where `M(k)` is the quadratic form `∫ f'² - k² f²` restricted to the
//! edgewise solutions, written on the free (non-Dirichlet) vertex values. An
//! edge of length `ℓ` with end values `a, b` contributes
//! `k/sin(kℓ) · [(a² + b²) cos(kℓ) - 2ab]`. The identity fails only at the
//! edge Dirichlet values `kℓ_e ∈ πℤ`, where `k` is nudged.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::graph::MetricGraph;

/// Number of eigenvalues strictly below `k²`, with multiplicity. `k > 0`.
pub(crate) fn eigenvalue_count(g: &MetricGraph, dirichlet: &[bool], k: f64) -> usize {
    let mut k = k;
    for _ in 0..8 {
        let near_pole = g
            .edges()
            .iter()
            .any(|e| (k * e.length).sin().abs() < 1e-10 * (k * e.length).max(1.0));
        if !near_pole {
            break;
        }
        k *= 1.0 - 1e-11;
    }

    let mut free_index = vec![usize::MAX; g.vertex_count()];
    let mut free = 0;
    for v in 0..g.vertex_count() {
        if !dirichlet[v] {
            free_index[v] = free;
            free += 1;
        }
    }
    let mut edge_count = 0usize;
    let mut form = DMatrix::<f64>::zeros(free, free);
    for e in g.edges() {
        let theta = k * e.length;
        edge_count += (theta / std::f64::consts::PI).ceil() as usize - 1;
        let (s, c) = theta.sin_cos();
        let scale = k / s;
        let (a, b) = (free_index[e.tail], free_index[e.head]);
        if a != usize::MAX {
            form[(a, a)] += scale * c;
        }
        if b != usize::MAX {
            form[(b, b)] += scale * c;
        }
        if a != usize::MAX && b != usize::MAX {
            form[(a, b)] -= scale;
            form[(b, a)] -= scale;
        }
    }
    edge_count + negative_eigenvalues(form)
}

pub(crate) fn negative_eigenvalues(mat: DMatrix<f64>) -> usize {
    if mat.nrows() == 0 {
        return 0;
    }
    SymmetricEigen::new(mat).eigenvalues.iter().filter(|&&x| x < 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use std::f64::consts::PI;

    #[test]
    fn path_counts() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let neumann = [false, false];
        // eigenvalues 0, π², 4π², ...
        assert_eq!(eigenvalue_count(&p, &neumann, 0.5), 1);
        assert_eq!(eigenvalue_count(&p, &neumann, 1.5 * PI), 2);
        assert_eq!(eigenvalue_count(&p, &neumann, 3.5 * PI), 4);
        // one Dirichlet end: (2j-1)π/2
        let mixed = [true, false];
        assert_eq!(eigenvalue_count(&p, &mixed, 0.4 * PI), 0);
        assert_eq!(eigenvalue_count(&p, &mixed, 0.6 * PI), 1);
        assert_eq!(eigenvalue_count(&p, &mixed, 1.6 * PI), 2);
    }

    #[test]
    fn dipole_triple_eigenvalue() {
        let d = generate(Family::Dipole(3), &[1.0; 3]).unwrap();
        let mask = [false, false];
        assert_eq!(eigenvalue_count(&d, &mask, PI * (1.0 - 1e-6)), 1);
        assert_eq!(eigenvalue_count(&d, &mask, PI * (1.0 + 1e-6)), 4);
    }
}
