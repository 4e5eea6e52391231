//! Coordinates on `{ℓ ≥ ε, Σℓ = 1}`: an orthonormal (Helmert) basis of the
//! sum-zero plane centred at the equilateral metric, plus Euclidean
//! projection back onto the floored simplex.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub(crate) struct Chart {
    centre: DVector<f64>,
    /// `m × (m - 1)`, orthonormal columns orthogonal to `(1, …, 1)`.
    basis: DMatrix<f64>,
    floor: f64,
}

impl Chart {
    pub(crate) fn new(m: usize, floor: f64) -> Self {
        let mut basis = DMatrix::zeros(m, m.saturating_sub(1));
        for k in 1..m {
            let norm = ((k * (k + 1)) as f64).sqrt();
            for i in 0..k {
                basis[(i, k - 1)] = 1.0 / norm;
            }
            basis[(k, k - 1)] = -(k as f64) / norm;
        }
        Self { centre: DVector::from_element(m, 1.0 / m as f64), basis, floor }
    }

    /// Lengths for coordinates `y`, projected onto the floored simplex.
    pub(crate) fn lengths(&self, y: &DVector<f64>) -> Vec<f64> {
        let x = &self.centre + &self.basis * y;
        project(x.as_slice(), self.floor)
    }

    /// Coordinates of a point of the simplex.
    pub(crate) fn coords(&self, lengths: &[f64]) -> DVector<f64> {
        self.basis.transpose() * (DVector::from_column_slice(lengths) - &self.centre)
    }
}

/// Euclidean projection of `x` onto `{ℓ ≥ floor, Σℓ = 1}`: `ℓ_i =
/// max(floor, x_i - τ)` with `τ` chosen so the sum is one.
pub(crate) fn project(x: &[f64], floor: f64) -> Vec<f64> {
    let total = |tau: f64| x.iter().map(|&v| (v - tau).max(floor)).sum::<f64>();
    let max = x.iter().copied().fold(f64::MIN, f64::max);
    let min = x.iter().copied().fold(f64::MAX, f64::min);
    let (mut lo, mut hi) = (min - 1.0, max - floor);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    let mut out: Vec<f64> = x.iter().map(|&v| (v - hi).max(floor)).collect();
    // spread the residual of the bisection over the free coordinates
    let free: Vec<usize> = (0..out.len()).filter(|&i| out[i] > floor).collect();
    if !free.is_empty() {
        let shift = (1.0 - out.iter().sum::<f64>()) / free.len() as f64;
        for i in free {
            out[i] = (out[i] + shift).max(floor);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn helmert_is_orthonormal() {
        let c = Chart::new(5, 1e-3);
        let gram = c.basis.transpose() * &c.basis;
        assert!((gram - DMatrix::identity(4, 4)).norm() < 1e-14);
        let ones = DVector::from_element(5, 1.0);
        assert!((c.basis.transpose() * ones).norm() < 1e-14);
    }

    #[test]
    fn round_trip() {
        let c = Chart::new(4, 1e-3);
        let l = [0.1, 0.2, 0.3, 0.4];
        let back = c.lengths(&c.coords(&l));
        for (a, b) in l.iter().zip(back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn projection_is_feasible(x in proptest::collection::vec(-2.0f64..2.0, 2..8), floor in 1e-4f64..0.05) {
            let p = project(&x, floor);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&v| v >= floor));
        }

        #[test]
        fn projection_fixes_feasible_points(raw in proptest::collection::vec(0.1f64..1.0, 2..8)) {
            let s: f64 = raw.iter().sum();
            let x: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let p = project(&x, 1e-3);
            for (a, b) in x.iter().zip(&p) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
