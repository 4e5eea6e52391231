//! Nelder–Mead minimization with dimension-adaptive coefficients
//! (Gao & Han): reflection 1, expansion `1 + 2/n`, contraction
//! `3/4 - 1/(2n)`, shrink `1 - 1/n`.

use nalgebra::DVector;

pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, best value)` after every iteration.
    pub trace: Vec<(usize, f64)>,
}

/// Minimizes `f` from the axis-aligned simplex around `x0` with edge `step`.
/// `constrain` maps every trial point to the feasible set (it must be
/// idempotent). Stops when both the value spread and the simplex diameter
/// fall below `tol` (relative to the best value and to `step`), or after
/// `max_iter` iterations.
pub(crate) fn minimize<F, C>(
    f: &mut F,
    constrain: &C,
    x0: DVector<f64>,
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Outcome
where
    F: FnMut(&DVector<f64>) -> f64,
    C: Fn(DVector<f64>) -> DVector<f64>,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf.max(2.0));
    let mut eval = |x: DVector<f64>| {
        let x = constrain(x);
        let v = f(&x);
        (x, if v.is_nan() { f64::INFINITY } else { v })
    };
    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push(eval(x0.clone()));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step;
        simplex.push(eval(x));
    }
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..].iter().map(|(x, _)| (x - &simplex[0].0).amax()).fold(0.0, f64::max);
        if best.is_finite() && worst - best <= tol * best.abs().max(1.0) && diameter <= tol.sqrt() * step {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid = simplex[..n].iter().fold(DVector::zeros(n), |acc, (x, _)| acc + x) / nf;
        let reflected = eval(&centroid + (&centroid - &simplex[n].0) * alpha);
        if reflected.1 < simplex[0].1 {
            let expanded = eval(&centroid + (&reflected.0 - &centroid) * gamma);
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
        } else {
            let contracted = if reflected.1 < simplex[n].1 {
                eval(&centroid + (&reflected.0 - &centroid) * rho)
            } else {
                eval(&centroid + (&simplex[n].0 - &centroid) * rho)
            };
            if contracted.1 < simplex[n].1.min(reflected.1) {
                simplex[n] = contracted;
            } else {
                let anchor = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    *p = eval(&anchor + (&p.0 - &anchor) * sigma);
                }
            }
        }
        let current = simplex.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        trace.push((iterations, current));
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Outcome { x, value, iterations, converged, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let mut f = |x: &DVector<f64>| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize(&mut f, &|x| x, DVector::from_vec(vec![-1.2, 1.0]), 0.5, 1e-14, 5000);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5, "{:?}", out.x);
    }

    #[test]
    fn respects_constraint() {
        // minimum of (x - 2)² on x <= 1 is at the boundary
        let mut f = |x: &DVector<f64>| (x[0] - 2.0).powi(2) + x[1] * x[1];
        let clamp = |mut x: DVector<f64>| {
            x[0] = x[0].min(1.0);
            x
        };
        let out = minimize(&mut f, &clamp, DVector::from_vec(vec![0.0, 0.3]), 0.2, 1e-14, 5000);
        assert!((out.x[0] - 1.0).abs() < 1e-6);
    }
}
