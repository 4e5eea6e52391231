//! Rayleigh quotients `∫|f'|² / ∫|f|²` of continuous functions built from
//! pieces `c·xⁿ·cos(ωx + θ)`, integrated in closed form.

use nalgebra::{Complex, DMatrix};

use crate::graph::{End, MetricGraph};

use super::SpectralError;

/// `coeff · x^power · cos(omega·x + phase)`, with `x` measured from the edge
/// tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub power: u32,
    pub omega: f64,
    pub phase: f64,
}

impl Term {
    pub fn constant(c: f64) -> Self {
        Self { coeff: c, power: 0, omega: 0.0, phase: 0.0 }
    }

    pub fn monomial(c: f64, power: u32) -> Self {
        Self { coeff: c, power, omega: 0.0, phase: 0.0 }
    }

    pub fn cos(c: f64, omega: f64, shift: f64) -> Self {
        Self { coeff: c, power: 0, omega, phase: shift }
    }

    /// `c·sin(ωx + shift)`.
    pub fn sin(c: f64, omega: f64, shift: f64) -> Self {
        Self { coeff: c, power: 0, omega, phase: shift - std::f64::consts::FRAC_PI_2 }
    }

    fn eval(&self, x: f64) -> f64 {
        self.coeff * x.powi(self.power as i32) * (self.omega * x + self.phase).cos()
    }

    fn derivative(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        if self.power > 0 {
            out.push(Term { coeff: self.coeff * self.power as f64, power: self.power - 1, ..*self });
        }
        if self.omega != 0.0 {
            out.push(Term {
                coeff: self.coeff * self.omega,
                phase: self.phase + std::f64::consts::FRAC_PI_2,
                ..*self
            });
        }
        out
    }
}

/// Sum of terms on `[start, end]` of one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<Term>,
}

impl Segment {
    fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }
}

/// Piecewise function on a graph: per edge, segments tiling `[0, ℓ(e)]` in
/// order. Edges without segments carry the zero function.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFunction {
    pieces: Vec<Vec<Segment>>,
}

impl GraphFunction {
    pub fn zero(g: &MetricGraph) -> Self {
        Self { pieces: vec![Vec::new(); g.edge_count()] }
    }

    /// Same terms on all of edge `e`.
    pub fn set_edge(&mut self, g: &MetricGraph, e: usize, terms: Vec<Term>) {
        self.pieces[e] = vec![Segment { start: 0.0, end: g.edge(e).length, terms }];
    }

    /// Replaces edge `e` by explicit segments; they must tile `[0, ℓ(e)]`.
    pub fn set_segments(&mut self, e: usize, segments: Vec<Segment>) {
        self.pieces[e] = segments;
    }

    pub fn value(&self, e: usize, x: f64) -> f64 {
        self.pieces[e]
            .iter()
            .find(|s| x >= s.start && x <= s.end)
            .map_or(0.0, |s| s.eval(x))
    }

    fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|segs| {
                segs.iter()
                    .map(|s| Segment {
                        start: s.start,
                        end: s.end,
                        terms: s.terms.iter().flat_map(Term::derivative).collect(),
                    })
                    .collect()
            })
            .collect();
        Self { pieces }
    }

    fn end_value(&self, g: &MetricGraph, e: usize, end: End) -> f64 {
        let segs = &self.pieces[e];
        match end {
            End::Tail => segs.first().map_or(0.0, |s| s.eval(0.0)),
            End::Head => segs.last().map_or(0.0, |s| s.eval(g.edge(e).length)),
        }
    }

    fn check(&self, g: &MetricGraph) -> Result<(), SpectralError> {
        let scale = self
            .pieces
            .iter()
            .flatten()
            .flat_map(|s| [s.eval(s.start).abs(), s.eval(s.end).abs()])
            .fold(1.0, f64::max);
        let tol = 1e-9 * scale;
        for (e, segs) in self.pieces.iter().enumerate() {
            let edge = g.edge(e);
            if segs.is_empty() {
                continue;
            }
            let tiles = segs.first().unwrap().start.abs() <= 1e-12 * edge.length
                && (segs.last().unwrap().end - edge.length).abs() <= 1e-12 * edge.length
                && segs.windows(2).all(|w| (w[0].end - w[1].start).abs() <= 1e-12 * edge.length);
            if !tiles {
                return Err(SpectralError::InvalidArgument(format!(
                    "segments on edge '{}' do not tile [0, {}]",
                    edge.id, edge.length
                )));
            }
            for w in segs.windows(2) {
                let jump = (w[0].eval(w[0].end) - w[1].eval(w[1].start)).abs();
                if jump > tol {
                    return Err(SpectralError::Discontinuous { vertex: format!("{}@{}", edge.id, w[0].end), jump });
                }
            }
        }
        for v in 0..g.vertex_count() {
            let values: Vec<f64> =
                g.incidence(v).iter().map(|end| self.end_value(g, end.edge, end.end)).collect();
            let jump = values.iter().map(|x| (x - values[0]).abs()).fold(0.0, f64::max);
            if jump > tol {
                return Err(SpectralError::Discontinuous { vertex: g.vertex_id(v).to_string(), jump });
            }
        }
        Ok(())
    }
}

/// `∫_a^b xⁿ cos(ωx + θ) dx`.
fn integrate(power: u32, omega: f64, phase: f64, a: f64, b: f64) -> f64 {
    let reach = a.abs().max(b.abs());
    let n = power as i32;
    if omega == 0.0 {
        return phase.cos() * (b.powi(n + 1) - a.powi(n + 1)) / f64::from(n + 1);
    }
    let rotation = Complex::from_polar(1.0, phase);
    if (omega * reach).abs() < 0.5 {
        // ∫ xⁿ e^{iωx} = Σ_m (iω)^m/m! · (b^{n+m+1} - a^{n+m+1})/(n+m+1)
        let mut sum = Complex::new(0.0, 0.0);
        let mut factor = Complex::new(1.0, 0.0);
        for m in 0..40 {
            let p = n + m + 1;
            sum += factor * ((b.powi(p) - a.powi(p)) / f64::from(p));
            factor *= Complex::new(0.0, omega) / f64::from(m + 1);
        }
        return (rotation * sum).re;
    }
    // e^{iωx} Σ_j (-1)^j n!/(n-j)! x^{n-j} / (iω)^{j+1}
    let iw = Complex::new(0.0, omega);
    let antiderivative = |x: f64| {
        let mut sum = Complex::new(0.0, 0.0);
        let mut falling = 1.0;
        let mut denom = iw;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += Complex::new(sign * falling * x.powi(n - j), 0.0) / denom;
            falling *= f64::from(n - j);
            denom *= iw;
        }
        Complex::from_polar(1.0, omega * x) * sum
    };
    (rotation * (antiderivative(b) - antiderivative(a))).re
}

/// `∫_a^b s·t` for two term lists.
fn product_integral(s: &[Term], t: &[Term], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for p in s {
        for q in t {
            let c = 0.5 * p.coeff * q.coeff;
            let n = p.power + q.power;
            total += c * integrate(n, p.omega - q.omega, p.phase - q.phase, a, b);
            total += c * integrate(n, p.omega + q.omega, p.phase + q.phase, a, b);
        }
    }
    total
}

fn inner(f: &GraphFunction, h: &GraphFunction) -> f64 {
    let mut total = 0.0;
    for (fs, hs) in f.pieces.iter().zip(&h.pieces) {
        for s in fs {
            for t in hs {
                let (a, b) = (s.start.max(t.start), s.end.min(t.end));
                if b > a {
                    total += product_integral(&s.terms, &t.terms, a, b);
                }
            }
        }
    }
    total
}

/// `∫|f'|² / ∫|f|²`, after checking continuity along edges and at vertices.
pub fn rayleigh_quotient(g: &MetricGraph, f: &GraphFunction) -> Result<f64, SpectralError> {
    f.check(g)?;
    let mass = inner(f, f);
    if mass <= 0.0 {
        return Err(SpectralError::ZeroFunction);
    }
    let df = f.derivative();
    Ok(inner(&df, &df).max(0.0) / mass)
}

/// Largest Rayleigh quotient over the span of `fs`, the top eigenvalue of
/// the pencil `(∫f_i' f_j', ∫f_i f_j)`.
pub fn max_rayleigh_on_span(g: &MetricGraph, fs: &[GraphFunction]) -> Result<f64, SpectralError> {
    if fs.is_empty() {
        return Err(SpectralError::ZeroFunction);
    }
    for f in fs {
        f.check(g)?;
    }
    let derivs: Vec<GraphFunction> = fs.iter().map(GraphFunction::derivative).collect();
    let n = fs.len();
    let mass = DMatrix::from_fn(n, n, |i, j| inner(&fs[i], &fs[j]));
    let stiff = DMatrix::from_fn(n, n, |i, j| inner(&derivs[i], &derivs[j]));
    let spread = mass.clone().symmetric_eigenvalues();
    if spread.min() <= 1e-12 * spread.max() {
        return Err(SpectralError::InvalidArgument("functions are linearly dependent".into()));
    }
    let chol = mass
        .cholesky()
        .ok_or_else(|| SpectralError::InvalidArgument("functions are linearly dependent".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| SpectralError::InvalidArgument("functions are linearly dependent".into()))?;
    let reduced = &l_inv * stiff * l_inv.transpose();
    let sym = (&reduced + reduced.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use std::f64::consts::PI;

    #[test]
    fn constant_is_zero() {
        let g = generate(Family::Complete(4), &[0.5, 0.7, 0.9, 0.6, 0.8, 0.5]).unwrap();
        let mut f = GraphFunction::zero(&g);
        for e in 0..g.edge_count() {
            f.set_edge(&g, e, vec![Term::constant(2.0)]);
        }
        assert_eq!(rayleigh_quotient(&g, &f).unwrap(), 0.0);
    }

    #[test]
    fn sine_on_path() {
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let mut f = GraphFunction::zero(&p);
        f.set_edge(&p, 0, vec![Term::sin(1.0, PI, 0.0)]);
        assert!((rayleigh_quotient(&p, &f).unwrap() - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn polynomials_and_segments() {
        // f = x(1 - x): ∫f'² = 1/3, ∫f² = 1/30
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let mut f = GraphFunction::zero(&p);
        f.set_edge(&p, 0, vec![Term::monomial(1.0, 1), Term::monomial(-1.0, 2)]);
        assert!((rayleigh_quotient(&p, &f).unwrap() - 10.0).abs() < 1e-12);
        // tent split at 1/2: ∫f'² = 1, ∫f² = 1/12
        let mut tent = GraphFunction::zero(&p);
        tent.set_segments(
            0,
            vec![
                Segment { start: 0.0, end: 0.5, terms: vec![Term::monomial(1.0, 1)] },
                Segment { start: 0.5, end: 1.0, terms: vec![Term::constant(1.0), Term::monomial(-1.0, 1)] },
            ],
        );
        assert!((rayleigh_quotient(&p, &tent).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn integrals_match_quadrature() {
        for &(n, w, th, a, b) in &[(0, 1e-3, 0.3, 0.0, 2.0), (2, 0.2, 1.0, 0.5, 1.5), (3, 7.0, -0.4, 0.0, 1.0)] {
            let steps = 20000;
            let dx = (b - a) / steps as f64;
            let simpson: f64 = (0..=steps)
                .map(|i| {
                    let x = a + i as f64 * dx;
                    let wgt = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    wgt * x.powi(n) * (w * x + th).cos()
                })
                .sum::<f64>()
                * dx
                / 3.0;
            let exact = integrate(n as u32, w, th, a, b);
            assert!((exact - simpson).abs() < 1e-10, "{n} {w}: {exact} vs {simpson}");
        }
    }

    #[test]
    fn rejects_bad_functions() {
        let p = generate(Family::Path(3), &[1.0, 1.0]).unwrap();
        let mut f = GraphFunction::zero(&p);
        assert_eq!(rayleigh_quotient(&p, &f), Err(SpectralError::ZeroFunction));
        f.set_edge(&p, 0, vec![Term::constant(1.0)]);
        assert!(matches!(rayleigh_quotient(&p, &f), Err(SpectralError::Discontinuous { .. })));
    }

    #[test]
    fn span_maximum() {
        // span{sin πx, sin 2πx} on a unit interval: max quotient 4π²
        let p = generate(Family::Path(2), &[1.0]).unwrap();
        let mut f1 = GraphFunction::zero(&p);
        f1.set_edge(&p, 0, vec![Term::sin(1.0, PI, 0.0)]);
        let mut f2 = GraphFunction::zero(&p);
        f2.set_edge(&p, 0, vec![Term::sin(1.0, 2.0 * PI, 0.0), Term::sin(0.3, PI, 0.0)]);
        let top = max_rayleigh_on_span(&p, &[f1.clone(), f2]).unwrap();
        assert!((top - 4.0 * PI * PI).abs() < 1e-10);
        assert!(max_rayleigh_on_span(&p, &[f1.clone(), f1]).is_err());
    }
}
