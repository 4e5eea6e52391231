//! Linear finite elements on each edge, shared unknowns at the vertices.
//!
//! Discrete eigenvalues are located by Sturm bisection: the number of
//! eigenvalues of `K x = λ M x` below `λ` is the inertia of `K - λM`, which
//! is computed by eliminating the edge-interior unknowns (a tridiagonal
//! sweep per edge) and then taking the inertia of the small dense Schur
//! complement on the free vertex values.

use crate::graph::MetricGraph;

use super::count::negative_eigenvalues;
use nalgebra::DMatrix;

/// Minimum number of elements per edge, so the width on edge `e` is at most
/// `ℓ(e)/4`.
const MIN_ELEMENTS: usize = 4;

#[derive(Clone, Debug)]
pub(crate) struct FemMesh<'a> {
    graph: &'a MetricGraph,
    dirichlet: &'a [bool],
    elements: Vec<usize>,
}

impl<'a> FemMesh<'a> {
    /// Width on edge `e` is `min(h, ℓ(e)/4)` rounded down to an equal split.
    pub(crate) fn new(graph: &'a MetricGraph, dirichlet: &'a [bool], h: f64) -> Self {
        let elements = graph
            .edges()
            .iter()
            .map(|e| ((e.length / h).ceil() as usize).max(MIN_ELEMENTS))
            .collect();
        Self { graph, dirichlet, elements }
    }

    /// Every element halved, which is what Richardson extrapolation needs.
    pub(crate) fn refined(&self) -> Self {
        Self { elements: self.elements.iter().map(|n| 2 * n).collect(), ..self.clone() }
    }

    /// Number of discrete eigenvalues strictly below `lambda`.
    pub(crate) fn count_below(&self, lambda: f64) -> usize {
        if lambda <= 0.0 {
            return 0;
        }
        let g = self.graph;
        let mut free_index = vec![usize::MAX; g.vertex_count()];
        let mut free = 0;
        for v in 0..g.vertex_count() {
            if !self.dirichlet[v] {
                free_index[v] = free;
                free += 1;
            }
        }
        let mut schur = DMatrix::<f64>::zeros(free, free);
        let mut negative = 0;
        for (e, &n) in g.edges().iter().zip(&self.elements) {
            let h = e.length / n as f64;
            let diag = 1.0 / h - lambda * h / 3.0;
            let off = -1.0 / h - lambda * h / 6.0;
            // eliminate interior nodes 1..n-1 in order; `coupling` is the fill
            // between the tail node and the node about to be eliminated
            let mut pivot = 2.0 * diag;
            let mut coupling = off;
            let mut tail_update = 0.0;
            let mut head_update = 0.0;
            let mut cross = 0.0;
            for i in 1..n {
                if pivot == 0.0 {
                    pivot = f64::EPSILON / h;
                }
                if pivot < 0.0 {
                    negative += 1;
                }
                tail_update -= coupling * coupling / pivot;
                if i + 1 < n {
                    let next_coupling = -coupling * off / pivot;
                    pivot = 2.0 * diag - off * off / pivot;
                    coupling = next_coupling;
                } else {
                    head_update = -off * off / pivot;
                    cross = -coupling * off / pivot;
                }
            }
            let (a, b) = (free_index[e.tail], free_index[e.head]);
            let (b00, b11, b01) = (diag + tail_update, diag + head_update, cross);
            if a != usize::MAX && a == b {
                schur[(a, a)] += b00 + b11 + 2.0 * b01;
                continue;
            }
            if a != usize::MAX {
                schur[(a, a)] += b00;
            }
            if b != usize::MAX {
                schur[(b, b)] += b11;
            }
            if a != usize::MAX && b != usize::MAX {
                schur[(a, b)] += b01;
                schur[(b, a)] += b01;
            }
        }
        negative + negative_eigenvalues(schur)
    }

    /// The first `count` discrete eigenvalues, ascending, with multiplicity,
    /// bisected to relative width `rel`.
    pub(crate) fn eigenvalues(&self, count: usize, rel: f64) -> Vec<f64> {
        let neumann = self.dirichlet.iter().all(|&d| !d);
        let length = self.graph.total_length();
        let mut out = Vec::with_capacity(count);
        let mut lo = 0.0_f64;
        for i in 0..count {
            if neumann && i == 0 {
                out.push(0.0);
                continue;
            }
            let mut hi = (lo * 2.0).max((std::f64::consts::PI * (i + 1) as f64 / length).powi(2));
            while self.count_below(hi) <= i {
                lo = hi;
                hi *= 2.0;
            }
            let mut a = lo;
            let mut b = hi;
            for _ in 0..200 {
                if b - a <= rel * b {
                    break;
                }
                let mid = 0.5 * (a + b);
                if self.count_below(mid) > i {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            out.push(0.5 * (a + b));
            lo = a;
        }
        out
    }
}
