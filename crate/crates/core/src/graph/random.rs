//! Seeded samplers for trees, multigraphs and metrics.
//!
//! Trees are uniform over labeled trees via Prüfer sequences. Metrics draw
//! i.i.d. `uniform(0.1, 1)` lengths and rescale them to a target total
//! length, which keeps suites away from degenerate metrics.

use std::ops::RangeInclusive;

use rand::Rng;

use super::{Edge, MetricGraph};

/// Tree on `0..n` encoded by a Prüfer sequence of length `n - 2`.
pub fn prufer_decode(sequence: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert!(n >= 2 && sequence.len() == n - 2, "Prüfer sequence must have length n - 2");
    let mut degree = vec![1usize; n];
    for &x in sequence {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in sequence {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("a leaf always exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let mut rest = (0..n).filter(|&i| degree[i] == 1);
    let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((u, v));
    edges
}

/// Every labeled tree on `n >= 2` vertices (`n^(n-2)` of them).
pub fn labeled_trees(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let len = n.saturating_sub(2);
    let total = n.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut seq = vec![0; len];
        for slot in seq.iter_mut() {
            *slot = code % n;
            code /= n;
        }
        prufer_decode(&seq, n)
    })
}

/// Unit-length tree with vertices `v0..` and edges `e0..`.
pub fn tree_from_edges(n: usize, edges: &[(usize, usize)]) -> MetricGraph {
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(tail, head))| Edge { id: format!("e{i}"), tail, head, length: 1.0 })
        .collect();
    MetricGraph::from_parts(vertices, edges, true).expect("Prüfer trees are valid")
}

pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricGraph {
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.random_range(0..n)).collect();
    tree_from_edges(n, &prufer_decode(&seq, n))
}

/// `m` lengths drawn from `uniform(0.1, 1)` and rescaled to sum to `total`.
pub fn random_lengths<R: Rng + ?Sized>(rng: &mut R, m: usize, total: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x * total / sum).collect()
}

pub fn with_random_metric<R: Rng + ?Sized>(rng: &mut R, g: &MetricGraph, total: f64) -> MetricGraph {
    g.with_lengths(&random_lengths(rng, g.edge_count(), total)).expect("positive lengths")
}

/// Uniform point of `{ℓ >= floor, Σℓ = total}`.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, m: usize, total: f64, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    let free = total - floor * m as f64;
    raw.into_iter().map(|x| floor + free * x / sum).collect()
}

/// Random connected multigraph: a uniform spanning tree on `n` vertices plus
/// a few extra edges (loops and parallel edges allowed), with a random metric
/// of total length `total`. A single vertex gets at least one loop.
pub fn connected_multigraph<R: Rng + ?Sized>(
    rng: &mut R,
    vertices: RangeInclusive<usize>,
    extra_edges: RangeInclusive<usize>,
    total: f64,
) -> MetricGraph {
    let n = rng.random_range(vertices);
    let mut pairs = if n >= 2 {
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        prufer_decode(&seq, n)
    } else {
        Vec::new()
    };
    let mut extra = rng.random_range(extra_edges);
    if n == 1 {
        extra = extra.max(1);
    }
    for _ in 0..extra {
        pairs.push((rng.random_range(0..n), rng.random_range(0..n)));
    }
    let lengths = random_lengths(rng, pairs.len(), total);
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let edges = pairs
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(i, (&(tail, head), length))| Edge { id: format!("e{i}"), tail, head, length })
        .collect();
    MetricGraph::from_parts(vertices, edges, true).expect("spanning tree keeps it connected")
}

/// Connected simple graph with no loops and no pendant vertices that has an
/// induced tree on `n - 1` vertices: a random tree on `n - 1 >= 2` vertices
/// plus a hub adjacent to every tree leaf and possibly some other vertices.
pub fn hub_over_tree<R: Rng + ?Sized>(rng: &mut R, tree_order: usize, total: f64) -> MetricGraph {
    assert!(tree_order >= 2);
    let seq: Vec<usize> = (0..tree_order - 2).map(|_| rng.random_range(0..tree_order)).collect();
    let mut pairs = prufer_decode(&seq, tree_order);
    let mut degree = vec![0; tree_order];
    for &(a, b) in &pairs {
        degree[a] += 1;
        degree[b] += 1;
    }
    let hub = tree_order;
    for v in 0..tree_order {
        if degree[v] == 1 || rng.random_bool(0.3) {
            pairs.push((hub, v));
        }
    }
    let lengths = random_lengths(rng, pairs.len(), total);
    let vertices = (0..=tree_order).map(|i| format!("v{i}")).collect();
    let edges = pairs
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(i, (&(tail, head), length))| Edge { id: format!("e{i}"), tail, head, length })
        .collect();
    MetricGraph::from_parts(vertices, edges, true).expect("hub graph is connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cayley_counts() {
        for (n, count) in [(2, 1), (3, 3), (4, 16), (5, 125)] {
            let trees: Vec<_> = labeled_trees(n).collect();
            assert_eq!(trees.len(), count);
            for t in &trees {
                assert!(tree_from_edges(n, t).is_tree());
            }
        }
    }

    #[test]
    fn lengths_hit_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = random_lengths(&mut rng, 7, 2.5);
        assert!((l.iter().sum::<f64>() - 2.5).abs() < 1e-12);
        let s = simplex_point(&mut rng, 6, 1.0, 1e-3);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.iter().all(|&x| x >= 1e-3));
    }

    #[test]
    fn hub_graphs_meet_induced_tree_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for order in 2..7 {
            let g = hub_over_tree(&mut rng, order, 1.0);
            assert!(g.is_simple());
            assert_eq!(g.pendant_count(), 0);
            assert!(g.admits_induced_tree_of_order_n_minus_1());
        }
    }
}
