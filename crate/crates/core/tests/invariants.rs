//! Randomized invariants of the spectrum under rescaling and surgery.

use proptest::prelude::*;
use qgraph_core::graph::random::{connected_multigraph, random_tree, with_random_metric};
use qgraph_core::graph::{contract, delete_pendant_edge, identify_vertices, subdivide};
use qgraph_core::{compute_spectrum, BoundarySpec, MetricGraph, Spectrum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;
// relative slack for comparisons between independently computed spectra
const SLACK: f64 = 1e-8;

fn graph(seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    connected_multigraph(&mut rng, 1..=5, 0..=3, 2.0)
}

fn spectrum(g: &MetricGraph, b: &BoundarySpec, j: usize) -> Spectrum {
    compute_spectrum(g, b, j, TOL).unwrap()
}

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(1.0)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLACK * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_covariance(seed in any::<u64>(), c in 0.25f64..4.0) {
        let g = graph(seed);
        let b = BoundarySpec::neumann();
        let s0 = spectrum(&g, &b, 4);
        let s1 = spectrum(&g.scaled(c).unwrap(), &b, 4);
        for j in 1..=4 {
            prop_assert!(close(s1.lambda(j).unwrap() * c * c, s0.lambda(j).unwrap()));
        }
    }

    #[test]
    fn subdivision_is_invisible(seed in any::<u64>(), edge in any::<prop::sample::Index>(), at in 0.1f64..0.9) {
        let g = graph(seed);
        let e = edge.index(g.edge_count());
        let a = subdivide(&g, &g.edge(e).id, at * g.edge(e).length).unwrap();
        let b = BoundarySpec::neumann();
        let s0 = spectrum(&g, &b, 5);
        let s1 = spectrum(&a.graph, &b, 5);
        for j in 1..=5 {
            prop_assert!(close(s1.lambda(j).unwrap(), s0.lambda(j).unwrap()));
        }
    }

    #[test]
    fn one_dirichlet_vertex_interlaces(seed in any::<u64>(), vertex in any::<prop::sample::Index>()) {
        let g = graph(seed);
        let v = g.vertex_id(vertex.index(g.vertex_count())).to_string();
        let n = spectrum(&g, &BoundarySpec::neumann(), 3);
        let d = spectrum(&g, &BoundarySpec::dirichlet([v]), 4);
        for j in 1..=3 {
            let (nj, dj, dj1) = (n.lambda(j).unwrap(), d.lambda(j).unwrap(), d.lambda(j + 1).unwrap());
            prop_assert!(le(dj, nj) && le(nj, dj1), "j={j}: {dj} {nj} {dj1}");
        }
    }

    #[test]
    fn gluing_vertices_raises_eigenvalues(seed in any::<u64>(), pick in any::<(prop::sample::Index, prop::sample::Index)>()) {
        let g = graph(seed);
        prop_assume!(g.vertex_count() >= 2);
        let u = pick.0.index(g.vertex_count());
        let v = (u + 1 + pick.1.index(g.vertex_count() - 1)) % g.vertex_count();
        let a = identify_vertices(&g, &[g.vertex_id(u), g.vertex_id(v)]).unwrap();
        let b = BoundarySpec::neumann();
        let s0 = spectrum(&g, &b, 4);
        let s1 = spectrum(&a.graph, &b, 3);
        prop_assert_eq!(a.graph.betti(), g.betti() + 1);
        for j in 1..=3 {
            let (l0, l1, l0next) = (s0.lambda(j).unwrap(), s1.lambda(j).unwrap(), s0.lambda(j + 1).unwrap());
            prop_assert!(le(l0, l1) && le(l1, l0next), "j={j}: {l0} {l1} {l0next}");
        }
    }

    #[test]
    fn contraction_keeps_betti_and_length(seed in any::<u64>(), edge in any::<prop::sample::Index>()) {
        let g = graph(seed);
        let links: Vec<usize> = (0..g.edge_count()).filter(|&e| !g.edge(e).is_loop()).collect();
        prop_assume!(g.edge_count() >= 2 && !links.is_empty());
        let e = links[edge.index(links.len())];
        let a = contract(&g, &g.edge(e).id).unwrap();
        prop_assert_eq!(a.graph.betti(), g.betti());
        prop_assert!(close(a.graph.total_length(), g.total_length() - g.edge(e).length));
        prop_assert!(a.edge_map[&g.edge(e).id].is_empty());
    }

    #[test]
    fn deleting_a_pendant_edge_of_a_tree(seed in any::<u64>(), n in 3usize..=7, leaf in any::<prop::sample::Index>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, n);
        let g = with_random_metric(&mut rng, &t, 1.0);
        let pendants = g.pendant_vertices();
        let v = pendants[leaf.index(pendants.len())];
        let e = g.incidence(v)[0].edge;
        let a = delete_pendant_edge(&g, &g.edge(e).id).unwrap();
        prop_assert!(a.graph.is_tree());
        let b = BoundarySpec::neumann();
        let s0 = spectrum(&g, &b, 4);
        let s1 = spectrum(&a.graph, &b, 4);
        for j in 1..=4 {
            prop_assert!(le(s0.lambda(j).unwrap(), s1.lambda(j).unwrap()));
        }
    }
}
