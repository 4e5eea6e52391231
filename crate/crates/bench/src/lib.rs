//! Fixed workloads shared by the benchmarks.

use qgraph_core::graph::{generate, Family};
use qgraph_core::MetricGraph;

/// Graphs of growing size with fixed, non-symmetric metrics.
pub fn workloads() -> Vec<(&'static str, MetricGraph)> {
    let lengths = |m: usize| (0..m).map(|i| 0.4 + 0.1 * ((i * 7) % 5) as f64).collect::<Vec<_>>();
    vec![
        ("path2", generate(Family::Path(2), &[1.0]).unwrap()),
        ("star5", generate(Family::Star(5), &lengths(5)).unwrap()),
        ("k4", generate(Family::Complete(4), &lengths(6)).unwrap()),
        ("k5", generate(Family::Complete(5), &lengths(10)).unwrap()),
        ("dipole6", generate(Family::Dipole(6), &[1.0; 6]).unwrap()),
    ]
}
