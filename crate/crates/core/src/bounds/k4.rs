//! `K₄` on vertices `w, x, y, z` and rejection samplers for the five length
//! regions used to prove `λ_1 ≤ π²` at total length 4.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::random::simplex_point;
use crate::graph::MetricGraph;

/// Edge order of [`k4`] and of the length arrays below.
pub const EDGES: [&str; 6] = ["wx", "wy", "wz", "xy", "xz", "yz"];

/// `K₄` with lengths in [`EDGES`] order.
pub fn k4(lengths: &[f64; 6]) -> MetricGraph {
    let ends = [("w", "x"), ("w", "y"), ("w", "z"), ("x", "y"), ("x", "z"), ("y", "z")];
    MetricGraph::new(
        ["w", "x", "y", "z"].map(String::from),
        EDGES.iter().zip(ends).zip(lengths).map(|((id, (a, b)), &l)| (id.to_string(), a.to_string(), b.to_string(), l)),
    )
    .expect("K4 with positive lengths is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Some edge has length at least 1.
    LongEdge,
    /// `xy + xz + yz ≥ 2`, `wy ≥ 1/2`, `wz ≥ 1/2`.
    TwoHalfEdges,
    /// `max(wx, wy, wz) < 1/2` (with `xy + xz + yz ≥ 2`).
    ShortStar,
    /// `wx + wz ≤ 1`, `wx ≥ 1/2`.
    ShortPair,
    /// `xy + xz + yz ≥ 2`, `wx ≥ wy ≥ wz`, `wx + wz ≥ 1`, `wz < 1/2`.
    Ordered,
}

impl Region {
    pub const ALL: [Region; 5] =
        [Region::LongEdge, Region::TwoHalfEdges, Region::ShortStar, Region::ShortPair, Region::Ordered];

    pub fn contains(self, l: &[f64; 6]) -> bool {
        let [wx, wy, wz, xy, xz, yz] = *l;
        let triangle = xy + xz + yz >= 2.0;
        match self {
            Region::LongEdge => l.iter().any(|&x| x >= 1.0),
            Region::TwoHalfEdges => triangle && wy >= 0.5 && wz >= 0.5,
            Region::ShortStar => triangle && wx.max(wy).max(wz) < 0.5,
            Region::ShortPair => wx + wz <= 1.0 && wx >= 0.5,
            Region::Ordered => triangle && wx >= wy && wy >= wz && wx + wz >= 1.0 && wz < 0.5,
        }
    }

    /// Uniform point of the region inside `{ℓ > 0, Σℓ = 4}`. For the ordered
    /// region the `w`-edges of a uniform draw are sorted first, which is a
    /// symmetry of the simplex and keeps the distribution uniform.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> [f64; 6] {
        for _ in 0..1_000_000 {
            let v = simplex_point(rng, 6, 4.0, 0.0);
            let mut l: [f64; 6] = v.try_into().expect("six lengths");
            if self == Region::Ordered {
                let mut w = [l[0], l[1], l[2]];
                w.sort_by(|a, b| b.total_cmp(a));
                l[..3].copy_from_slice(&w);
            }
            if self.contains(&l) && l.iter().all(|&x| x > 0.0) {
                return l;
            }
        }
        panic!("rejection sampler for {self:?} did not accept a point");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_satisfy_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for region in Region::ALL {
            for _ in 0..50 {
                let l = region.sample(&mut rng);
                assert!(region.contains(&l));
                assert!((l.iter().sum::<f64>() - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn k4_shape() {
        let g = k4(&[1.0; 6]);
        assert!(g.is_k4());
        assert_eq!(g.edge(EDGES.iter().position(|&e| e == "yz").unwrap()).id, "yz");
    }
}
