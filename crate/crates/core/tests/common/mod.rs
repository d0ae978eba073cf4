#![allow(dead_code)]

use ltv_core::diffusion::{world_count, PriceVector, WORLD_LIMIT};
use ltv_core::graph::{Edge, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random simple digraph on `n` nodes with at most `max_in` in-edges per
/// node and in-weight sums in `[0, 1]`, within the exact-enumeration limit.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    edge_prob: f64,
    max_in: usize,
) -> WeightedDigraph {
    loop {
        let mut edges = Vec::new();
        for dst in 0..n {
            let mut sources: Vec<usize> = (0..n)
                .filter(|&src| src != dst && rng.random_bool(edge_prob))
                .collect();
            sources.truncate(max_in);
            if sources.is_empty() {
                continue;
            }
            let raw: Vec<f64> = sources
                .iter()
                .map(|_| rng.random_range(0.05..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let mass = rng.random_range(0.3..=1.0);
            for (src, r) in sources.into_iter().zip(raw) {
                edges.push(Edge {
                    src,
                    dst,
                    weight: r / total * mass,
                });
            }
        }
        let g = WeightedDigraph::new(n, edges).expect("generated graph is valid");
        if world_count(&g) <= WORLD_LIMIT {
            return g;
        }
    }
}

pub fn random_prices(rng: &mut ChaCha8Rng, n: usize) -> PriceVector {
    PriceVector::new((0..n).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.35)).collect()
}

pub fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}
