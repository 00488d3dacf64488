//! Seeded fixtures shared by the benchmarks.

use pointring_core::enumerate;
use pointring_core::graphs::is_allowable;
use pointring_core::{CanonicalGraph, Edge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random `k`-regular graphs on `n` vertices.
pub fn random_graphs(n: usize, k: usize, count: usize, seed: u64) -> Vec<CanonicalGraph> {
    let mut r = rng(seed);
    (0..count).map(|_| enumerate::random_regular(n, k, &mut r)).collect()
}

/// Random allowable degree-two graphs (rejection sampled).
pub fn random_allowable(n: usize, count: usize, seed: u64) -> Vec<CanonicalGraph> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = enumerate::random_regular(n, 2, &mut r);
        if is_allowable(&g).unwrap_or(false) {
            out.push(g);
        }
    }
    out
}

/// Raw edge lists in random orientation and order, for canonicalization.
pub fn raw_edge_lists(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<Edge>> {
    let mut r = rng(seed);
    random_graphs(n, k, count, seed ^ 0x5eed)
        .into_iter()
        .map(|g| {
            let mut es: Vec<Edge> = g
                .to_pairs()
                .into_iter()
                .map(|[a, b]| if r.gen() { Edge(a, b) } else { Edge(b, a) })
                .collect();
            for i in (1..es.len()).rev() {
                es.swap(i, r.gen_range(0..=i));
            }
            es
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(random_graphs(8, 2, 5, 1), random_graphs(8, 2, 5, 1));
        assert!(random_allowable(10, 3, 2).iter().all(|g| is_allowable(g).unwrap()));
        assert_eq!(raw_edge_lists(6, 3, 2, 3)[0].len(), 9);
    }
}
