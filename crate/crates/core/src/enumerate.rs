//! Exhaustive and random generation of regular graphs on the circle.

use rand::seq::SliceRandom;

use crate::graphs::{edges_cross, CanonicalGraph, Edge, EdgeList, Vertex};

/// All regular loop-free multigraphs of degree `k` on `n` vertices, sorted.
/// With `planar_only`, only those whose chords do not cross.
pub fn regular_graphs(n: usize, k: usize, planar_only: bool) -> Vec<CanonicalGraph> {
    let mut out = Vec::new();
    if n == 0 || (n * k) % 2 != 0 {
        return out;
    }
    let mut deficit = vec![k; n];
    let mut edges: EdgeList = EdgeList::new();
    extend(n, 0, &mut deficit, &mut edges, planar_only, &mut out);
    out.sort();
    out
}

// Vertices are completed in increasing order; at vertex v all edges to larger
// vertices are chosen at once as a non-decreasing partner list, so each edge
// multiset appears exactly once.
fn extend(
    n: usize,
    v: usize,
    deficit: &mut [usize],
    edges: &mut EdgeList,
    planar_only: bool,
    out: &mut Vec<CanonicalGraph>,
) {
    if v == n {
        out.push(CanonicalGraph::from_oriented(n, edges.clone()));
        return;
    }
    if deficit[v] == 0 {
        extend(n, v + 1, deficit, edges, planar_only, out);
        return;
    }
    choose_partners(n, v, v + 1, deficit, edges, planar_only, out);
}

fn choose_partners(
    n: usize,
    v: usize,
    from: usize,
    deficit: &mut [usize],
    edges: &mut EdgeList,
    planar_only: bool,
    out: &mut Vec<CanonicalGraph>,
) {
    if deficit[v] == 0 {
        extend(n, v + 1, deficit, edges, planar_only, out);
        return;
    }
    for w in from..n {
        if deficit[w] == 0 {
            continue;
        }
        let e = Edge(v as Vertex, w as Vertex);
        if planar_only && edges.iter().any(|f| edges_cross(*f, e)) {
            continue;
        }
        deficit[v] -= 1;
        deficit[w] -= 1;
        edges.push(e);
        choose_partners(n, v, w, deficit, edges, planar_only, out);
        edges.pop();
        deficit[v] += 1;
        deficit[w] += 1;
    }
}

pub fn matchings(n: usize) -> Vec<CanonicalGraph> {
    regular_graphs(n, 1, false)
}

pub fn planar_matchings(n: usize) -> Vec<CanonicalGraph> {
    regular_graphs(n, 1, true)
}

pub fn degree_two_graphs(n: usize) -> Vec<CanonicalGraph> {
    regular_graphs(n, 2, false)
}

pub fn planar_graphs(n: usize, k: usize) -> Vec<CanonicalGraph> {
    regular_graphs(n, k, true)
}

/// Random `k`-regular loop-free multigraph by stub pairing (rejection on loops).
pub fn random_regular(n: usize, k: usize, rng: &mut impl rand::Rng) -> CanonicalGraph {
    assert!((n * k) % 2 == 0 && n >= 2);
    let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat(v as Vertex).take(k)).collect();
    loop {
        stubs.shuffle(rng);
        if stubs.chunks(2).all(|c| c[0] != c[1]) {
            let edges: EdgeList = stubs.chunks(2).map(|c| Edge(c[0].min(c[1]), c[0].max(c[1]))).collect();
            return CanonicalGraph::from_oriented(n, edges);
        }
    }
}

/// Random degree-two graph with prescribed cycle lengths (each >= 2).
pub fn random_with_cycle_type(n: usize, lengths: &[usize], rng: &mut impl rand::Rng) -> CanonicalGraph {
    assert_eq!(lengths.iter().sum::<usize>(), n);
    let mut perm: Vec<Vertex> = (0..n as Vertex).collect();
    perm.shuffle(rng);
    let mut edges = EdgeList::new();
    let mut pos = 0;
    for &l in lengths {
        let cyc = &perm[pos..pos + l];
        for i in 0..l {
            let a = cyc[i];
            let b = cyc[(i + 1) % l];
            edges.push(Edge(a.min(b), a.max(b)));
        }
        pos += l;
    }
    CanonicalGraph::from_oriented(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts() {
        assert_eq!(matchings(2).len(), 1);
        assert_eq!(planar_matchings(2).len(), 1);
        assert_eq!(matchings(6).len(), 15);
        assert_eq!(planar_matchings(6).len(), 5);
        assert_eq!(matchings(8).len(), 105);
        assert_eq!(planar_matchings(8).len(), 14);
        assert_eq!(planar_matchings(10).len(), 42);
    }

    #[test]
    fn degree_two_counts() {
        // labelled loop-free 2-regular multigraphs
        assert_eq!(degree_two_graphs(4).len(), 6);
        assert_eq!(degree_two_graphs(6).len(), 130);
        assert_eq!(degree_two_graphs(8).len(), 6202);
    }

    #[test]
    fn planar_degree_two_counts() {
        assert_eq!(planar_graphs(2, 2).len(), 1);
        assert_eq!(planar_graphs(4, 2).len(), 3);
        assert_eq!(planar_graphs(6, 2).len(), 15);
        assert_eq!(planar_graphs(8, 2).len(), 91);
    }

    #[test]
    fn planar_filter_agrees() {
        let all = regular_graphs(6, 2, false);
        let planar: Vec<_> = all.into_iter().filter(|g| g.is_planar()).collect();
        assert_eq!(planar, planar_graphs(6, 2));
    }

    #[test]
    fn random_cycle_type() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = random_with_cycle_type(10, &[3, 3, 4], &mut rng);
        let mut l = crate::graphs::cycle_decomposition(&g).unwrap().lengths();
        l.sort();
        assert_eq!(l, vec![3, 3, 4]);
    }
}
