use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pointring_core::algebra::{evaluate, evaluate_graph, pluecker_split, straighten, PointAssignment};
use pointring_core::io::{vector_from_str, vector_to_json};
use pointring_core::lattice::{rank_mod_p, ModpEchelon};
use pointring_core::{canonicalize, enumerate, CanonicalGraph, Edge, GraphVector, Rationals, SparseIntMatrix};

/// A random k-regular graph on n vertices (n even) as raw edges in random
/// orientation and order.
fn raw_graph() -> impl Strategy<Value = (usize, Vec<Edge>)> {
    (2usize..=5, 1usize..=3, any::<u64>()).prop_map(|(h, k, seed)| {
        let n = 2 * h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = enumerate::random_regular(n, k, &mut rng);
        let mut es: Vec<Edge> = g.to_pairs().into_iter().map(|[a, b]| Edge(a, b)).collect();
        use rand::seq::SliceRandom;
        use rand::Rng;
        es.shuffle(&mut rng);
        for e in es.iter_mut() {
            if rng.gen() {
                *e = Edge(e.1, e.0);
            }
        }
        (n, es)
    })
}

fn points(n: usize, seed: u64) -> PointAssignment {
    PointAssignment::random(n, 40, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_preserves_the_bracket_value((n, es) in raw_graph(), seed in any::<u64>()) {
        let p = points(n, seed);
        let raw: BigRational = es.iter().map(|e| p.bracket(e.0, e.1)).product();
        let sg = canonicalize(n, &es).unwrap().unwrap();
        prop_assert_eq!(raw, evaluate_graph(&sg.graph, &p) * BigInt::from(sg.sign));
    }

    #[test]
    fn canonical_form_ignores_edge_order((n, es) in raw_graph()) {
        let mut rev = es.clone();
        rev.reverse();
        prop_assert_eq!(canonicalize(n, &es).unwrap(), canonicalize(n, &rev).unwrap());
    }

    #[test]
    fn straightening_is_sound_and_idempotent((n, es) in raw_graph(), seed in any::<u64>()) {
        let sg = canonicalize(n, &es).unwrap().unwrap();
        let v = GraphVector::from_signed(Rationals, &sg);
        let s = straighten(&v);
        prop_assert!(s.is_planar_supported());
        let p = points(n, seed);
        prop_assert_eq!(evaluate(&v, &p).unwrap(), evaluate(&s, &p).unwrap());
        prop_assert_eq!(straighten(&s), s);
    }

    #[test]
    fn pluecker_split_is_an_identity((n, es) in raw_graph(), seed in any::<u64>()) {
        let g = canonicalize(n, &es).unwrap().unwrap().graph;
        if let Some((i, j)) = g.first_crossing() {
            let (a, b) = pluecker_split(&g, i, j).unwrap();
            let p = points(n, seed);
            let rhs = evaluate_graph(&a.graph, &p) * BigInt::from(a.sign) + evaluate_graph(&b.graph, &p) * BigInt::from(b.sign);
            prop_assert_eq!(evaluate_graph(&g, &p), rhs);
            prop_assert!(a.graph.potential() < g.potential() && b.graph.potential() < g.potential());
        }
    }

    #[test]
    fn vector_json_round_trips((n, es) in raw_graph(), c in -50i64..50) {
        let sg = canonicalize(n, &es).unwrap().unwrap();
        let mut v = GraphVector::zero(Rationals);
        v.add_signed(&sg, &BigRational::new(c.into(), 3.into()));
        let text = serde_json::to_string(&vector_to_json(&v)).unwrap();
        prop_assert_eq!(vector_from_str(&text).unwrap(), v);
    }

    #[test]
    fn echelon_rank_matches_matrix_rank(cols in proptest::collection::vec(proptest::collection::vec((0usize..12, -4i64..5), 0..6), 1..20)) {
        let vecs: Vec<pointring_core::lattice::IntVec> = cols
            .iter()
            .map(|c| {
                let mut m = std::collections::BTreeMap::new();
                for &(i, x) in c {
                    *m.entry(i).or_insert(BigInt::from(0)) += x;
                }
                m.into_iter().filter(|(_, x)| *x != BigInt::from(0)).collect()
            })
            .collect();
        let m = SparseIntMatrix::from_columns(12, vecs.clone());
        let mut e = ModpEchelon::new(12, 5);
        for v in &vecs {
            let r: Vec<(usize, u64)> = v.iter().map(|(i, x)| (*i, u64::try_from((x % 5 + 5) % 5).unwrap())).collect();
            e.insert(&r);
        }
        prop_assert_eq!(e.rank(), rank_mod_p(&m, 5));
    }
}

#[test]
fn loops_kill_graphs() {
    assert!(canonicalize(4, &[Edge(0, 0), Edge(1, 2), Edge(2, 3), Edge(1, 3)]).unwrap().is_none());
    assert!(canonicalize(4, &[Edge(0, 0), Edge(1, 2)]).is_err());
}

#[test]
fn single_crossing_splits_into_two_planar_matchings() {
    let g = CanonicalGraph::from_pairs(4, &[(0, 2), (1, 3)]).unwrap();
    let s = straighten(&GraphVector::from_graph(Rationals, g));
    assert_eq!(s.len(), 2);
    assert!(s.is_planar_supported());
}
