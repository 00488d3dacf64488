use pointring_core::enumerate;
use pointring_core::lattice::elementary_divisors;
use pointring_core::partitions::WTilde;
use pointring_core::quasiplanar::{enumerate_quasi_planar, LevelFiltration};
use pointring_core::relspaces::{binomial_span, cubic_corank_n6, Spaces, TARGET_I2};

fn catalan(k: usize) -> usize {
    (0..k).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

#[test]
fn planar_matchings_are_catalan() {
    for h in 1..=6 {
        assert_eq!(enumerate::planar_matchings(2 * h).len(), catalan(h), "n = {}", 2 * h);
    }
    assert_eq!(enumerate::matchings(8).len(), 105);
}

#[test]
fn dimensions_of_degree_two() {
    for (n, v, w) in [(4, 2, 3), (6, 5, 15), (8, 14, 91), (10, 42, 603)] {
        let sp = Spaces::new(n).unwrap();
        assert_eq!((sp.dim_v(), sp.dim_w()), (v, w), "n = {n}");
        assert_eq!(sp.dim_sym2(), v * (v + 1) / 2);
        assert_eq!(sp.dim_tensor(), v * v);
    }
}

#[test]
fn level_filtration_counts_planar_graphs() {
    for n in [6, 8, 10] {
        let f = LevelFiltration::new(n);
        let total: usize = f.counts.values().sum();
        assert_eq!(total, Spaces::new(n).unwrap().dim_w());
    }
}

#[test]
fn products_generate_w() {
    for n in [4, 6, 8] {
        let sp = Spaces::new(n).unwrap();
        let d = elementary_divisors(&sp.mult_matrix());
        assert_eq!(d.len(), sp.dim_w());
        assert!(d.iter().all(|x| *x == 1.into()));
    }
}

#[test]
fn simple_binomials_span_symmetric_relations_at_eight() {
    let sp = Spaces::new(8).unwrap();
    let r = binomial_span(&sp, false, true, &[3]).unwrap();
    let l = r.line(TARGET_I2).unwrap();
    assert_eq!(l.target_rank, 14);
    assert!(l.equal_over_z);
}

#[test]
fn one_cubic_at_six() {
    assert_eq!(cubic_corank_n6().unwrap().corank, 1);
}

#[test]
fn wtilde_sizes() {
    assert_eq!(WTilde::new(6).unwrap().len(), 60);
    assert_eq!(WTilde::new(8).unwrap().len(), 1470);
}

#[test]
fn census_has_a_representative_for_each_planar_graph_at_eight() {
    let c = enumerate_quasi_planar(8).unwrap();
    let s = c.summary();
    assert_eq!(s.planar_graphs, 91);
    assert_eq!(s.classes_with_representative, 91);
    assert!(c.empty_classes().is_empty());
}
