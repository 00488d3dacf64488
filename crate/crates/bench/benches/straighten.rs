use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use pointring_bench::{random_allowable, random_graphs, raw_edge_lists};
use pointring_core::lattice::rank_mod_p;
use pointring_core::quasiplanar::Reducer;
use pointring_core::relspaces::Spaces;
use pointring_core::{canonicalize, GraphVector, Rationals, ReductionTrace, Straightener};

fn canonical(c: &mut Criterion) {
    let lists = raw_edge_lists(12, 3, 256, 1);
    c.bench_function("canonicalize 256 cubic graphs n=12", |b| {
        b.iter(|| {
            for es in &lists {
                black_box(canonicalize(12, es).unwrap());
            }
        })
    });
}

fn straighten(c: &mut Criterion) {
    let mut g = c.benchmark_group("straighten");
    g.sample_size(10);
    for (n, k) in [(8, 2), (10, 2), (8, 3)] {
        let graphs = random_graphs(n, k, 32, 2);
        g.bench_function(format!("32 graphs n={n} k={k}, cold memo"), |b| {
            b.iter_batched(
                || Straightener::with_memo(Rationals),
                |s| {
                    for x in &graphs {
                        black_box(s.straighten(&GraphVector::from_graph(Rationals, x.clone())));
                    }
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn reduce(c: &mut Criterion) {
    let graphs = random_allowable(10, 16, 3);
    let mut g = c.benchmark_group("reduce");
    g.sample_size(10);
    g.bench_function("16 allowable graphs n=10", |b| {
        b.iter_batched(
            Reducer::new,
            |r| {
                for x in &graphs {
                    black_box(r.reduce(x, &mut ReductionTrace::silent()).unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn ranks(c: &mut Criterion) {
    let m = Spaces::new(10).unwrap().tensor_matrix();
    let mut g = c.benchmark_group("rank");
    g.sample_size(10);
    g.bench_function("V⊗V → W mod 3, n=10", |b| b.iter(|| black_box(rank_mod_p(&m, 3))));
    g.finish();
}

criterion_group!(benches, canonical, straighten, reduce, ranks);
criterion_main!(benches);
