//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runtime targets are part of each criterion.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pointring_core::algebra::identities::{verify_identity, IdentityName};
use pointring_core::algebra::{evaluate, straighten, PointAssignment};
use pointring_core::lattice::elementary_divisors;
use pointring_core::partitions::merge_span_check;
use pointring_core::quasiplanar::{enumerate_quasi_planar, reduction_census, two_comparison, wprime_iso_check};
use pointring_core::relspaces::{binomial_span, cubic_corank_n6, Spaces, TARGET_B, TARGET_I2};
use pointring_core::{canonicalize, enumerate, Edge, GraphVector, Rationals, Straightener};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let dt = t.elapsed();
    let in_time = dt <= budget;
    let pass = o.pass && in_time;
    let time = if in_time {
        format!("{:.1} s", dt.as_secs_f64())
    } else {
        format!("{:.1} s, over the {} s target", dt.as_secs_f64(), budget.as_secs())
    };
    println!("criterion {id:>2}: {} {title}: {} ({time})", if pass { "PASS" } else { "FAIL" }, o.detail);
    pass
}

fn random_vector(rng: &mut ChaCha8Rng) -> GraphVector<Rationals> {
    let n = [4, 6, 8, 10][rng.gen_range(0..4)];
    let k = rng.gen_range(1..=3);
    let terms = rng.gen_range(1..=8);
    let mut v = GraphVector::zero(Rationals);
    for _ in 0..terms {
        let g = enumerate::random_regular(n, k, rng);
        // random orientation so signs are exercised
        let edges: Vec<Edge> = g
            .to_pairs()
            .into_iter()
            .map(|[a, b]| if rng.gen() { Edge(a, b) } else { Edge(b, a) })
            .collect();
        let c = BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=4)));
        if let Some(sg) = canonicalize(n, &edges).unwrap() {
            v.add_signed(&sg, &c);
        }
    }
    v
}

fn straightening() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut ok, mut planar) = (0, 0);
    for _ in 0..1000 {
        let v = random_vector(&mut rng);
        let out = straighten(&v);
        planar += out.is_planar_supported() as usize;
        let Some(n) = v.n() else {
            ok += out.is_zero() as usize;
            continue;
        };
        let agree = (0..5).all(|_| {
            let p = PointAssignment::random(n, 50, &mut rng);
            evaluate(&v, &p).unwrap() == evaluate(&out, &p).unwrap()
        });
        ok += agree as usize;
    }
    outcome(ok == 1000 && planar == 1000, format!("{ok}/1000 agree at 5 points, {planar}/1000 planar-supported"))
}

fn identities() -> Outcome {
    let reports: Vec<_> = IdentityName::ALL.iter().map(|&id| verify_identity(id, 11, 10, 5, 10)).collect();
    let passed: Vec<String> = reports.iter().filter(|r| r.passed()).map(|r| r.name.to_string()).collect();
    outcome(passed.len() == reports.len(), format!("{}/{} ({})", passed.len(), reports.len(), passed.join(", ")))
}

fn kempe() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [4, 6, 8] {
        let sp = Spaces::new(n).unwrap();
        let d = elementary_divisors(&sp.mult_matrix());
        let good = d.len() == sp.dim_w() && d.iter().all(|x| *x == BigInt::from(1));
        pass &= good;
        parts.push(format!("n={n}: rank {}/{}{}", d.len(), sp.dim_w(), if good { ", divisors 1" } else { ", NONUNIT" }));
    }
    outcome(pass, parts.join("; "))
}

fn spanning_n8() -> Outcome {
    let sp = Spaces::new(8).unwrap();
    let simple = binomial_span(&sp, false, true, &[]).unwrap();
    let simplest = binomial_span(&sp, true, true, &[]).unwrap();
    let b = simple.line(TARGET_B).unwrap();
    let bs = simplest.line(TARGET_B).unwrap();
    let i2 = simple.line(TARGET_I2).unwrap();
    let i2s = simplest.line(TARGET_I2).unwrap();
    let simple_ok = b.equal_over_z;
    let simplest_ok = bs.spans_away_from_two();
    let show = |l: &pointring_core::relspaces::SpanLine| {
        if l.nonunit_divisors.is_empty() {
            "all divisors 1".to_string()
        } else {
            format!("divisors ≠ 1: {}", l.nonunit_divisors.join(","))
        }
    };
    outcome(
        simple_ok && simplest_ok,
        format!(
            "simple vs B_8: {} [{}]; simplest vs B_8: {} [{}]; for comparison in Sym²: simple vs I2_8 {}, simplest vs I2_8 {}",
            show(b),
            if simple_ok { "ok" } else { "needs all 1" },
            show(bs),
            if simplest_ok { "ok" } else { "needs powers of 2" },
            show(i2),
            show(i2s),
        ),
    )
}

fn cubic() -> Outcome {
    let r = cubic_corank_n6().unwrap();
    outcome(r.corank == 1, format!("corank {} (dim I3 {}, image of V⊗I2 {})", r.corank, r.dim_i3, r.image_rank))
}

fn census() -> Outcome {
    let mut parts = Vec::new();
    let c6 = enumerate_quasi_planar(6).unwrap();
    let orbits = c6.empty_orbits().len();
    let labelled = c6.empty_classes().len();
    let mut pass = orbits == 1;
    parts.push(format!("n=6: {orbits} planar graph up to rotation/reflection without preimage ({labelled} labelled)"));
    for n in [8, 10] {
        let c = enumerate_quasi_planar(n).unwrap();
        let s = c.summary();
        let good = c.empty_classes().is_empty() && s.classes_with_representative == s.planar_graphs;
        pass &= good;
        parts.push(format!(
            "n={n}: {} empty, {}/{} classes represented",
            c.empty_classes().len(),
            s.classes_with_representative,
            s.planar_graphs
        ));
    }
    outcome(pass, parts.join("; "))
}

fn merging_and_wprime() -> (Outcome, Outcome) {
    let m = merge_span_check(10, &[3, 5, 7], false).unwrap();
    let lines: Vec<String> =
        m.lines.iter().map(|l| format!("F_{}: {}/{}", l.prime, l.merging_rank, l.dim_q)).collect();
    let ok7 = m.lines.len() == 3 && m.lines.iter().all(|l| l.spans && l.merging_rank == l.dim_q);
    let w = wprime_iso_check(10, &[3]).unwrap();
    let l = &w.lines[0];
    let ok8 = l.prime == 3 && l.isomorphic && l.dim_w1 == l.dim_w;
    (
        outcome(ok7, format!("rank(merging) = dim Q_10: {}", lines.join(", "))),
        outcome(ok8, format!("F_3: dim W′ = {}, dim W = {}", l.dim_w1, l.dim_w)),
    )
}

fn reduction() -> Outcome {
    let types = vec![vec![3, 3, 4], vec![2, 2, 3, 3], vec![2, 4, 4], vec![4, 6], vec![2, 3, 5], vec![2, 2, 2, 4]];
    let r = reduction_census(10, &types, 10_000, 7, 20_000).unwrap();
    let exhaustive: usize = r.types.iter().map(|t| t.graphs).sum();
    let passed: usize = r.types.iter().map(|t| t.passed).sum();
    outcome(
        r.passed() && r.forbidden_moves == 0,
        format!(
            "exhaustive {passed}/{exhaustive} over {} cycle types, random {}/{}, forbidden moves {}, max denominator {}",
            r.types.len(),
            r.random_passed,
            r.random,
            r.forbidden_moves,
            r.max_denominator
        ),
    )
}

fn graded() -> Outcome {
    let c = enumerate_quasi_planar(8).unwrap();
    let w = Straightener::with_memo(Rationals);
    let (mut total, mut ok) = (0, 0);
    for class in &c.classes {
        for g in class.members.iter().filter(|g| !g.is_planar()) {
            total += 1;
            ok += two_comparison(g, &w).map(|x| x.certified).unwrap_or(false) as usize;
        }
    }
    outcome(total > 0 && ok == total, format!("{ok}/{total} non-planar allowable quasi-planar graphs certified"))
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut results = Vec::new();
    results.push(run(1, "straightening soundness", Duration::from_secs(60), straightening));
    results.push(run(2, "identity suite", Duration::from_secs(10), identities));
    results.push(run(3, "Kempe degree-two generation", min(5), kempe));
    results.push(run(4, "n=8 spanning by binomial relations", min(30), spanning_n8));
    results.push(run(5, "n=6 cubic exception", min(5), cubic));
    results.push(run(6, "quasi-planar census", min(10), census));
    let t = Instant::now();
    let (c7, c8) = merging_and_wprime();
    let dt = t.elapsed();
    let in_time = dt <= min(240);
    for (id, title, o) in [(7, "merging relations span Q at n=10", c7), (8, "W′ ≅ W at n=10", c8)] {
        let pass = o.pass && in_time;
        println!(
            "criterion {id:>2}: {} {title}: {} ({:.1} s, shared run)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64()
        );
        results.push(pass);
    }
    results.push(run(9, "reduction engine soundness at n=10", min(60), reduction));
    results.push(run(10, "±2 graded comparison at n=8", min(10), graded));
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
