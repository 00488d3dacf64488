use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

use pointring_core::algebra::identities::{verify_identity, IdentityName};
use pointring_core::algebra::{evaluate, straighten, PointAssignment};
use pointring_core::graphs::{cycle_decomposition, is_allowable};
use pointring_core::io::{vector_from_str, vector_to_json, GraphJson, PartitionedTermJson};
use pointring_core::lattice::elementary_divisors;
use pointring_core::partitions::{
    exchange_experiment, lift_merging_relation, merge_span_check, merging_relations, PieceStraightener, WTilde,
};
use pointring_core::quasiplanar::{
    enumerate_quasi_planar, graded_span_check, reduce_and_check, reduction_census, wprime_iso_check, LevelFiltration,
    Reducer,
};
use pointring_core::relspaces::{binomial_span, binomials, cubic_corank_n6, Spaces, TARGET_B, TARGET_I2};
use pointring_core::{ReductionTrace, SparseIntMatrix, Straightener};
use pointring_core::ring::Rationals;

use crate::cache::Cache;
use crate::report::{Claim, ClaimKind, Report};
use crate::{Command, Config, Gens, MatrixKind, Over};

fn check_n(n: usize, min: usize) -> Result<()> {
    if n % 2 != 0 {
        bail!("n must be even, got {n}");
    }
    if n < min {
        bail!("n must be at least {min}, got {n}");
    }
    Ok(())
}

fn check_primes(ps: &[u64]) -> Result<()> {
    for &p in ps {
        if p == 2 || !pointring_core::ring::is_prime(p) {
            bail!("{p} is not an odd prime");
        }
    }
    Ok(())
}

fn check_any_primes(ps: &[u64]) -> Result<()> {
    match ps.iter().find(|&&p| !pointring_core::ring::is_prime(p)) {
        Some(p) => bail!("{p} is not prime"),
        None => Ok(()),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

/// Run through the cache when the command is a pure function of its
/// arguments.
fn cached(
    cache: Option<&Cache>,
    command: &str,
    n: Option<usize>,
    key: String,
    compute: impl FnOnce() -> Result<Report>,
) -> Result<Report> {
    let key = format!("{command}|{key}");
    if let Some(c) = cache {
        if let Some(r) = c.load(command, n, &key)? {
            log::info!("cache hit for {command}");
            return Ok(r);
        }
    }
    let r = compute()?;
    if let Some(c) = cache {
        c.store(command, n, &key, &r)?;
    }
    Ok(r)
}

pub fn run(cmd: &Command, cfg: &Config, cache: Option<&Cache>) -> Result<Report> {
    let seed = cfg.seed;
    match cmd {
        Command::Dims { n } => {
            check_n(*n, 2)?;
            cached(cache, "dims", Some(*n), format!("{n}"), || dims(*n, seed))
        }
        Command::Straighten { input } => straighten_cmd(&read_input(input)?, seed),
        Command::Identities => cached(cache, "identities", None, format!("{seed}"), || identities(seed)),
        Command::Span { n, gens, over, primes } => {
            check_n(*n, 6)?;
            check_any_primes(primes)?;
            let exact = match over {
                Some(_) => true,
                None => primes.is_empty() && *n <= 8,
            };
            let primes = if primes.is_empty() && !exact { vec![3] } else { primes.clone() };
            let simplest = *gens == Gens::Simplest;
            let over_q = *over == Some(Over::Q);
            cached(
                cache,
                "span",
                Some(*n),
                format!("{n}|{simplest}|{exact}|{over_q}|{primes:?}|{}", cfg.memory_mb),
                || span(*n, simplest, exact, over_q, &primes, cfg.memory_mb, seed),
            )
        }
        Command::MergeSpan { n, primes } => {
            check_n(*n, 6)?;
            check_primes(primes)?;
            cached(cache, "merge-span", Some(*n), format!("{n}|{primes:?}"), || merge_span(*n, primes, seed))
        }
        Command::Wprime { n, primes } => {
            check_n(*n, 6)?;
            check_primes(primes)?;
            cached(cache, "wprime", Some(*n), format!("{n}|{primes:?}"), || wprime(*n, primes, seed))
        }
        Command::QpCensus { n } => {
            check_n(*n, 6)?;
            cached(cache, "qp-census", Some(*n), format!("{n}"), || qp_census(*n, seed))
        }
        Command::Reduce { input } => reduce(&read_input(input)?, seed),
        Command::ReduceCensus { n, types, random } => {
            check_n(*n, 10)?;
            let types = parse_types(*n, types)?;
            cached(cache, "reduce-census", Some(*n), format!("{n}|{types:?}|{random}|{seed}"), || {
                reduce_census(*n, &types, *random, seed)
            })
        }
        Command::Lift { input, merge } => lift(&read_input(input)?, merge.as_deref(), seed),
        Command::CubicN6 => cached(cache, "cubic-n6", Some(6), String::new(), || cubic(seed)),
        Command::Exchange { n, prime } => {
            check_n(*n, 12)?;
            check_primes(&[*prime])?;
            cached(cache, "exchange", Some(*n), format!("{n}|{prime}|{}", cfg.memory_mb), || {
                exchange(*n, *prime, cfg.memory_mb, seed)
            })
        }
        Command::Export { matrix, n, out } => {
            check_n(*n, 2)?;
            export(*matrix, *n, out, seed)
        }
    }
}

// ------------------------------------------------------------------ dims

fn double_factorial(n: usize) -> u128 {
    (1..n).step_by(2).map(|k| k as u128).product()
}

fn dims(n: usize, seed: u64) -> Result<Report> {
    let sp = Spaces::new(n)?;
    let levels = if n >= 6 { Some(LevelFiltration::new(n).counts) } else { None };
    let wtilde = if (6..=10).contains(&n) { Some(WTilde::new(n)?.len()) } else { None };
    let result = json!({
        "matchings": double_factorial(n),
        "planar_matchings": sp.dim_v(),
        "dim_v": sp.dim_v(),
        "dim_w": sp.dim_w(),
        "dim_sym2": sp.dim_sym2(),
        "dim_tensor": sp.dim_tensor(),
        "dim_wtilde": wtilde,
        "planar_graphs_by_level": levels,
    });
    let mut r = Report::new("dims", Some(n), seed, result);
    if n <= 8 {
        let d = elementary_divisors(&sp.mult_matrix());
        let units = d.iter().all(|x| x == &1.into());
        let full = d.len() == sp.dim_w();
        r = r.claim(
            Claim::new(
                "products of planar matchings span W over Z (Sym²V → W has unit elementary divisors)",
                ClaimKind::TheoremInstance,
                units && full,
            )
            .primes(&[0])
            .detail(json!({"rank": d.len(), "dim_w": sp.dim_w(), "nonunit": d.iter().filter(|x| *x != &1.into()).map(|x| x.to_string()).collect::<Vec<_>>()})),
        );
    }
    Ok(r)
}

// ------------------------------------------------------------------ straighten

fn straighten_cmd(text: &str, seed: u64) -> Result<Report> {
    let v = vector_from_str(text)?;
    let out = straighten(&v);
    let n = v.terms().next().map(|(g, _)| g.n());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut agree = true;
    let mut counter = None;
    if let Some(n) = n {
        for _ in 0..5 {
            let p = PointAssignment::random(n, 1000, &mut rng);
            let (a, b) = (evaluate(&v, &p)?, evaluate(&out, &p)?);
            if a != b {
                agree = false;
                counter = Some(json!({"point": format!("{p:?}"), "input": a.to_string(), "output": b.to_string()}));
                break;
            }
        }
    }
    let planar = out.is_planar_supported();
    let mut claim = Claim::new("straightened vector agrees with the input at 5 random points", ClaimKind::Check, agree)
        .primes(&[0]);
    if let Some(c) = counter {
        claim = claim.counterexample(c);
    }
    Ok(Report::new("straighten", n, seed, json!({"terms": out.len(), "vector": vector_to_json(&out)}))
        .claim(claim)
        .claim(Claim::new("output is supported on planar graphs", ClaimKind::Check, planar)))
}

// ------------------------------------------------------------------ identities

fn identities(seed: u64) -> Result<Report> {
    let reports: Vec<_> = IdentityName::ALL.iter().map(|&name| verify_identity(name, seed, 10, 5, 10)).collect();
    let passed = reports.iter().filter(|r| r.passed()).count();
    let mut r = Report::new(
        "identities",
        None,
        seed,
        json!({"passed": format!("{passed}/{}", reports.len()), "identities": reports}),
    );
    for rep in &reports {
        let mut c = Claim::new(
            format!("identity {} holds as a bracket identity and inside random hosts", rep.name),
            ClaimKind::TheoremInstance,
            rep.passed(),
        );
        if let Some(ce) = &rep.counterexample {
            c = c.counterexample(ce);
        }
        r = r.claim(c);
    }
    Ok(r)
}

// ------------------------------------------------------------------ span

fn span(n: usize, simplest: bool, exact: bool, over_q: bool, primes: &[u64], memory_mb: usize, seed: u64) -> Result<Report> {
    let sp = Spaces::new(n)?;
    // dense-ish integer elimination on dim(V⊗V) rows; downgrade past the budget
    let est_mb = sp.dim_tensor() * sp.dim_tensor() * 32 >> 20;
    let (exact, downgraded) = if exact && est_mb > memory_mb { (false, true) } else { (exact, false) };
    let primes: Vec<u64> = if downgraded && primes.is_empty() { vec![3, 5, 7] } else { primes.to_vec() };
    let rep = binomial_span(&sp, simplest, exact, &primes)?;
    let family = if simplest { "simplest" } else { "simple" };
    let mut r = Report::new("span", Some(n), seed, json!({"report": &rep, "downgraded_to_mod_p": downgraded}));
    if let Some(l) = rep.line(TARGET_I2) {
        let (claim, holds) = if over_q {
            (format!("{family} binomial relations span I^(2) over Q"), l.equal_over_q)
        } else if simplest {
            (format!("{family} binomial relations span I^(2) over Z[1/2]"), l.spans_away_from_two())
        } else {
            (format!("{family} binomial relations span I^(2) over Z"), l.equal_over_z)
        };
        let kind = if n == 8 { ClaimKind::TheoremInstance } else { ClaimKind::Exploratory };
        let verdict = if l.equal_over_z {
            "divisors all 1; spans over Z".to_string()
        } else if l.equal_over_q {
            format!("spans over Q; index divisible by {:?}", l.bad_primes)
        } else {
            "does not span over Q".to_string()
        };
        r = r.claim(Claim::new(claim, kind, holds).primes(&[0]).detail(json!({"verdict": verdict, "line": l})));
    }
    if let Some(l) = rep.line(TARGET_B) {
        r = r.claim(
            Claim::new(
                format!("{family} binomial relations span B = ker(V⊗V → W) over Z"),
                ClaimKind::Exploratory,
                l.equal_over_z,
            )
            .primes(&[0])
            .detail(l),
        );
    }
    for p in &primes {
        let lines: Vec<_> = rep.modular.iter().filter(|l| l.prime == *p).collect();
        for l in lines {
            // simplest relations are only claimed away from 2
            let claimed = l.target == TARGET_I2 && n >= 8 && !(simplest && *p == 2);
            let kind = if claimed { ClaimKind::TheoremInstance } else { ClaimKind::Exploratory };
            r = r.claim(
                Claim::new(
                    format!("{family} binomial relations have full rank in {} mod {p}", l.target),
                    kind,
                    l.generator_rank == l.target_rank,
                )
                .primes(&[*p])
                .detail(l),
            );
        }
    }
    Ok(r)
}

// ------------------------------------------------------------------ merging

fn merge_span(n: usize, primes: &[u64], seed: u64) -> Result<Report> {
    let exact = n <= 8;
    let rep = merge_span_check(n, primes, exact)?;
    let kind = if n >= 10 && n != 12 { ClaimKind::TheoremInstance } else { ClaimKind::Exploratory };
    let mut r = Report::new("merge-span", Some(n), seed, &rep);
    for l in &rep.lines {
        if l.prime == 0 {
            let bad = rep.bad_primes.clone().unwrap_or_default();
            let holds = l.spans && bad.iter().all(|&p| p == 2);
            r = r.claim(
                Claim::new("merging relations span Q over Z[1/2]", kind, holds)
                    .primes(&[0])
                    .detail(json!({"dim_q": l.dim_q, "merging_rank": l.merging_rank, "bad_primes": bad})),
            );
        } else {
            r = r.claim(
                Claim::new(format!("merging relations span Q mod {}", l.prime), kind, l.spans)
                    .primes(&[l.prime])
                    .detail(l),
            );
        }
    }
    Ok(r)
}

fn wprime(n: usize, primes: &[u64], seed: u64) -> Result<Report> {
    let rep = wprime_iso_check(n, primes)?;
    let kind = if n == 10 { ClaimKind::TheoremInstance } else { ClaimKind::Exploratory };
    let mut r = Report::new("wprime", Some(n), seed, &rep);
    for l in &rep.lines {
        r = r.claim(
            Claim::new("W′ → W is an isomorphism (equal dimensions)", kind, l.isomorphic).primes(&[l.prime]).detail(l),
        );
    }
    Ok(r)
}

fn exchange(n: usize, p: u64, memory_mb: usize, seed: u64) -> Result<Report> {
    let rep = exchange_experiment(n, p, memory_mb << 20)?;
    let holds = rep.outside_span == 0;
    Ok(Report::new("exchange", Some(n), seed, &rep).claim(
        Claim::new("odd cycle exchange relations lie in the merging span", ClaimKind::Exploratory, holds).primes(&[p]),
    ))
}

// ------------------------------------------------------------------ quasi-planar

fn qp_census(n: usize, seed: u64) -> Result<Report> {
    let census = enumerate_quasi_planar(n)?;
    let summary = census.summary();
    let graded = if n <= 10 { Some(graded_span_check(n, true)?) } else { None };
    let mut r = Report::new("qp-census", Some(n), seed, json!({"census": &summary, "graded": &graded}));
    if n == 6 {
        let orbits = census.empty_orbits();
        r = r.claim(
            Claim::new(
                "exactly one planar graph (up to rotation and reflection) has no allowable quasi-planar graph associated",
                ClaimKind::TheoremInstance,
                orbits.len() == 1,
            )
            .detail(json!({"orbits": summary.empty_orbits, "labelled": summary.empty_classes})),
        );
    } else {
        r = r.claim(
            Claim::new(
                "every planar graph is associated to an allowable quasi-planar graph",
                ClaimKind::TheoremInstance,
                census.empty_classes().is_empty(),
            )
            .detail(json!({"classes_with_representative": summary.classes_with_representative, "planar": summary.planar_graphs}))
            .counterexample_if(!census.empty_classes().is_empty(), &summary.empty_classes),
        );
    }
    if let Some(g) = &graded {
        r = r.claim(
            Claim::new(
                "X_Γ ≡ ±2 X_Γ′ modulo F^{i+1} W for every non-planar allowable quasi-planar Γ",
                ClaimKind::TheoremInstance,
                g.verified == g.classes,
            )
            .primes(&[0])
            .detail(json!({"classes": g.classes, "verified": g.verified}))
            .counterexample_if(!g.failures.is_empty(), &g.failures),
        );
        r = r.claim(
            Claim::new(
                "doubled-edge moves connect level-1 and odd level-2 classes where they apply",
                ClaimKind::Exploratory,
                g.move_connected == g.move_checked,
            )
            .detail(json!({"checked": g.move_checked, "connected": g.move_connected})),
        );
    }
    Ok(r)
}

fn reduce(text: &str, seed: u64) -> Result<Report> {
    let gj: GraphJson = serde_json::from_str(text)?;
    let g = gj.to_graph()?;
    check_n(g.n(), 10)?;
    if g.degree() != Some(2) {
        bail!("{g} is not of degree two");
    }
    if !is_allowable(&g)? {
        bail!("{g} is forbidden (connected or two odd cycles)");
    }
    let r = Reducer::new();
    let mut trace = ReductionTrace::recording();
    let red = r.reduce(&g, &mut trace)?;
    let w = Straightener::with_memo(Rationals);
    let chk = reduce_and_check(&r, &g, &w)?;
    let cycles = cycle_decomposition(&g)?.lengths();
    let result = json!({
        "graph": g.to_string(),
        "cycles": cycles,
        "case": red.case,
        "vector": vector_to_json(&red.vector),
        "trace": trace.lines(),
        "check": &chk,
    });
    let mut claim = Claim::new(
        "reduction uses allowable moves only, has dyadic coefficients and projects to X_Γ in W",
        ClaimKind::Check,
        chk.passed(),
    )
    .primes(&[0]);
    if !chk.passed() {
        claim = claim.counterexample(&chk);
    }
    Ok(Report::new("reduce", Some(g.n()), seed, result).claim(claim))
}

fn parse_types(n: usize, types: &[String]) -> Result<Vec<Vec<usize>>> {
    if types.is_empty() {
        return Ok(default_cycle_types());
    }
    types
        .iter()
        .map(|t| {
            let v: Vec<usize> =
                t.split('+').map(|x| x.trim().parse::<usize>()).collect::<Result<_, _>>().context("cycle type")?;
            if v.iter().sum::<usize>() != n || v.iter().any(|&l| l < 2) {
                bail!("cycle type {t} does not describe a degree-two graph on {n} vertices");
            }
            Ok(v)
        })
        .collect()
}

/// The allowable cycle types swept exhaustively by default.
pub fn default_cycle_types() -> Vec<Vec<usize>> {
    vec![vec![3, 3, 4], vec![2, 2, 3, 3], vec![2, 4, 4], vec![4, 6], vec![2, 3, 5], vec![2, 2, 2, 4]]
}

fn reduce_census(n: usize, types: &[Vec<usize>], random: usize, seed: u64) -> Result<Report> {
    let rep = reduction_census(n, types, random, seed, 20_000)?;
    let mut claim = Claim::new(
        "every reduction is sound in W, uses no forbidden move and has only powers of 2 in denominators",
        ClaimKind::TheoremInstance,
        rep.passed() && rep.forbidden_moves == 0,
    )
    .primes(&[0]);
    if !rep.failures.is_empty() {
        claim = claim.counterexample(&rep.failures);
    }
    Ok(Report::new("reduce-census", Some(n), seed, &rep).claim(claim))
}

#[derive(Serialize)]
struct LiftLine {
    merged: [usize; 2],
    coarser: Vec<Vec<u8>>,
    terms: usize,
    expansions: usize,
    in_p: bool,
    round_trip: bool,
}

fn lift(text: &str, merge: Option<&[usize]>, seed: u64) -> Result<Report> {
    let tj: PartitionedTermJson = serde_json::from_str(text)?;
    let term = tj.to_term()?;
    let k = term.partition.len();
    if k < 3 {
        bail!("merging needs a partition with at least three pieces");
    }
    let pairs: Vec<(usize, usize)> = match merge {
        Some([i, j]) if i != j && *i < k && *j < k => vec![(*i.min(j), *i.max(j))],
        Some(_) => bail!("--merge needs two distinct piece indices below {k}"),
        None => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
    };
    let ps = PieceStraightener::new();
    let mut lines = Vec::new();
    for (i, j) in pairs {
        let coarser = term.partition.merge(i, j);
        let l = lift_merging_relation(&ps, &term.graph, &term.partition, &coarser)?;
        lines.push(LiftLine {
            merged: [i, j],
            coarser: coarser.pieces().to_vec(),
            terms: l.terms.len(),
            expansions: l.expansions,
            in_p: l.in_p,
            round_trip: l.round_trip,
        });
    }
    let ok = lines.iter().all(|l| l.in_p && l.round_trip);
    Ok(Report::new("lift", Some(term.graph.n()), seed, json!({"term": tj, "lifts": &lines})).claim(
        Claim::new(
            "each merging relation lifts to colored terms that vanish in V⊗V and map back to it",
            ClaimKind::TheoremInstance,
            ok,
        ),
    ))
}

fn cubic(seed: u64) -> Result<Report> {
    let rep = cubic_corank_n6()?;
    let holds = rep.corank == 1;
    Ok(Report::new("cubic-n6", Some(6), seed, &rep).claim(
        Claim::new("the quadrics miss exactly one cubic relation at six points", ClaimKind::TheoremInstance, holds)
            .primes(&[0]),
    ))
}

// ------------------------------------------------------------------ export

fn export(kind: MatrixKind, n: usize, out: &Path, seed: u64) -> Result<Report> {
    let m: SparseIntMatrix = match kind {
        MatrixKind::Mult => Spaces::new(n)?.mult_matrix(),
        MatrixKind::Tensor => Spaces::new(n)?.tensor_matrix(),
        MatrixKind::Simple => binomials(&Spaces::new(n)?, false)?.matrix(),
        MatrixKind::Simplest => binomials(&Spaces::new(n)?, true)?.matrix(),
        MatrixKind::WtildeToW => WTilde::new(n)?.to_w(&Spaces::new(n)?),
        MatrixKind::Merging => {
            let wt = WTilde::new(n)?;
            SparseIntMatrix::from_columns(wt.len(), merging_relations(&wt, &PieceStraightener::new()))
        }
    };
    let text = m.to_sms();
    fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
    let back = SparseIntMatrix::from_sms(&text)?;
    Ok(Report::new(
        "export",
        Some(n),
        seed,
        json!({"matrix": format!("{kind:?}"), "rows": m.rows(), "cols": m.cols(), "nnz": m.nnz(), "path": out.display().to_string()}),
    )
    .claim(Claim::new("sparse text round-trips exactly", ClaimKind::Check, back == m)))
}

trait ClaimExt {
    fn counterexample_if(self, cond: bool, c: impl Serialize) -> Self;
}

impl ClaimExt for Claim {
    fn counterexample_if(self, cond: bool, c: impl Serialize) -> Self {
        if cond {
            self.counterexample(c)
        } else {
            self
        }
    }
}
