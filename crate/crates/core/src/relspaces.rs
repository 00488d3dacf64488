//! Degree-one and degree-two pieces of the ring: V, W, V⊗V, Sym²V, the
//! multiplication maps and their kernels, the binomial generator families and
//! outer multiplication.
//!
//! V is coordinatized by planar matchings (a Z-basis), W by planar degree-two
//! graphs. Every matching or graph is brought to coordinates by straightening.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GraphVector, Straightener};
use crate::enumerate;
use crate::error::{Error, GraphError, Result};
use crate::graphs::{canonicalize_partial, cycle_decomposition, CanonicalGraph, Edge, EdgeList, Vertex};
use crate::lattice::{kernel_saturated, rank_mod_p, span_analysis, IntVec, LatticeBasis, SparseIntMatrix};
use crate::ring::{Integers, Ring};

/// Stable bijection between a set of graphs and coordinates `0..len`.
#[derive(Clone, Debug)]
pub struct BasisIndex {
    graphs: Vec<CanonicalGraph>,
    index: HashMap<CanonicalGraph, usize>,
}

impl BasisIndex {
    pub fn new(mut graphs: Vec<CanonicalGraph>) -> Self {
        graphs.sort();
        graphs.dedup();
        let index = graphs.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        BasisIndex { graphs, index }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn position(&self, g: &CanonicalGraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn graph(&self, i: usize) -> &CanonicalGraph {
        &self.graphs[i]
    }

    pub fn graphs(&self) -> &[CanonicalGraph] {
        &self.graphs
    }

    /// Coordinates of a planar-supported vector.
    pub fn coords(&self, v: &GraphVector<Integers>) -> IntVec {
        v.terms()
            .map(|(g, c)| {
                let i = self
                    .position(g)
                    .unwrap_or_else(|| panic!("{g} is not in the basis"));
                (i, c.clone())
            })
            .collect()
    }
}

fn check_even(n: usize, what: &'static str) -> Result<()> {
    if n % 2 != 0 {
        return Err(GraphError::OddVertexCount(what, n).into());
    }
    if n < 2 {
        return Err(GraphError::BadVertexCount(n).into());
    }
    Ok(())
}

pub fn matchings(n: usize) -> Result<Vec<CanonicalGraph>> {
    check_even(n, "matchings")?;
    Ok(enumerate::matchings(n))
}

pub fn planar_matchings(n: usize) -> Result<Vec<CanonicalGraph>> {
    check_even(n, "matchings")?;
    Ok(enumerate::planar_matchings(n))
}

/// All planar degree-`k` graphs, `k ∈ {1, 2, 3}`.
pub fn planar_basis(n: usize, k: usize) -> Result<BasisIndex> {
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedDegree(k));
    }
    if (n * k) % 2 != 0 {
        return Err(GraphError::OddVertexCount("regular graphs of odd degree", n).into());
    }
    if n < 2 {
        return Err(GraphError::BadVertexCount(n).into());
    }
    Ok(BasisIndex::new(enumerate::planar_graphs(n, k)))
}

/// The degree-one and degree-two data for one `n`, with a shared memo.
pub struct Spaces {
    pub n: usize,
    pub v: BasisIndex,
    pub w: BasisIndex,
    pub st: Straightener<Integers>,
    sym2: Vec<(usize, usize)>,
    sym2_pos: HashMap<(usize, usize), usize>,
}

impl Spaces {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n, "degree-one space")?;
        let v = planar_basis(n, 1)?;
        let w = planar_basis(n, 2)?;
        let m = v.len();
        let sym2: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let sym2_pos = sym2.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Ok(Spaces { n, v, w, st: Straightener::with_memo(Integers), sym2, sym2_pos })
    }

    pub fn dim_v(&self) -> usize {
        self.v.len()
    }

    pub fn dim_w(&self) -> usize {
        self.w.len()
    }

    pub fn dim_sym2(&self) -> usize {
        self.sym2.len()
    }

    pub fn dim_tensor(&self) -> usize {
        self.v.len() * self.v.len()
    }

    pub fn sym2_pair(&self, k: usize) -> (usize, usize) {
        self.sym2[k]
    }

    pub fn sym2_position(&self, i: usize, j: usize) -> usize {
        self.sym2_pos[&(i.min(j), i.max(j))]
    }

    pub fn tensor_position(&self, i: usize, j: usize) -> usize {
        i * self.v.len() + j
    }

    /// Coordinates in V of any matching (straightened).
    pub fn v_coords(&self, g: &CanonicalGraph) -> IntVec {
        self.v.coords(&self.st.straighten_graph(g))
    }

    /// Coordinates in W of any degree-two graph (straightened).
    pub fn w_coords(&self, g: &CanonicalGraph) -> IntVec {
        self.w.coords(&self.st.straighten_graph(g))
    }

    pub fn w_coords_vec(&self, v: &GraphVector<Integers>) -> IntVec {
        self.w.coords(&self.st.straighten(v))
    }

    /// Product of two planar matchings in W.
    fn product(&self, i: usize, j: usize) -> IntVec {
        self.w_coords(&self.v.graph(i).union(self.v.graph(j)))
    }

    /// Sym²V → W, one column per unordered pair of planar matchings.
    pub fn mult_matrix(&self) -> SparseIntMatrix {
        let cols: Vec<IntVec> = self.sym2.par_iter().map(|&(i, j)| self.product(i, j)).collect();
        SparseIntMatrix::from_columns(self.dim_w(), cols)
    }

    /// V⊗V → W, column `i*m + j` for the pure tensor `e_i ⊗ e_j`.
    pub fn tensor_matrix(&self) -> SparseIntMatrix {
        let m = self.dim_v();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        let cols: Vec<IntVec> = pairs.par_iter().map(|&(i, j)| self.product(i, j)).collect();
        SparseIntMatrix::from_columns(self.dim_w(), cols)
    }

    /// V⊗V → Sym²V.
    pub fn symmetrize(&self, t: &IntVec) -> IntVec {
        let m = self.dim_v();
        let mut out = IntVec::new();
        for (k, c) in t {
            let p = self.sym2_position(k / m, k % m);
            *out.entry(p).or_insert_with(BigInt::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `a ⊗ b` for coordinate vectors in V.
    pub fn tensor(&self, a: &IntVec, b: &IntVec) -> IntVec {
        let mut out = IntVec::new();
        for (i, x) in a {
            for (j, y) in b {
                out.insert(self.tensor_position(*i, *j), x * y);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct RelationKernels {
    /// kernel of V⊗V → W
    pub b: LatticeBasis,
    /// kernel of Sym²V → W
    pub i2: LatticeBasis,
}

pub fn relation_kernels(sp: &Spaces) -> RelationKernels {
    RelationKernels {
        b: kernel_saturated(&sp.tensor_matrix()),
        i2: kernel_saturated(&sp.mult_matrix()),
    }
}

/// Where a simple binomial relation came from.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BinomialSource {
    pub u: [Vertex; 4],
    pub delta: [Vec<[Vertex; 2]>; 2],
    pub gamma: [Vec<[Vertex; 2]>; 2],
}

/// Generator columns with provenance; `raw_count` is before deduplication.
#[derive(Clone, Debug)]
pub struct GeneratorFamily {
    pub columns: Vec<IntVec>,
    pub sources: Vec<BinomialSource>,
    pub raw_count: usize,
    pub ambient: usize,
}

impl GeneratorFamily {
    pub fn matrix(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_columns(self.ambient, self.columns.clone())
    }
}

/// The three perfect matchings of a 4-set `a<b<c<d`.
fn four_set_matchings(u: [Vertex; 4]) -> [[Edge; 2]; 3] {
    let [a, b, c, d] = u;
    [
        [Edge(a, b), Edge(c, d)],
        [Edge(a, c), Edge(b, d)],
        [Edge(a, d), Edge(b, c)],
    ]
}

fn union_matching(n: usize, parts: &[&[Edge]]) -> CanonicalGraph {
    let mut edges = EdgeList::new();
    for p in parts {
        edges.extend_from_slice(p);
    }
    let sg = canonicalize_partial(n, &edges).expect("labels in range").expect("matching has no loop");
    debug_assert_eq!(sg.sign, 1);
    sg.graph
}

fn is_simplest(n: usize, g1: &[Edge], g2: &[Edge], rest: &[Vertex]) -> bool {
    // Γ∪Γ' on the complement: exactly one 4-cycle, the rest 2-cycles
    let map: HashMap<Vertex, Vertex> = rest.iter().enumerate().map(|(k, &v)| (v, k as Vertex)).collect();
    let edges: Vec<(Vertex, Vertex)> = g1
        .iter()
        .chain(g2.iter())
        .map(|e| (map[&e.0], map[&e.1]))
        .collect();
    let g = CanonicalGraph::from_pairs(rest.len(), &edges).expect("complement graph");
    let _ = n;
    let mut lens = cycle_decomposition(&g).expect("degree two").lengths();
    lens.sort_unstable();
    lens.iter().filter(|&&l| l == 4).count() == 1 && lens.iter().all(|&l| l == 2 || l == 4)
}

/// Simple binomial relations as elements of V⊗V; with `simplest`, only those
/// whose complement matchings form one 4-cycle plus 2-cycles. Columns are
/// deduplicated up to sign (first occurrence kept).
pub fn binomials(sp: &Spaces, simplest: bool) -> Result<GeneratorFamily> {
    let n = sp.n;
    if n < 6 {
        return Err(GraphError::TooSmall { what: "simple binomial relations", min: 6, n }.into());
    }
    let verts: Vec<Vertex> = (0..n as Vertex).collect();
    let mut quads = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    quads.push([a as Vertex, b as Vertex, c as Vertex, d as Vertex]);
                }
            }
        }
    }
    let m_rest = enumerate::matchings(n - 4);
    let per_quad: Vec<Vec<(IntVec, BinomialSource)>> = quads
        .par_iter()
        .map(|&u| {
            let rest: Vec<Vertex> = verts.iter().copied().filter(|v| !u.contains(v)).collect();
            let rest_matchings: Vec<Vec<Edge>> = m_rest
                .iter()
                .map(|g| g.edges().iter().map(|e| Edge(rest[e.0 as usize], rest[e.1 as usize])).collect())
                .collect();
            let ms = four_set_matchings(u);
            let mut out = Vec::new();
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                let (d1, d2) = (&ms[x], &ms[y]);
                for g1 in &rest_matchings {
                    for g2 in &rest_matchings {
                        if simplest && !is_simplest(n, g1, g2, &rest) {
                            continue;
                        }
                        let a = sp.v_coords(&union_matching(n, &[g1, d1]));
                        let b = sp.v_coords(&union_matching(n, &[g2, d2]));
                        let c = sp.v_coords(&union_matching(n, &[g1, d2]));
                        let d = sp.v_coords(&union_matching(n, &[g2, d1]));
                        let mut col = sp.tensor(&a, &b);
                        for (k, v) in sp.tensor(&c, &d) {
                            let e = col.entry(k).or_insert_with(BigInt::zero);
                            *e -= v;
                        }
                        col.retain(|_, v| !v.is_zero());
                        let pairs = |es: &[Edge]| es.iter().map(|e| [e.0, e.1]).collect::<Vec<_>>();
                        out.push((
                            col,
                            BinomialSource {
                                u,
                                delta: [pairs(d1), pairs(d2)],
                                gamma: [pairs(g1), pairs(g2)],
                            },
                        ));
                    }
                }
            }
            out
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut columns = Vec::new();
    let mut sources = Vec::new();
    let mut raw = 0;
    for (col, src) in per_quad.into_iter().flatten() {
        raw += 1;
        if col.is_empty() {
            continue;
        }
        let key = normalize_sign(&col);
        if seen.insert(key) {
            columns.push(col);
            sources.push(src);
        }
    }
    Ok(GeneratorFamily { columns, sources, raw_count: raw, ambient: sp.dim_tensor() })
}

fn normalize_sign(v: &IntVec) -> Vec<(usize, BigInt)> {
    let flip = v.values().next().is_some_and(|x| x.is_negative());
    v.iter()
        .map(|(k, x)| (*k, if flip { -x } else { x.clone() }))
        .collect()
}

/// One generator family compared with one target lattice.
#[derive(Clone, Debug, Serialize)]
pub struct SpanLine {
    pub target: String,
    pub target_rank: usize,
    pub generator_rank: usize,
    /// elementary divisors other than 1
    pub nonunit_divisors: Vec<String>,
    pub bad_primes: Vec<u64>,
    pub outside: usize,
    pub equal_over_q: bool,
    pub equal_over_z: bool,
}

impl SpanLine {
    fn from_report(target: &str, r: &crate::lattice::SpanReport) -> Self {
        SpanLine {
            target: target.to_string(),
            target_rank: r.target_rank,
            generator_rank: r.generator_rank,
            nonunit_divisors: r.divisors.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect(),
            bad_primes: r.bad_primes.clone(),
            outside: r.outside.len(),
            equal_over_q: r.equal_over_q,
            equal_over_z: r.equal_over_z,
        }
    }

    /// Spans over Z[1/2]: equal over Q and only 2 divides the index.
    pub fn spans_away_from_two(&self) -> bool {
        self.equal_over_q && self.bad_primes.iter().all(|&p| p == 2)
    }
}

/// Ranks modulo one prime: generators against the target rank.
#[derive(Clone, Debug, Serialize)]
pub struct ModpSpanLine {
    pub prime: u64,
    pub target: String,
    pub target_rank: usize,
    pub generator_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BinomialSpanReport {
    pub n: usize,
    pub family: String,
    pub raw_count: usize,
    pub distinct: usize,
    /// exact lines: the kernel B of V⊗V → W, the same generators together
    /// with all commutators against B, and their symmetrizations against the
    /// kernel I² of Sym²V → W
    pub exact: Vec<SpanLine>,
    pub modular: Vec<ModpSpanLine>,
}

impl BinomialSpanReport {
    pub fn line(&self, target: &str) -> Option<&SpanLine> {
        self.exact.iter().find(|l| l.target == target)
    }
}

pub const TARGET_B: &str = "B";
pub const TARGET_B_COMMUTATORS: &str = "B (with commutators)";
pub const TARGET_I2: &str = "I2 (symmetric square)";

/// Compare the span of the simple (or simplest) binomial relations with the
/// relation lattices, exactly when `exact`, and modulo each prime.
pub fn binomial_span(sp: &Spaces, simplest: bool, exact: bool, primes: &[u64]) -> Result<BinomialSpanReport> {
    let fam = binomials(sp, simplest)?;
    let gens = fam.matrix();
    let sym_cols: Vec<IntVec> = fam.columns.iter().map(|c| sp.symmetrize(c)).filter(|c| !c.is_empty()).collect();
    let sym = SparseIntMatrix::from_columns(sp.dim_sym2(), sym_cols);
    let mut exact_lines = Vec::new();
    let tensor = sp.tensor_matrix();
    let mult = sp.mult_matrix();
    let b_rank = sp.dim_tensor() - crate::lattice::rank_over_q(&tensor);
    let i2_rank = sp.dim_sym2() - crate::lattice::rank_over_q(&mult);
    if exact {
        let k = relation_kernels(sp);
        exact_lines.push(SpanLine::from_report(TARGET_B, &span_analysis(&gens, &k.b)));
        let m = sp.dim_v();
        let mut cols = fam.columns.clone();
        for i in 0..m {
            for j in i + 1..m {
                let mut c = IntVec::new();
                c.insert(sp.tensor_position(i, j), BigInt::from(1));
                c.insert(sp.tensor_position(j, i), BigInt::from(-1));
                cols.push(c);
            }
        }
        let with_comm = SparseIntMatrix::from_columns(sp.dim_tensor(), cols);
        exact_lines.push(SpanLine::from_report(TARGET_B_COMMUTATORS, &span_analysis(&with_comm, &k.b)));
        exact_lines.push(SpanLine::from_report(TARGET_I2, &span_analysis(&sym, &k.i2)));
    }
    let mut modular = Vec::new();
    for &p in primes {
        modular.push(ModpSpanLine { prime: p, target: TARGET_B.into(), target_rank: b_rank, generator_rank: rank_mod_p(&gens, p) });
        modular.push(ModpSpanLine { prime: p, target: TARGET_I2.into(), target_rank: i2_rank, generator_rank: rank_mod_p(&sym, p) });
    }
    Ok(BinomialSpanReport {
        n: sp.n,
        family: if simplest { "simplest" } else { "simple" }.into(),
        raw_count: fam.raw_count,
        distinct: fam.columns.len(),
        exact: exact_lines,
        modular,
    })
}

/// The binomial relation built from explicit data, for spot checks.
pub fn binomial_column(
    sp: &Spaces,
    delta: [&[Edge]; 2],
    gamma: [&[Edge]; 2],
) -> IntVec {
    let n = sp.n;
    let a = sp.v_coords(&union_matching(n, &[gamma[0], delta[0]]));
    let b = sp.v_coords(&union_matching(n, &[gamma[1], delta[1]]));
    let c = sp.v_coords(&union_matching(n, &[gamma[0], delta[1]]));
    let d = sp.v_coords(&union_matching(n, &[gamma[1], delta[0]]));
    let mut col = sp.tensor(&a, &b);
    for (k, v) in sp.tensor(&c, &d) {
        *col.entry(k).or_insert_with(BigInt::zero) -= v;
    }
    col.retain(|_, v| !v.is_zero());
    col
}

/// Outer multiplication: `v` lives on `map_v.len()` points embedded through
/// `map_v`, `w` likewise; the result lives on `n` points.
pub fn outer_multiply<R: Ring>(
    n: usize,
    v: &GraphVector<R>,
    map_v: &[Vertex],
    w: &GraphVector<R>,
    map_w: &[Vertex],
) -> Result<GraphVector<R>> {
    let mut used = vec![false; n];
    for &x in map_v.iter().chain(map_w) {
        if x as usize >= n {
            return Err(GraphError::LabelOutOfRange { edge: Edge(x, x), n }.into());
        }
        if used[x as usize] {
            return Err(Error::Hypothesis(format!("label {x} used twice in outer product")));
        }
        used[x as usize] = true;
    }
    let ring = v.ring().clone();
    let mut out = GraphVector::zero(ring.clone());
    for (g, a) in v.terms() {
        let sg = g.relabel(n, map_v);
        for (h, b) in w.terms() {
            let sh = h.relabel(n, map_w);
            let mut edges: Vec<Edge> = sg.graph.edges().to_vec();
            edges.extend_from_slice(sh.graph.edges());
            let u = canonicalize_partial(n, &edges)?.expect("disjoint labels, no loops");
            let c = ring.mul(a, b);
            let c = ring.signed(&c, sg.sign * sh.sign * u.sign);
            out.add_term(u.graph, c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicReport {
    pub dim_sym3: usize,
    pub dim_r3: usize,
    pub dim_i2: usize,
    pub dim_i3: usize,
    pub image_rank: usize,
    pub corank: usize,
}

/// Cokernel dimension of V⊗I² → I³ at six points, over Q.
pub fn cubic_corank_n6() -> Result<CubicReport> {
    let sp = Spaces::new(6)?;
    let r3 = planar_basis(6, 3)?;
    let m = sp.dim_v();
    let mut triples = Vec::new();
    for i in 0..m {
        for j in i..m {
            for k in j..m {
                triples.push((i, j, k));
            }
        }
    }
    let pos: HashMap<(usize, usize, usize), usize> =
        triples.iter().enumerate().map(|(p, &t)| (t, p)).collect();
    let key = |mut t: [usize; 3]| {
        t.sort_unstable();
        pos[&(t[0], t[1], t[2])]
    };
    let cols: Vec<IntVec> = triples
        .iter()
        .map(|&(i, j, k)| {
            let g = sp.v.graph(i).union(sp.v.graph(j)).union(sp.v.graph(k));
            r3.coords(&sp.st.straighten_graph(&g))
        })
        .collect();
    let m3 = SparseIntMatrix::from_columns(r3.len(), cols);
    let i3 = kernel_saturated(&m3);
    let i2 = kernel_saturated(&sp.mult_matrix());
    let mut image = Vec::new();
    for a in 0..m {
        for q in &i2.basis {
            let mut col = IntVec::new();
            for (p, c) in q {
                let (i, j) = sp.sym2_pair(*p);
                *col.entry(key([a, i, j])).or_insert_with(BigInt::zero) += c;
            }
            col.retain(|_, c| !c.is_zero());
            image.push(col);
        }
    }
    let image_rank = crate::lattice::integer_echelon(triples.len(), image).len();
    Ok(CubicReport {
        dim_sym3: triples.len(),
        dim_r3: r3.len(),
        dim_i2: i2.rank(),
        dim_i3: i3.rank(),
        image_rank,
        corank: i3.rank() - image_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{evaluate, to_rationals, PointAssignment};
    use crate::lattice::elementary_divisors;
    use rand::SeedableRng;

    #[test]
    fn counts() {
        assert_eq!(matchings(6).unwrap().len(), 15);
        assert_eq!(planar_matchings(6).unwrap().len(), 5);
        assert_eq!(matchings(8).unwrap().len(), 105);
        assert_eq!(planar_matchings(8).unwrap().len(), 14);
        assert_eq!(matchings(2).unwrap().len(), 1);
        assert!(matchings(5).is_err());
        assert_eq!(planar_basis(4, 2).unwrap().len(), 3);
        assert_eq!(planar_basis(6, 1).unwrap().len(), 5);
        assert_eq!(planar_basis(2, 3).unwrap().len(), 1);
        assert!(planar_basis(6, 4).is_err());
    }

    #[test]
    fn mult_matrix_small() {
        let sp = Spaces::new(4).unwrap();
        let m = sp.mult_matrix();
        assert_eq!(m.cols(), 3);
        let d = elementary_divisors(&m);
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(One::is_one));
        let sp = Spaces::new(6).unwrap();
        let d = elementary_divisors(&sp.mult_matrix());
        assert_eq!(d.len(), sp.dim_w());
    }

    #[test]
    fn mult_columns_evaluate() {
        let sp = Spaces::new(6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for k in [0, 4, 9, 14] {
            let (i, j) = sp.sym2_pair(k);
            let g = sp.v.graph(i).union(sp.v.graph(j));
            let col = sp.mult_matrix().column_vec(k);
            let mut v = GraphVector::zero(Integers);
            for (r, c) in col {
                v.add_term(sp.w.graph(r).clone(), c);
            }
            for _ in 0..5 {
                let p = PointAssignment::random(6, 50, &mut rng);
                let lhs = evaluate(&GraphVector::from_graph(Integers, g.clone()), &p).unwrap();
                assert_eq!(lhs, evaluate(&to_rationals(&v), &p).unwrap());
            }
        }
    }

    #[test]
    fn kernels_small() {
        let sp = Spaces::new(4).unwrap();
        let k = relation_kernels(&sp);
        assert_eq!(k.b.rank(), 1);
        assert_eq!(k.i2.rank(), 0);
        let sp = Spaces::new(6).unwrap();
        let k = relation_kernels(&sp);
        assert_eq!(k.i2.rank(), 15 - sp.dim_w());
        assert_eq!(k.b.rank(), 25 - sp.dim_w());
    }

    #[test]
    fn binomials_lie_in_kernel_n6() {
        let sp = Spaces::new(6).unwrap();
        let k = relation_kernels(&sp);
        let fam = binomials(&sp, false).unwrap();
        assert_eq!(fam.raw_count, 15 * 3);
        for c in &fam.columns {
            assert!(k.b.contains_rationally(c));
        }
        let r = span_analysis(&fam.matrix(), &k.b);
        assert!(r.outside.is_empty());
    }

    #[test]
    fn ten_point_picture() {
        // the 4-cycle/6-cycle picture: U = {2,3,6,7} in a 2x5 ladder labelling
        let sp = Spaces::new(10).unwrap();
        let d1 = [Edge(2, 3), Edge(6, 7)];
        let d2 = [Edge(2, 6), Edge(3, 7)];
        let g1 = [Edge(0, 1), Edge(4, 5), Edge(8, 9)];
        let g2 = [Edge(0, 8), Edge(1, 5), Edge(4, 9)];
        let col = binomial_column(&sp, [&d1, &d2], [&g1, &g2]);
        assert!(!col.is_empty());
        let t = sp.tensor_matrix();
        assert!(t.mul_vec(&col).is_empty());
    }

    #[test]
    fn outer_product_factorizes() {
        let m2 = GraphVector::from_graph(Integers, CanonicalGraph::from_pairs(2, &[(0, 1)]).unwrap());
        let m4 = GraphVector::from_graph(Integers, CanonicalGraph::from_pairs(4, &[(0, 2), (1, 3)]).unwrap());
        let u = outer_multiply(6, &m2, &[0, 5], &m4, &[1, 2, 3, 4]).unwrap();
        let g = CanonicalGraph::from_pairs(6, &[(0, 5), (1, 3), (2, 4)]).unwrap();
        assert_eq!(u, GraphVector::from_graph(Integers, g));
        assert!(outer_multiply(6, &m2, &[0, 1], &m4, &[1, 2, 3, 4]).is_err());
        // bracket factorization at split points
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = PointAssignment::random(6, 30, &mut rng);
        let pv = PointAssignment::new(vec![p.points[0].clone(), p.points[5].clone()]);
        let pw = PointAssignment::new(p.points[1..5].to_vec());
        let lhs = evaluate(&u, &p).unwrap();
        assert_eq!(lhs, evaluate(&m2, &pv).unwrap() * evaluate(&m4, &pw).unwrap());
    }

    #[test]
    fn cubic_n6() {
        let r = cubic_corank_n6().unwrap();
        assert_eq!(r.dim_sym3, 35);
        assert_eq!(r.dim_i3, 35 - r.dim_r3);
        assert_eq!(r.corank, 1);
    }
}
