//! Partitioned spaces: terms (Γ, 𝒰) with 𝒰 a closed even partition, the
//! space W̃ with its forgetful map to W, merging and odd-cycle-exchange
//! relations, the kernel Q, and the lift of merging relations to colored
//! terms.
//!
//! Relation vectors are kept as maps keyed by [`PartitionedTerm`], so they
//! make sense without a global basis (needed beyond ten points); a
//! [`WTilde`] index turns them into coordinates.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{pluecker_split, Straightener};
use crate::enumerate;
use crate::error::{Error, GraphError, Result};
use crate::graphs::{cycle_decomposition, CanonicalGraph, Edge, EdgeList, Vertex};
use crate::lattice::{kernel_saturated, rank_of_vectors, IntVec, LatticeBasis, SparseIntMatrix};
use crate::relspaces::Spaces;
use crate::ring::{Integers, PrimeField, Ring};

/// Partition of `0..n` into at least two pieces of even size, pieces sorted
/// internally and by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvenPartition {
    pieces: Vec<Vec<Vertex>>,
}

impl EvenPartition {
    pub fn new(n: usize, mut pieces: Vec<Vec<Vertex>>) -> Result<Self> {
        if pieces.len() < 2 {
            return Err(Error::Hypothesis("a partition needs at least two pieces".into()));
        }
        let mut seen = vec![false; n];
        for p in pieces.iter_mut() {
            if p.is_empty() || p.len() % 2 != 0 {
                return Err(Error::Hypothesis(format!("piece {p:?} has odd or zero size")));
            }
            p.sort_unstable();
            for &v in p.iter() {
                if v as usize >= n || seen[v as usize] {
                    return Err(Error::Hypothesis(format!("vertex {v} repeated or out of range")));
                }
                seen[v as usize] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Hypothesis("pieces do not cover the vertex set".into()));
        }
        pieces.sort();
        Ok(EvenPartition { pieces })
    }

    fn from_pieces_unchecked(mut pieces: Vec<Vec<Vertex>>) -> Self {
        for p in pieces.iter_mut() {
            p.sort_unstable();
        }
        pieces.sort();
        EvenPartition { pieces }
    }

    pub fn pieces(&self) -> &[Vec<Vertex>] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn n(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    pub fn piece_of(&self, v: Vertex) -> usize {
        self.pieces
            .iter()
            .position(|p| p.binary_search(&v).is_ok())
            .expect("vertex covered")
    }

    /// Merge pieces `i` and `j`; the result may have a single piece.
    pub fn merge(&self, i: usize, j: usize) -> EvenPartition {
        assert!(i != j);
        let mut pieces = Vec::with_capacity(self.len() - 1);
        let mut merged = self.pieces[i].clone();
        merged.extend_from_slice(&self.pieces[j]);
        pieces.push(merged);
        for (k, p) in self.pieces.iter().enumerate() {
            if k != i && k != j {
                pieces.push(p.clone());
            }
        }
        Self::from_pieces_unchecked(pieces)
    }

    /// Sorted piece sizes.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.pieces.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    pub fn is_closed_for(&self, g: &CanonicalGraph) -> bool {
        let mut which = vec![usize::MAX; g.n()];
        for (k, p) in self.pieces.iter().enumerate() {
            for &v in p {
                which[v as usize] = k;
            }
        }
        g.edges().iter().all(|e| which[e.0 as usize] == which[e.1 as usize])
    }
}

/// All even partitions of `0..n` with at least two pieces.
pub fn even_partitions(n: usize) -> Vec<EvenPartition> {
    fn rec(rest: &[Vertex], cur: &mut Vec<Vec<Vertex>>, out: &mut Vec<EvenPartition>) {
        if rest.is_empty() {
            if cur.len() >= 2 {
                out.push(EvenPartition::from_pieces_unchecked(cur.clone()));
            }
            return;
        }
        let first = rest[0];
        let others = &rest[1..];
        // choose an odd-size subset of the others to join `first`
        let m = others.len();
        for mask in 0u64..(1u64 << m) {
            if mask.count_ones() % 2 == 0 {
                continue;
            }
            let mut piece = vec![first];
            let mut remaining = Vec::with_capacity(m);
            for (k, &v) in others.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    piece.push(v);
                } else {
                    remaining.push(v);
                }
            }
            cur.push(piece);
            rec(&remaining, cur, out);
            cur.pop();
        }
    }
    let verts: Vec<Vertex> = (0..n as Vertex).collect();
    let mut out = Vec::new();
    if n >= 4 && n % 2 == 0 {
        rec(&verts, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// A degree-two graph with a partition closed with respect to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionedTerm {
    pub graph: CanonicalGraph,
    pub partition: EvenPartition,
}

impl PartitionedTerm {
    pub fn new(graph: CanonicalGraph, partition: EvenPartition) -> Result<Self> {
        if graph.n() != partition.n() {
            return Err(Error::Hypothesis("graph and partition sizes differ".into()));
        }
        if !partition.is_closed_for(&graph) {
            return Err(Error::Hypothesis(format!(
                "partition {:?} is not closed for {graph}",
                partition.pieces()
            )));
        }
        Ok(PartitionedTerm { graph, partition })
    }

    /// Planar within every piece (the basis condition).
    pub fn is_basis_form(&self) -> bool {
        let es = self.graph.edges();
        for i in 0..es.len() {
            for j in i + 1..es.len() {
                if crate::graphs::edges_cross(es[i], es[j])
                    && self.partition.piece_of(es[i].0) == self.partition.piece_of(es[j].0)
                {
                    return false;
                }
            }
        }
        true
    }
}

pub type TermVector = BTreeMap<PartitionedTerm, BigInt>;

fn tv_add(v: &mut TermVector, t: PartitionedTerm, c: &BigInt) {
    let e = v.entry(t.clone()).or_insert_with(BigInt::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&t);
    }
}

fn tv_add_scaled(v: &mut TermVector, w: &TermVector, c: &BigInt) {
    for (t, x) in w {
        tv_add(v, t.clone(), &(x * c));
    }
}

/// Partitions of the cycle set of `g` into at least two groups of even
/// vertex total.
pub fn closed_partitions(g: &CanonicalGraph) -> Result<Vec<EvenPartition>> {
    let cd = cycle_decomposition(g)?;
    let k = cd.len();
    let mut out = Vec::new();
    // restricted growth strings over the cycles
    let mut assign = vec![0usize; k];
    fn rec(
        i: usize,
        blocks: usize,
        assign: &mut Vec<usize>,
        cd: &crate::graphs::CycleDecomposition,
        out: &mut Vec<EvenPartition>,
    ) {
        if i == assign.len() {
            if blocks < 2 {
                return;
            }
            let mut pieces = vec![Vec::new(); blocks];
            for (c, &b) in assign.iter().enumerate() {
                pieces[b].extend_from_slice(&cd.cycles[c].vertices);
            }
            if pieces.iter().all(|p| p.len() % 2 == 0) {
                out.push(EvenPartition::from_pieces_unchecked(pieces));
            }
            return;
        }
        for b in 0..=blocks {
            assign[i] = b;
            rec(i + 1, blocks.max(b + 1), assign, cd, out);
        }
    }
    if k > 0 {
        assign[0] = 0;
        rec(1, 1, &mut assign, &cd, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Straightening inside pieces, memoized on the piece-local graphs.
pub struct PieceStraightener {
    st: Straightener<Integers>,
}

impl Default for PieceStraightener {
    fn default() -> Self {
        Self::new()
    }
}

impl PieceStraightener {
    pub fn new() -> Self {
        PieceStraightener { st: Straightener::with_memo(Integers) }
    }

    /// Expand `(g, part)` in per-piece planar form.
    pub fn express(&self, g: &CanonicalGraph, part: &EvenPartition) -> Result<TermVector> {
        if !part.is_closed_for(g) {
            return Err(Error::Hypothesis(format!("partition not closed for {g}")));
        }
        let n = g.n();
        let mut acc: Vec<(EdgeList, BigInt)> = vec![(EdgeList::new(), BigInt::one())];
        for piece in part.pieces() {
            let mut pos = vec![u8::MAX; n];
            for (k, &v) in piece.iter().enumerate() {
                pos[v as usize] = k as u8;
            }
            let local: Vec<(Vertex, Vertex)> = g
                .edges()
                .iter()
                .filter(|e| pos[e.0 as usize] != u8::MAX)
                .map(|e| (pos[e.0 as usize], pos[e.1 as usize]))
                .collect();
            let lg = CanonicalGraph::from_pairs(piece.len(), &local)?;
            let exp = self.st.straighten_graph(&lg);
            let mut next = Vec::with_capacity(acc.len() * exp.len());
            for (edges, c) in &acc {
                for (h, d) in exp.terms() {
                    let mut es = edges.clone();
                    es.extend(h.edges().iter().map(|e| Edge(piece[e.0 as usize], piece[e.1 as usize])));
                    next.push((es, c * d));
                }
            }
            acc = next;
        }
        let mut out = TermVector::new();
        for (es, c) in acc {
            let t = PartitionedTerm { graph: CanonicalGraph::from_oriented(n, es), partition: part.clone() };
            tv_add(&mut out, t, &c);
        }
        Ok(out)
    }
}

/// Index of the W̃ basis: per-piece planar terms over all even partitions.
/// Terms with more pieces come first.
pub struct WTilde {
    pub n: usize,
    terms: Vec<PartitionedTerm>,
    index: HashMap<PartitionedTerm, usize>,
}

fn check_partition_n(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(GraphError::OddVertexCount("partitioned spaces", n).into());
    }
    if n < 6 {
        return Err(GraphError::TooSmall { what: "partitioned spaces", min: 6, n }.into());
    }
    Ok(())
}

impl WTilde {
    pub fn new(n: usize) -> Result<Self> {
        check_partition_n(n)?;
        Ok(Self::build(n))
    }

    /// No size check; for boundary reports below the hypothesis.
    pub(crate) fn build(n: usize) -> Self {
        let mut local: HashMap<usize, Vec<CanonicalGraph>> = HashMap::new();
        for k in (2..=n).step_by(2) {
            local.insert(k, enumerate::planar_graphs(k, 2));
        }
        let parts = even_partitions(n);
        let mut terms: Vec<PartitionedTerm> = parts
            .par_iter()
            .flat_map_iter(|p| {
                let mut acc: Vec<EdgeList> = vec![EdgeList::new()];
                for piece in p.pieces() {
                    let mut next = Vec::new();
                    for es in &acc {
                        for h in &local[&piece.len()] {
                            let mut e2 = es.clone();
                            e2.extend(h.edges().iter().map(|e| Edge(piece[e.0 as usize], piece[e.1 as usize])));
                            next.push(e2);
                        }
                    }
                    acc = next;
                }
                acc.into_iter()
                    .map(|es| PartitionedTerm { graph: CanonicalGraph::from_oriented(n, es), partition: p.clone() })
                    .collect::<Vec<_>>()
            })
            .collect();
        terms.sort_by(|a, b| {
            b.partition
                .len()
                .cmp(&a.partition.len())
                .then_with(|| a.partition.cmp(&b.partition))
                .then_with(|| a.graph.cmp(&b.graph))
        });
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        WTilde { n, terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, i: usize) -> &PartitionedTerm {
        &self.terms[i]
    }

    pub fn terms(&self) -> &[PartitionedTerm] {
        &self.terms
    }

    pub fn position(&self, t: &PartitionedTerm) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn coords(&self, v: &TermVector) -> IntVec {
        v.iter()
            .map(|(t, c)| {
                let i = self
                    .position(t)
                    .unwrap_or_else(|| panic!("term {} / {:?} not in basis", t.graph, t.partition.pieces()));
                (i, c.clone())
            })
            .collect()
    }

    /// Number of basis terms per partition shape.
    pub fn census(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut m = BTreeMap::new();
        for t in &self.terms {
            *m.entry(t.partition.shape()).or_insert(0) += 1;
        }
        m
    }

    /// W̃ → W: straighten each basis term globally.
    pub fn to_w(&self, sp: &Spaces) -> SparseIntMatrix {
        let cols: Vec<IntVec> = self.terms.par_iter().map(|t| sp.w_coords(&t.graph)).collect();
        SparseIntMatrix::from_columns(sp.dim_w(), cols)
    }
}

/// One merging relation: `(Γ, 𝒰) − (Γ, 𝒰 with pieces i, j merged)`.
pub fn merging_relation(ps: &PieceStraightener, t: &PartitionedTerm, i: usize, j: usize) -> Result<TermVector> {
    if t.partition.len() < 3 {
        return Err(Error::Hypothesis("merging needs at least three pieces".into()));
    }
    let mut v = ps.express(&t.graph, &t.partition)?;
    let merged = ps.express(&t.graph, &t.partition.merge(i, j))?;
    tv_add_scaled(&mut v, &merged, &BigInt::from(-1));
    Ok(v)
}

/// All merging relations on basis terms, in W̃ coordinates, ordered by basis
/// term then piece pair.
pub fn merging_relations(wt: &WTilde, ps: &PieceStraightener) -> Vec<IntVec> {
    (0..wt.len())
        .into_par_iter()
        .flat_map_iter(|b| {
            let t = wt.term(b);
            let k = t.partition.len();
            let mut cols = Vec::new();
            if k >= 3 {
                for i in 0..k {
                    for j in i + 1..k {
                        let r = merging_relation(ps, t, i, j).expect("basis term is closed");
                        cols.push(wt.coords(&r));
                    }
                }
            }
            cols
        })
        .collect()
}

/// Odd-cycle-exchange relation for four odd closed sets.
pub fn odd_exchange_relation(ps: &PieceStraightener, g: &CanonicalGraph, u: [&[Vertex]; 4]) -> Result<TermVector> {
    let n = g.n();
    for s in u {
        if s.len() % 2 == 0 {
            return Err(Error::Hypothesis(format!("set {s:?} has even size")));
        }
    }
    let join = |a: &[Vertex], b: &[Vertex]| {
        let mut p = a.to_vec();
        p.extend_from_slice(b);
        p
    };
    let p1 = EvenPartition::new(n, vec![join(u[0], u[1]), join(u[2], u[3])])?;
    let p2 = EvenPartition::new(n, vec![join(u[0], u[2]), join(u[1], u[3])])?;
    for s in u {
        let only = EvenPartition::from_pieces_unchecked(vec![s.to_vec()]);
        if !g.edges().iter().all(|e| only.pieces[0].contains(&e.0) == only.pieces[0].contains(&e.1)) {
            return Err(Error::Hypothesis(format!("set {s:?} is not closed")));
        }
    }
    let mut v = ps.express(g, &p1)?;
    tv_add_scaled(&mut v, &ps.express(g, &p2)?, &BigInt::from(-1));
    Ok(v)
}

/// All odd-cycle-exchange relations; empty below twelve points. At twelve
/// points the four sets are triangles, one relation per pair of pairings.
pub fn odd_exchange_relations(n: usize, ps: &PieceStraightener) -> Result<Vec<TermVector>> {
    if n < 12 {
        return Ok(Vec::new());
    }
    if n > 12 {
        return Err(Error::Hypothesis("odd exchange enumeration is only implemented at twelve points".into()));
    }
    // four disjoint triangles covering 0..12
    let mut out = Vec::new();
    let mut groups: Vec<[[Vertex; 3]; 4]> = Vec::new();
    fn rec(rest: Vec<Vertex>, cur: &mut Vec<[Vertex; 3]>, out: &mut Vec<[[Vertex; 3]; 4]>) {
        if rest.is_empty() {
            out.push([cur[0], cur[1], cur[2], cur[3]]);
            return;
        }
        let a = rest[0];
        for i in 1..rest.len() {
            for j in i + 1..rest.len() {
                let t = [a, rest[i], rest[j]];
                let r: Vec<Vertex> = rest.iter().copied().filter(|v| !t.contains(v)).collect();
                cur.push(t);
                rec(r, cur, out);
                cur.pop();
            }
        }
    }
    rec((0..12).collect(), &mut Vec::new(), &mut groups);
    for tri in groups {
        let mut pairs = Vec::new();
        for t in &tri {
            pairs.extend([(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]);
        }
        let g = CanonicalGraph::from_pairs(12, &pairs)?;
        // pairings {01|23} vs {02|13} and {01|23} vs {03|12}
        for (a, b, c, d) in [(0, 1, 2, 3), (0, 1, 3, 2)] {
            let u = [&tri[a][..], &tri[b][..], &tri[c][..], &tri[d][..]];
            out.push(odd_exchange_relation(ps, &g, u)?);
        }
    }
    Ok(out)
}

/// A merging relation `(Γ, 𝒰) − (Γ, 𝒰')` in chain form, with its sign.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub sign: i8,
    pub finer: EvenPartition,
    pub coarser: EvenPartition,
}

#[derive(Clone, Debug)]
pub enum ExchangeChain {
    Chain(Vec<ChainStep>),
    NotApplicable,
}

/// Realize the odd exchange on `u` as four merging relations when some
/// `u_i` holds more than one cycle; the telescoping sum is checked exactly.
pub fn odd_exchange_as_merging_chain(
    ps: &PieceStraightener,
    g: &CanonicalGraph,
    u: [&[Vertex]; 4],
) -> Result<ExchangeChain> {
    let n = g.n();
    let target = odd_exchange_relation(ps, g, u)?;
    let cd = cycle_decomposition(g)?;
    // relabel so that the multi-cycle set is first, keeping the exchange
    let orders: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    for ord in orders {
        let s = u[ord[0]];
        let mut cyc: Vec<usize> = s.iter().map(|&v| cd.vertex_cycle[v as usize]).collect();
        cyc.sort_unstable();
        cyc.dedup();
        if cyc.len() < 2 {
            continue;
        }
        // V: an even cycle if any, otherwise two odd cycles
        let even = cyc.iter().find(|&&c| !cd.cycles[c].is_odd());
        let vset: Vec<Vertex> = match even {
            Some(&c) => cd.cycles[c].vertices.clone(),
            None => {
                let mut v = cd.cycles[cyc[0]].vertices.clone();
                v.extend_from_slice(&cd.cycles[cyc[1]].vertices);
                v
            }
        };
        let u1p: Vec<Vertex> = s.iter().copied().filter(|x| !vset.contains(x)).collect();
        let (u2, u3, u4) = (u[ord[1]], u[ord[2]], u[ord[3]]);
        let cat = |xs: &[&[Vertex]]| xs.iter().flat_map(|x| x.iter().copied()).collect::<Vec<_>>();
        let p = |pieces: Vec<Vec<Vertex>>| EvenPartition::new(n, pieces);
        let t0 = p(vec![cat(&[s, u2]), cat(&[u3, u4])])?;
        let t1 = p(vec![vset.clone(), cat(&[&u1p, u2]), cat(&[u3, u4])])?;
        let t2 = p(vec![vset.clone(), cat(&[&u1p, u2, u3, u4])])?;
        let t3 = p(vec![vset.clone(), cat(&[&u1p, u3]), cat(&[u2, u4])])?;
        let t4 = p(vec![cat(&[s, u3]), cat(&[u2, u4])])?;
        let steps = vec![
            ChainStep { sign: -1, finer: t1.clone(), coarser: t0 },
            ChainStep { sign: 1, finer: t1, coarser: t2.clone() },
            ChainStep { sign: -1, finer: t3.clone(), coarser: t2 },
            ChainStep { sign: 1, finer: t3, coarser: t4 },
        ];
        // the exchange with the reordered sets equals ± the requested one
        let mut sum = TermVector::new();
        for st in &steps {
            let mut r = ps.express(g, &st.finer)?;
            tv_add_scaled(&mut r, &ps.express(g, &st.coarser)?, &BigInt::from(-1));
            tv_add_scaled(&mut sum, &r, &BigInt::from(st.sign));
        }
        let mut diff = sum.clone();
        tv_add_scaled(&mut diff, &target, &BigInt::from(-1));
        if diff.is_empty() {
            return Ok(ExchangeChain::Chain(steps));
        }
        let mut diff = sum;
        tv_add_scaled(&mut diff, &target, &BigInt::from(1));
        if diff.is_empty() {
            let steps = steps.into_iter().map(|s| ChainStep { sign: -s.sign, ..s }).collect();
            return Ok(ExchangeChain::Chain(steps));
        }
        return Err(Error::Reduction("merging chain does not telescope to the exchange".into()));
    }
    Ok(ExchangeChain::NotApplicable)
}

/// A 2-colored degree-two graph (two matchings) with a closed partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredTerm {
    pub first: CanonicalGraph,
    pub second: CanonicalGraph,
    pub partition: EvenPartition,
}

#[derive(Clone, Debug)]
pub struct Lift {
    pub terms: BTreeMap<ColoredTerm, BigInt>,
    /// the lift maps to zero in V⊗V (checked formally on pure tensors)
    pub in_p: bool,
    /// the lift maps back to the merging relation in W̃
    pub round_trip: bool,
    /// number of even-cycle graphs used
    pub expansions: usize,
}

/// Plücker expansion (within pieces of `part`) of `g` into graphs whose
/// cycles are all even.
pub fn evenize(g: &CanonicalGraph, part: &EvenPartition) -> Result<BTreeMap<CanonicalGraph, BigInt>> {
    let mut work: Vec<(CanonicalGraph, BigInt)> = vec![(g.clone(), BigInt::one())];
    let mut out: BTreeMap<CanonicalGraph, BigInt> = BTreeMap::new();
    while let Some((h, c)) = work.pop() {
        let cd = cycle_decomposition(&h)?;
        let mut found = None;
        'pieces: for piece in part.pieces() {
            let odd: Vec<usize> = cd
                .cycles
                .iter()
                .enumerate()
                .filter(|(_, cy)| cy.is_odd() && piece.binary_search(&cy.vertices[0]).is_ok())
                .map(|(k, _)| k)
                .collect();
            if odd.len() >= 2 {
                found = Some((cd.cycles[odd[0]].slots[0], cd.cycles[odd[1]].slots[0]));
                break 'pieces;
            }
        }
        match found {
            None => {
                let e = out.entry(h).or_insert_with(BigInt::zero);
                *e += c;
            }
            Some((i, j)) => {
                let (i, j) = (i.min(j), i.max(j));
                let (p, q) = pluecker_split(&h, i, j)?;
                work.push((p.graph, &c * p.sign as i64));
                work.push((q.graph, &c * q.sign as i64));
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Alternate colors around each (even) cycle.
pub fn two_color(g: &CanonicalGraph) -> Result<(CanonicalGraph, CanonicalGraph)> {
    let cd = cycle_decomposition(g)?;
    let mut a = EdgeList::new();
    let mut b = EdgeList::new();
    for cy in &cd.cycles {
        if cy.is_odd() {
            return Err(Error::Hypothesis(format!("{g} has an odd cycle")));
        }
        for (k, &s) in cy.slots.iter().enumerate() {
            if k % 2 == 0 {
                a.push(g.edges()[s]);
            } else {
                b.push(g.edges()[s]);
            }
        }
    }
    Ok((CanonicalGraph::from_oriented(g.n(), a), CanonicalGraph::from_oriented(g.n(), b)))
}

/// Lift the merging relation `(g, part) − (g, coarser)` to colored terms.
pub fn lift_merging_relation(
    ps: &PieceStraightener,
    g: &CanonicalGraph,
    part: &EvenPartition,
    coarser: &EvenPartition,
) -> Result<Lift> {
    if !part.is_closed_for(g) || !coarser.is_closed_for(g) {
        return Err(Error::Hypothesis("partitions must be closed for the graph".into()));
    }
    if part.len() != coarser.len() + 1 || !part.pieces().iter().all(|p| coarser.pieces().iter().any(|q| p.iter().all(|v| q.contains(v)))) {
        return Err(Error::Hypothesis("second partition must merge two pieces of the first".into()));
    }
    let exp = evenize(g, part)?;
    let mut terms: BTreeMap<ColoredTerm, BigInt> = BTreeMap::new();
    let mut tensors: BTreeMap<(CanonicalGraph, CanonicalGraph), BigInt> = BTreeMap::new();
    for (h, c) in &exp {
        let (a, b) = two_color(h)?;
        for (p, s) in [(part, 1i64), (coarser, -1i64)] {
            let t = ColoredTerm { first: a.clone(), second: b.clone(), partition: p.clone() };
            *terms.entry(t).or_insert_with(BigInt::zero) += c * s;
            *tensors.entry((a.clone(), b.clone())).or_insert_with(BigInt::zero) += c * s;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    let in_p = tensors.values().all(Zero::is_zero);
    // back to W̃: forget colors
    let mut back = TermVector::new();
    for (t, c) in &terms {
        let u = t.first.union(&t.second);
        tv_add_scaled(&mut back, &ps.express(&u, &t.partition)?, c);
    }
    let mut want = ps.express(g, part)?;
    tv_add_scaled(&mut want, &ps.express(g, coarser)?, &BigInt::from(-1));
    tv_add_scaled(&mut back, &want, &BigInt::from(-1));
    Ok(Lift { terms, in_p, round_trip: back.is_empty(), expansions: exp.len() })
}

/// Rank data of one prime (or of Q, `prime = 0`).
#[derive(Clone, Debug, Serialize)]
pub struct RankLine {
    pub prime: u64,
    pub rank_to_w: usize,
    pub dim_q: usize,
    pub merging_rank: usize,
    pub spans: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeSpanReport {
    pub n: usize,
    pub dim_wtilde: usize,
    pub dim_w: usize,
    pub census: Vec<(Vec<usize>, usize)>,
    pub merging_count: usize,
    pub lines: Vec<RankLine>,
    /// exact comparison over Z when run: elementary divisors that are not 1
    pub nonunit_divisors: Option<Vec<String>>,
    pub bad_primes: Option<Vec<u64>>,
    /// W'' = W̃ / merging, per prime
    pub dim_w2: Vec<(u64, usize)>,
}

fn residues(cols: &[IntVec], p: u64) -> Vec<Vec<(usize, u64)>> {
    let f = PrimeField::new(p);
    cols.par_iter()
        .map(|c| {
            c.iter()
                .map(|(i, v)| (*i, f.from_bigint(v)))
                .filter(|(_, x)| *x != 0)
                .collect()
        })
        .collect()
}

/// The kernel Q of W̃ → W (exact; intended for n ≤ 8).
pub fn q_kernel(wt: &WTilde, sp: &Spaces) -> LatticeBasis {
    kernel_saturated(&wt.to_w(sp))
}

/// Compare the span of the merging relations with Q over each prime, and
/// over Z when `exact`.
pub fn merge_span_check(n: usize, primes: &[u64], exact: bool) -> Result<MergeSpanReport> {
    let wt = WTilde::new(n)?;
    let sp = Spaces::new(n)?;
    let ps = PieceStraightener::new();
    let to_w = wt.to_w(&sp);
    let merging = merging_relations(&wt, &ps);
    let mut lines = Vec::new();
    let mut dim_w2 = Vec::new();
    for &p in primes {
        let rank_to_w = crate::lattice::rank_mod_p(&to_w, p);
        let dim_q = wt.len() - rank_to_w;
        let merging_rank = merging_rank_mod_p(&wt, &merging, p, dim_q);
        dim_w2.push((p, wt.len() - merging_rank));
        lines.push(RankLine { prime: p, rank_to_w, dim_q, merging_rank, spans: merging_rank == dim_q });
    }
    let (mut nonunit, mut bad) = (None, None);
    if exact {
        let q = kernel_saturated(&to_w);
        let m = SparseIntMatrix::from_columns(wt.len(), merging.clone());
        let r = crate::lattice::span_analysis(&m, &q);
        lines.push(RankLine {
            prime: 0,
            rank_to_w: wt.len() - q.rank(),
            dim_q: q.rank(),
            merging_rank: r.generator_rank,
            spans: r.equal_over_q,
        });
        nonunit = Some(r.divisors.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect());
        bad = Some(r.bad_primes.clone());
    }
    Ok(MergeSpanReport {
        n,
        dim_wtilde: wt.len(),
        dim_w: sp.dim_w(),
        census: wt.census().into_iter().collect(),
        merging_count: merging.len(),
        lines,
        nonunit_divisors: nonunit,
        bad_primes: bad,
        dim_w2,
    })
}

/// Rank of the merging columns mod `p`, stopping early at `cap`.
///
/// Columns are inserted term by term from the fewest pieces upward; since
/// coordinates of terms with more pieces come first, each column's leading
/// entry is its own term and the echelon works its way down to the two-piece
/// block.
pub fn merging_rank_mod_p(wt: &WTilde, merging: &[IntVec], p: u64, cap: usize) -> usize {
    let vecs = residues(merging, p);
    let mut order: Vec<usize> = (0..vecs.len()).collect();
    // fewest pieces first; the leading coordinate identifies the term
    order.sort_by_key(|&k| {
        let lead = merging[k].keys().next().copied().unwrap_or(usize::MAX);
        (usize::MAX - lead, k)
    });
    let mut ech = crate::lattice::ModpEchelon::new(wt.len(), p);
    for k in order {
        ech.insert(&vecs[k]);
        if ech.rank() >= cap {
            break;
        }
    }
    ech.rank()
}

/// Whether the odd cycle exchange relations lie in the span of the merging
/// relations modulo `p`. An experiment: no answer is asserted.
#[derive(Clone, Debug, Serialize)]
pub struct ExchangeExperiment {
    pub n: usize,
    pub prime: u64,
    pub dim_wtilde: usize,
    pub merging_count: usize,
    pub merging_rank: usize,
    pub exchange_count: usize,
    /// exchange columns independent of the merging span
    pub outside_span: usize,
}

/// Estimated bytes for the merging columns of `wt` (both endpoints of each
/// relation expanded, residues stored as `(u32-ish, u64)` pairs).
/// Bytes of the echelon structures before any pivot is stored: the scratch
/// row and pivot table over W̃ plus the term index itself.
pub fn merging_memory_floor(wt: &WTilde) -> usize {
    wt.len() * (8 + 32 + 96)
}

/// Resident set size of this process, where the OS reports it.
fn resident_bytes() -> Option<usize> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: usize = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4096)
}

/// Merging relations of terms `range`, reduced mod `p`.
fn merging_residues(wt: &WTilde, ps: &PieceStraightener, range: std::ops::Range<usize>, p: u64) -> Vec<Vec<(usize, u64)>> {
    let f = PrimeField::new(p);
    range
        .into_par_iter()
        .flat_map_iter(|b| {
            let t = wt.term(b);
            let k = t.partition.len();
            let mut cols = Vec::new();
            if k < 3 {
                return cols;
            }
            for i in 0..k {
                for j in i + 1..k {
                    let r = merging_relation(ps, t, i, j).expect("basis term is closed");
                    cols.push(
                        wt.coords(&r).iter().map(|(i, v)| (*i, f.from_bigint(v))).filter(|(_, x)| *x != 0).collect(),
                    );
                }
            }
            cols
        })
        .collect()
}

/// Do odd cycle exchange relations lie in the merging span mod `p`? Relations
/// are streamed into an echelon; the run stops with an error once the
/// echelon outgrows `memory_budget` bytes.
pub fn exchange_experiment(n: usize, p: u64, memory_budget: usize) -> Result<ExchangeExperiment> {
    if n < 12 {
        return Err(Error::Hypothesis(format!("odd cycle exchange needs four odd cycles, so n >= 12, got {n}")));
    }
    let wt = WTilde::new(n)?;
    let floor = merging_memory_floor(&wt);
    let used = resident_bytes().unwrap_or(0).max(floor);
    if used > memory_budget {
        return Err(Error::Hypothesis(format!(
            "W̃ at n={n} alone takes about {} MB (budget {} MB)",
            used >> 20,
            memory_budget >> 20
        )));
    }
    let ps = PieceStraightener::new();
    let mut ech = crate::lattice::ModpEchelon::new(wt.len(), p);
    let mut merging_count = 0;
    const CHUNK: usize = 4096;
    let mut start = 0;
    while start < wt.len() {
        let end = (start + CHUNK).min(wt.len());
        for v in merging_residues(&wt, &ps, start..end, p) {
            merging_count += 1;
            ech.insert(&v);
            let used = resident_bytes().unwrap_or(0).max(ech.stored_bytes() + floor);
            if used > memory_budget {
                return Err(Error::Hypothesis(format!(
                    "merging echelon at n={n} passed the {} MB budget after {merging_count} relations \
                     (terms {start}..{end} of {}, rank {})",
                    memory_budget >> 20,
                    wt.len(),
                    ech.rank()
                )));
            }
        }
        log::info!("merging: {end}/{} terms, rank {}", wt.len(), ech.rank());
        start = end;
    }
    let merging_rank = ech.rank();
    let exchange: Vec<IntVec> = odd_exchange_relations(n, &ps)?.iter().map(|v| wt.coords(v)).collect();
    let mut outside = 0;
    for v in residues(&exchange, p) {
        if ech.insert(&v) {
            outside += 1;
        }
    }
    Ok(ExchangeExperiment {
        n,
        prime: p,
        dim_wtilde: wt.len(),
        merging_count,
        merging_rank,
        exchange_count: exchange.len(),
        outside_span: outside,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub n: usize,
    pub below_hypothesis: bool,
    pub vtilde_dim: usize,
    pub tensor_dim: usize,
    pub wtilde_dim: usize,
    pub w_dim: usize,
    /// (prime, rank Ṽ→V⊗V, rank W̃→W); prime 0 means Q
    pub ranks: Vec<(u64, usize, usize)>,
}

/// Columns of Ṽ⁽²⁾ → V⊗V: per partition, per piece an ordered pair of planar
/// matchings of the piece.
fn vtilde_columns(n: usize, sp: &Spaces) -> Vec<IntVec> {
    let parts = even_partitions(n);
    let mut local: HashMap<usize, Vec<CanonicalGraph>> = HashMap::new();
    for k in (2..=n).step_by(2) {
        local.insert(k, enumerate::planar_matchings(k));
    }
    parts
        .par_iter()
        .flat_map_iter(|p| {
            let mut acc: Vec<(EdgeList, EdgeList)> = vec![(EdgeList::new(), EdgeList::new())];
            for piece in p.pieces() {
                let ms = &local[&piece.len()];
                let mut next = Vec::new();
                for (x, y) in &acc {
                    for a in ms {
                        for b in ms {
                            let mut x2 = x.clone();
                            let mut y2 = y.clone();
                            x2.extend(a.edges().iter().map(|e| Edge(piece[e.0 as usize], piece[e.1 as usize])));
                            y2.extend(b.edges().iter().map(|e| Edge(piece[e.0 as usize], piece[e.1 as usize])));
                            next.push((x2, y2));
                        }
                    }
                }
                acc = next;
            }
            acc.into_iter()
                .map(|(x, y)| {
                    let a = sp.v_coords(&CanonicalGraph::from_oriented(n, x));
                    let b = sp.v_coords(&CanonicalGraph::from_oriented(n, y));
                    sp.tensor(&a, &b)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Ranks of Ṽ⁽²⁾ → V⊗V and W̃ → W over the given primes and Q.
pub fn surjectivity_check(n: usize, primes: &[u64]) -> Result<SurjectivityReport> {
    if n % 2 != 0 || n < 4 {
        return Err(GraphError::TooSmall { what: "surjectivity check", min: 4, n }.into());
    }
    let sp = Spaces::new(n)?;
    let wt = WTilde::build(n);
    let vt = vtilde_columns(n, &sp);
    let to_w = wt.to_w(&sp);
    let mut ranks = Vec::new();
    let workers = rayon::current_num_threads();
    for &p in primes {
        let rv = rank_of_vectors(sp.dim_tensor(), p, &residues(&vt, p), workers);
        let rw = crate::lattice::rank_mod_p(&to_w, p);
        ranks.push((p, rv, rw));
    }
    if n <= 8 {
        let rv = crate::lattice::rank_over_q(&SparseIntMatrix::from_columns(sp.dim_tensor(), vt.clone()));
        let rw = crate::lattice::rank_over_q(&to_w);
        ranks.push((0, rv, rw));
    }
    Ok(SurjectivityReport {
        n,
        below_hypothesis: n < 6,
        vtilde_dim: vt.len(),
        tensor_dim: sp.dim_tensor(),
        wtilde_dim: wt.len(),
        w_dim: sp.dim_w(),
        ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, pairs: &[(Vertex, Vertex)]) -> CanonicalGraph {
        CanonicalGraph::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn closed_partition_counts() {
        let five = g(10, &[(0, 1), (0, 1), (2, 3), (2, 3), (4, 5), (4, 5), (6, 7), (6, 7), (8, 9), (8, 9)]);
        assert_eq!(closed_partitions(&five).unwrap().len(), 51);
        let cyc: Vec<(Vertex, Vertex)> = (0..10).map(|i| (i, (i + 1) % 10)).collect();
        assert!(closed_partitions(&g(10, &cyc)).unwrap().is_empty());
        let t = g(10, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 8), (8, 9), (6, 9)]);
        let ps = closed_partitions(&t).unwrap();
        // {3∪3 | 4} and {3∪3∪... } variants: odd cycles must share a piece
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].shape(), vec![4, 6]);
    }

    #[test]
    fn wtilde_sizes() {
        let wt = WTilde::new(6).unwrap();
        assert_eq!(wt.len(), 60);
        let c = wt.census();
        assert_eq!(c[&vec![2, 4]], 45);
        assert_eq!(c[&vec![2, 2, 2]], 15);
        assert!(WTilde::new(4).is_err());
        assert!(wt.terms().iter().all(PartitionedTerm::is_basis_form));
    }

    #[test]
    fn merging_lies_in_q_n6() {
        let wt = WTilde::new(6).unwrap();
        let sp = Spaces::new(6).unwrap();
        let ps = PieceStraightener::new();
        let q = q_kernel(&wt, &sp);
        assert_eq!(q.rank(), 45);
        let m = merging_relations(&wt, &ps);
        assert_eq!(m.len(), 15 * 3);
        for c in &m {
            assert!(q.contains_rationally(c));
        }
    }

    #[test]
    fn merging_is_associative() {
        let ps = PieceStraightener::new();
        let gr = g(8, &[(0, 5), (0, 5), (1, 6), (1, 6), (2, 7), (2, 7), (3, 4), (3, 4)]);
        let p = EvenPartition::new(8, vec![vec![0, 5], vec![1, 6], vec![2, 7], vec![3, 4]]).unwrap();
        let a = p.merge(0, 1);
        let a = {
            let i = a.pieces().iter().position(|x| x.contains(&0)).unwrap();
            let j = a.pieces().iter().position(|x| x.contains(&2)).unwrap();
            a.merge(i, j)
        };
        let direct = ps.express(&gr, &a).unwrap();
        // staged: straighten inside {0,1,5,6} first, then inside the union
        let mid = ps.express(&gr, &p.merge(0, 1)).unwrap();
        let mut staged = TermVector::new();
        for (t, c) in mid {
            tv_add_scaled(&mut staged, &ps.express(&t.graph, &a).unwrap(), &c);
        }
        assert_eq!(direct, staged);
    }

    #[test]
    fn no_odd_exchange_below_twelve() {
        let ps = PieceStraightener::new();
        assert!(odd_exchange_relations(10, &ps).unwrap().is_empty());
    }

    #[test]
    fn exchange_chain_n14() {
        let ps = PieceStraightener::new();
        // U1 = triangle 0-1-2 ∪ doubled 3-4; U2, U3, U4 triangles
        let gr = g(
            14,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (3, 4), (5, 6), (6, 7), (5, 7), (8, 9), (9, 10), (8, 10), (11, 12), (12, 13), (11, 13)],
        );
        let u = [&[0, 1, 2, 3, 4][..], &[5, 6, 7][..], &[8, 9, 10][..], &[11, 12, 13][..]];
        match odd_exchange_as_merging_chain(&ps, &gr, u).unwrap() {
            ExchangeChain::Chain(steps) => assert_eq!(steps.len(), 4),
            ExchangeChain::NotApplicable => panic!("expected a chain"),
        }
        let u = [&[0, 1, 2][..], &[5, 6, 7][..], &[8, 9, 10][..], &[3, 4, 11, 12, 13][..]];
        let _ = u;
        let single = g(12, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 8), (6, 8), (9, 10), (10, 11), (9, 11)]);
        let u = [&[0, 1, 2][..], &[3, 4, 5][..], &[6, 7, 8][..], &[9, 10, 11][..]];
        assert!(matches!(
            odd_exchange_as_merging_chain(&ps, &single, u).unwrap(),
            ExchangeChain::NotApplicable
        ));
    }

    #[test]
    fn lifts_round_trip() {
        let ps = PieceStraightener::new();
        // two triangles in one piece, a 4-cycle in another, doubled edge in a third
        let gr = g(12, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 8), (8, 9), (6, 9), (10, 11), (10, 11)]);
        let p = EvenPartition::new(12, vec![vec![0, 1, 2, 3, 4, 5], vec![6, 7, 8, 9], vec![10, 11]]).unwrap();
        let q = p.merge(1, 2);
        let l = lift_merging_relation(&ps, &gr, &p, &q).unwrap();
        assert!(l.in_p && l.round_trip);
        assert!(l.expansions >= 1);
        for t in l.terms.keys() {
            let u = t.first.union(&t.second);
            assert_eq!(cycle_decomposition(&u).unwrap().num_odd(), 0);
        }
        // all even already: one expansion
        let ev = g(8, &[(0, 1), (0, 1), (2, 3), (3, 4), (4, 5), (2, 5), (6, 7), (6, 7)]);
        let p = EvenPartition::new(8, vec![vec![0, 1], vec![2, 3, 4, 5], vec![6, 7]]).unwrap();
        let l = lift_merging_relation(&ps, &ev, &p, &p.merge(0, 2)).unwrap();
        assert_eq!(l.expansions, 1);
        assert!(l.in_p && l.round_trip);
    }

    #[test]
    fn surjective_n6() {
        let r = surjectivity_check(6, &[3]).unwrap();
        for &(p, rv, rw) in &r.ranks {
            assert_eq!(rv, r.tensor_dim, "prime {p}");
            assert_eq!(rw, r.w_dim, "prime {p}");
        }
    }
}
