//! Formal linear combinations of graphs and the straightening algorithm.
//!
//! A [`GraphVector`] is a finite combination of canonical graphs with
//! coefficients in an exact [`Ring`]. Straightening rewrites it in the planar
//! basis by repeatedly applying the Plücker relation
//!
//! ```text
//! X[ab cd] = X[ad cb] + X[ac bd]
//! ```
//!
//! to the lexicographically smallest crossing pair. The integer potential
//! `sum d(n-d)` strictly drops at each split, so the worklist is drained in
//! decreasing potential order and every graph is expanded at most once.

pub mod identities;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, GraphError, Result};
use crate::graphs::{cycle_decomposition, allowable_pair_in, CanonicalGraph, Edge, SignedGraph, Vertex};
use crate::ring::{Rationals, Ring};

/// Finite `R`-linear combination of canonical graphs. Zero coefficients are
/// never stored.
#[derive(Clone, Debug)]
pub struct GraphVector<R: Ring> {
    ring: R,
    terms: BTreeMap<CanonicalGraph, R::Elem>,
}

impl<R: Ring> PartialEq for GraphVector<R> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<R: Ring> GraphVector<R> {
    pub fn zero(ring: R) -> Self {
        GraphVector {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_graph(ring: R, g: CanonicalGraph) -> Self {
        let one = ring.one();
        let mut v = GraphVector::zero(ring);
        v.add_term(g, one);
        v
    }

    pub fn from_signed(ring: R, sg: &SignedGraph) -> Self {
        let mut v = GraphVector::zero(ring);
        let c = v.ring.from_i64(sg.sign as i64);
        v.add_term(sg.graph.clone(), c);
        v
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn add_term(&mut self, g: CanonicalGraph, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(slot) => {
                self.ring.add_assign(slot, &c);
                if self.ring.is_zero(slot) {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    /// Add `c * sign * X_graph`.
    pub fn add_signed(&mut self, sg: &SignedGraph, c: &R::Elem) {
        let c = self.ring.signed(c, sg.sign);
        self.add_term(sg.graph.clone(), c);
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &GraphVector<R>, c: &R::Elem) {
        for (g, d) in &other.terms {
            let cd = self.ring.mul(c, d);
            self.add_term(g.clone(), cd);
        }
    }

    pub fn add_vector(&mut self, other: &GraphVector<R>) {
        for (g, d) in &other.terms {
            self.add_term(g.clone(), d.clone());
        }
    }

    pub fn sub_vector(&mut self, other: &GraphVector<R>) {
        for (g, d) in &other.terms {
            let nd = self.ring.neg(d);
            self.add_term(g.clone(), nd);
        }
    }

    pub fn scale(&self, c: &R::Elem) -> GraphVector<R> {
        let mut out = GraphVector::zero(self.ring.clone());
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> GraphVector<R> {
        let m = self.ring.from_i64(-1);
        self.scale(&m)
    }

    pub fn coeff(&self, g: &CanonicalGraph) -> Option<&R::Elem> {
        self.terms.get(g)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalGraph, &R::Elem)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<CanonicalGraph, R::Elem> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_planar_supported(&self) -> bool {
        self.terms.keys().all(|g| g.is_planar())
    }

    /// Coefficient-wise ring change.
    pub fn map_ring<S: Ring>(&self, target: S, f: impl Fn(&R::Elem) -> S::Elem) -> GraphVector<S> {
        let mut out = GraphVector::zero(target);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), f(c));
        }
        out
    }

    /// Common vertex count, if non-empty.
    pub fn n(&self) -> Option<usize> {
        self.terms.keys().next().map(|g| g.n())
    }
}

impl<R: Ring> fmt::Display for GraphVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", self.ring.render(c), g)?;
        }
        Ok(())
    }
}

/// The two terms of the Plücker relation on slots `i`, `j`.
///
/// With `e_i = a-b` and `e_j = c-d` (canonical, so `a<b`, `c<d`) this returns
/// the canonical forms of `[.. a-d c-b ..]` and `[.. a-c b-d ..]`, signs
/// included, so that `X = X' + X''` as bracket polynomials.
pub fn pluecker_split(g: &CanonicalGraph, i: usize, j: usize) -> Result<(SignedGraph, SignedGraph)> {
    let e1 = g.edges()[i];
    let e2 = g.edges()[j];
    let (a, b, c, d) = (e1.0, e1.1, e2.0, e2.1);
    if a == c || a == d || b == c || b == d || i == j {
        return Err(GraphError::OverlappingEndpoints(e1, e2).into());
    }
    let first = g
        .replace_pair(i, j, Edge(a, d), Edge(c, b))
        .expect("distinct endpoints give no loop");
    let second = g
        .replace_pair(i, j, Edge(a, c), Edge(b, d))
        .expect("distinct endpoints give no loop");
    Ok((first, second))
}

/// One recorded step of a rewriting run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Plucker {
        graph: CanonicalGraph,
        e1: Edge,
        e2: Edge,
        /// `None` when allowability does not apply (degree != 2).
        allowed: Option<bool>,
    },
    Case {
        label: String,
        graph: CanonicalGraph,
    },
    Identity {
        name: String,
        graph: CanonicalGraph,
        sites: Vec<Vertex>,
        allowed: bool,
    },
    Merge {
        detail: String,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Plucker { e1, e2, allowed, .. } => {
                let tag = match allowed {
                    Some(true) => "ALLOWED",
                    Some(false) => "FORBIDDEN",
                    None => "UNCHECKED",
                };
                write!(f, "PLUCKER {} {} {}", e1, e2, tag)
            }
            TraceEvent::Case { label, graph } => write!(f, "CASE {} {}", label, graph),
            TraceEvent::Identity {
                name,
                graph,
                sites,
                allowed,
            } => {
                let s: Vec<String> = sites.iter().map(|v| v.to_string()).collect();
                let tag = if *allowed { "ALLOWED" } else { "FORBIDDEN" };
                write!(f, "IDENTITY {} at {} on {} {}", name, s.join(","), graph, tag)
            }
            TraceEvent::Merge { detail } => write!(f, "MERGE {}", detail),
        }
    }
}

/// Log of rewriting moves. Counting is always on; individual events are only
/// kept when `record` is set, since full straightening traces get long.
#[derive(Clone, Debug, Default)]
pub struct ReductionTrace {
    pub events: Vec<TraceEvent>,
    pub record: bool,
    /// Compute the allowability of every Plücker move (degree-2 graphs).
    pub check_allowable: bool,
    pub moves: usize,
    pub forbidden: usize,
    pub identities: usize,
}

impl ReductionTrace {
    pub fn recording() -> Self {
        ReductionTrace {
            record: true,
            check_allowable: true,
            ..Default::default()
        }
    }

    pub fn counting() -> Self {
        ReductionTrace {
            record: false,
            check_allowable: true,
            ..Default::default()
        }
    }

    pub fn silent() -> Self {
        ReductionTrace::default()
    }

    fn plucker(&mut self, g: &CanonicalGraph, i: usize, j: usize) {
        self.moves += 1;
        let allowed = if self.check_allowable {
            cycle_decomposition(g).ok().map(|cd| allowable_pair_in(&cd, i, j))
        } else {
            None
        };
        if allowed == Some(false) {
            self.forbidden += 1;
        }
        if self.record {
            self.events.push(TraceEvent::Plucker {
                graph: g.clone(),
                e1: g.edges()[i],
                e2: g.edges()[j],
                allowed,
            });
        }
    }

    pub fn case(&mut self, label: &str, g: &CanonicalGraph) {
        if self.record {
            self.events.push(TraceEvent::Case {
                label: label.to_string(),
                graph: g.clone(),
            });
        }
    }

    pub fn identity(&mut self, name: &str, g: &CanonicalGraph, sites: &[Vertex], allowed: bool) {
        self.identities += 1;
        if !allowed {
            self.forbidden += 1;
        }
        if self.record {
            self.events.push(TraceEvent::Identity {
                name: name.to_string(),
                graph: g.clone(),
                sites: sites.to_vec(),
                allowed,
            });
        }
    }

    pub fn merge(&mut self, detail: String) {
        if self.record {
            self.events.push(TraceEvent::Merge { detail });
        }
    }

    /// Fold another trace into this one.
    pub fn absorb(&mut self, other: ReductionTrace) {
        self.moves += other.moves;
        self.forbidden += other.forbidden;
        self.identities += other.identities;
        if self.record {
            self.events.extend(other.events);
        }
    }

    pub fn lines(&self) -> Vec<String> {
        self.events.iter().map(|e| e.to_string()).collect()
    }
}

/// Drain `start` through Plücker splits on eligible crossing pairs.
///
/// Returns the rewritten vector together with the graphs that still cross but
/// have no eligible pair (they are also present in the vector).
pub fn rewrite<R: Ring>(
    start: &GraphVector<R>,
    eligible: &dyn Fn(&CanonicalGraph, usize, usize) -> bool,
    trace: &mut ReductionTrace,
) -> (GraphVector<R>, Vec<CanonicalGraph>) {
    let ring = start.ring.clone();
    let mut work: BTreeMap<(u64, CanonicalGraph), R::Elem> = BTreeMap::new();
    for (g, c) in start.terms() {
        work.insert((g.potential(), g.clone()), c.clone());
    }
    let mut out = GraphVector::zero(ring.clone());
    let mut stuck = Vec::new();
    while let Some(((_, g), c)) = work.pop_last() {
        if ring.is_zero(&c) {
            continue;
        }
        let pair = first_eligible_crossing(&g, eligible);
        match pair {
            None => {
                if !g.is_planar() {
                    stuck.push(g.clone());
                }
                out.add_term(g, c);
            }
            Some((i, j)) => {
                trace.plucker(&g, i, j);
                let (p, q) = pluecker_split(&g, i, j).expect("crossing edges have distinct endpoints");
                for sg in [p, q] {
                    let cc = ring.signed(&c, sg.sign);
                    push_work(&ring, &mut work, sg.graph, cc);
                }
            }
        }
    }
    stuck.sort();
    stuck.dedup();
    (out, stuck)
}

fn push_work<R: Ring>(ring: &R, work: &mut BTreeMap<(u64, CanonicalGraph), R::Elem>, g: CanonicalGraph, c: R::Elem) {
    let key = (g.potential(), g);
    match work.get_mut(&key) {
        Some(slot) => ring.add_assign(slot, &c),
        None => {
            work.insert(key, c);
        }
    }
}

fn first_eligible_crossing(
    g: &CanonicalGraph,
    eligible: &dyn Fn(&CanonicalGraph, usize, usize) -> bool,
) -> Option<(usize, usize)> {
    let es = g.edges();
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            if crate::graphs::edges_cross(es[i], es[j]) && eligible(g, i, j) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Straightening to the planar basis, with an optional concurrent memo of
/// single-graph expansions.
#[derive(Debug)]
pub struct Straightener<R: Ring> {
    ring: R,
    memo: Option<DashMap<CanonicalGraph, Arc<GraphVector<R>>>>,
}

impl<R: Ring> Straightener<R> {
    pub fn new(ring: R) -> Self {
        Straightener { ring, memo: None }
    }

    pub fn with_memo(ring: R) -> Self {
        Straightener {
            ring,
            memo: Some(DashMap::new()),
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.len())
    }

    pub fn clear_memo(&self) {
        if let Some(m) = &self.memo {
            m.clear();
        }
    }

    pub fn straighten_graph(&self, g: &CanonicalGraph) -> Arc<GraphVector<R>> {
        if let Some(m) = &self.memo {
            if let Some(hit) = m.get(g) {
                return hit.clone();
            }
        }
        let v = GraphVector::from_graph(self.ring.clone(), g.clone());
        let (out, _) = rewrite(&v, &|_, _, _| true, &mut ReductionTrace::silent());
        let out = Arc::new(out);
        if let Some(m) = &self.memo {
            m.insert(g.clone(), out.clone());
        }
        out
    }

    pub fn straighten(&self, v: &GraphVector<R>) -> GraphVector<R> {
        if self.memo.is_none() {
            return rewrite(v, &|_, _, _| true, &mut ReductionTrace::silent()).0;
        }
        let mut out = GraphVector::zero(self.ring.clone());
        for (g, c) in v.terms() {
            if g.is_planar() {
                out.add_term(g.clone(), c.clone());
            } else {
                out.add_scaled(&self.straighten_graph(g), c);
            }
        }
        out
    }
}

/// Straighten to the planar basis (no memo).
pub fn straighten<R: Ring>(v: &GraphVector<R>) -> GraphVector<R> {
    rewrite(v, &|_, _, _| true, &mut ReductionTrace::silent()).0
}

/// Straighten using only crossing pairs accepted by `allowed`.
pub fn straighten_restricted<R: Ring>(
    v: &GraphVector<R>,
    allowed: &dyn Fn(&CanonicalGraph, usize, usize) -> bool,
) -> (GraphVector<R>, ReductionTrace, Vec<CanonicalGraph>) {
    let mut trace = ReductionTrace::recording();
    let (out, stuck) = rewrite(v, allowed, &mut trace);
    (out, trace, stuck)
}

/// Straighten only the edges with both endpoints in `inside` (a vertex mask);
/// all other edges are held fixed. Allowability of each move is counted in
/// `trace`.
pub fn straighten_within<R: Ring>(
    v: &GraphVector<R>,
    inside: &[bool],
    trace: &mut ReductionTrace,
) -> GraphVector<R> {
    let pred = |g: &CanonicalGraph, i: usize, j: usize| {
        let e = g.edges()[i];
        let f = g.edges()[j];
        inside[e.0 as usize] && inside[e.1 as usize] && inside[f.0 as usize] && inside[f.1 as usize]
    };
    rewrite(v, &pred, trace).0
}

/// Allowable Plücker pairs only.
pub fn allowable_predicate(g: &CanonicalGraph, i: usize, j: usize) -> bool {
    crate::graphs::allowable_pair(g, i, j).unwrap_or(false)
}

/// Points `(x_v, y_v)` for each vertex; an edge `a -> b` evaluates to
/// `x_a y_b - x_b y_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointAssignment {
    pub points: Vec<(BigRational, BigRational)>,
}

impl PointAssignment {
    pub fn new(points: Vec<(BigRational, BigRational)>) -> Self {
        PointAssignment { points }
    }

    pub fn from_integers(points: &[(i64, i64)]) -> Self {
        PointAssignment {
            points: points
                .iter()
                .map(|&(x, y)| (BigRational::from_integer(x.into()), BigRational::from_integer(y.into())))
                .collect(),
        }
    }

    /// Random integer points in `[-bound, bound]^2`.
    pub fn random(n: usize, bound: i64, rng: &mut impl rand::Rng) -> Self {
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
            .collect();
        PointAssignment::from_integers(&pts)
    }

    pub fn bracket(&self, a: Vertex, b: Vertex) -> BigRational {
        let (xa, ya) = &self.points[a as usize];
        let (xb, yb) = &self.points[b as usize];
        xa * yb - xb * ya
    }
}

pub fn evaluate_graph(g: &CanonicalGraph, p: &PointAssignment) -> BigRational {
    let mut acc = BigRational::from_integer(BigInt::from(1));
    for e in g.edges() {
        acc *= p.bracket(e.0, e.1);
    }
    acc
}

/// `sum coeff * prod brackets`; fails for coefficient rings outside Q.
pub fn evaluate<R: Ring>(v: &GraphVector<R>, p: &PointAssignment) -> Result<BigRational> {
    let n = p.points.len();
    // integer points: multiply brackets as integers, one table per call
    let integral = p.points.iter().all(|(x, y)| x.is_integer() && y.is_integer());
    let table: Option<Vec<BigInt>> = integral.then(|| {
        (0..n * n)
            .map(|ab| p.bracket((ab / n) as Vertex, (ab % n) as Vertex).to_integer())
            .collect()
    });
    let mut acc = BigRational::zero();
    for (g, c) in v.terms() {
        let q = v
            .ring()
            .to_rational(c)
            .ok_or_else(|| Error::Hypothesis("evaluation needs coefficients in Q".into()))?;
        let x = match &table {
            Some(t) => {
                let mut m = BigInt::from(1);
                for e in g.edges() {
                    m *= &t[e.0 as usize * n + e.1 as usize];
                }
                BigRational::from_integer(m)
            }
            None => evaluate_graph(g, p),
        };
        acc += q * x;
    }
    Ok(acc)
}

/// Embed an integer vector into Q.
pub fn to_rationals<R: Ring>(v: &GraphVector<R>) -> GraphVector<Rationals> {
    v.map_ring(Rationals, |c| v.ring().to_rational(c).expect("coefficients embed in Q"))
}
