//! Regular directed multigraphs on a fixed circular embedding.
//!
//! Vertices are labelled `0..n` and sit on the unit circle in numeric order.
//! A graph is stored in canonical form: every edge is oriented from the lower
//! label to the higher one and the edge list is sorted. Reversing an edge
//! flips the sign of the corresponding invariant, so canonicalization returns
//! the sign picked up along the way.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::GraphError;

pub type Vertex = u8;

/// A directed edge `tail -> head`. `tail == head` is a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(tail: Vertex, head: Vertex) -> Edge {
        Edge(tail, head)
    }

    pub fn tail(self) -> Vertex {
        self.0
    }

    pub fn head(self) -> Vertex {
        self.1
    }

    pub fn is_loop(self) -> bool {
        self.0 == self.1
    }

    /// Orient low -> high. Returns the oriented edge and whether it was reversed.
    pub fn oriented(self) -> (Edge, bool) {
        if self.0 <= self.1 {
            (self, false)
        } else {
            (Edge(self.1, self.0), true)
        }
    }

    pub fn lo(self) -> Vertex {
        self.0.min(self.1)
    }

    pub fn hi(self) -> Vertex {
        self.0.max(self.1)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`.
    pub fn other(self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    /// Circular distance-free length `hi - lo`, the quantity the termination
    /// potential is built from.
    pub fn span(self) -> u32 {
        (self.hi() - self.lo()) as u32
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// True iff the chords cross in the interior of the disc.
///
/// Edges sharing an endpoint never cross, and neither do parallel copies.
pub fn edges_cross(e1: Edge, e2: Edge) -> bool {
    if e1.is_loop() || e2.is_loop() {
        return false;
    }
    let (a, b) = (e1.lo(), e1.hi());
    let (c, d) = (e2.lo(), e2.hi());
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Sign of a signed term. Stored as `i8` so it multiplies cheaply.
pub type Sign = i8;

pub type EdgeList = SmallVec<[Edge; 16]>;

/// A graph in canonical form: loop-free, edges oriented low -> high, sorted.
///
/// Graphs coming out of [`canonicalize`] are regular. Loose-ended local
/// patterns (used to state the long identities) go through
/// [`canonicalize_partial`] and need not be regular.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalGraph {
    n: u8,
    edges: EdgeList,
}

impl PartialOrd for CanonicalGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.edges.as_slice().cmp(other.edges.as_slice()))
    }
}

/// A canonical graph together with the sign picked up by canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraph {
    pub graph: CanonicalGraph,
    pub sign: Sign,
}

fn degree_sequence(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for e in edges {
        deg[e.0 as usize] += 1;
        deg[e.1 as usize] += 1;
    }
    deg
}

fn check_labels(n: usize, edges: &[Edge]) -> Result<(), GraphError> {
    if n < 2 || n > 64 {
        return Err(GraphError::BadVertexCount(n));
    }
    for e in edges {
        if e.0 as usize >= n || e.1 as usize >= n {
            return Err(GraphError::LabelOutOfRange { edge: *e, n });
        }
    }
    Ok(())
}

fn canonical_unchecked(n: usize, edges: &[Edge]) -> Option<SignedGraph> {
    let mut out: EdgeList = SmallVec::with_capacity(edges.len());
    let mut sign: Sign = 1;
    for &e in edges {
        if e.is_loop() {
            return None;
        }
        let (o, rev) = e.oriented();
        if rev {
            sign = -sign;
        }
        out.push(o);
    }
    out.sort_unstable();
    Some(SignedGraph {
        graph: CanonicalGraph { n: n as u8, edges: out },
        sign,
    })
}

/// Canonical form of a regular directed multigraph.
///
/// Returns `Ok(None)` when the graph has a loop (the invariant vanishes),
/// otherwise the canonical graph and `(-1)^(number of reversed edges)`.
pub fn canonicalize(n: usize, edges: &[Edge]) -> Result<Option<SignedGraph>, GraphError> {
    check_labels(n, edges)?;
    let deg = degree_sequence(n, edges);
    if deg.iter().any(|&d| d != deg[0]) {
        return Err(GraphError::NotRegular { degrees: deg });
    }
    Ok(canonical_unchecked(n, edges))
}

/// Like [`canonicalize`] but accepts non-regular edge multisets.
pub fn canonicalize_partial(n: usize, edges: &[Edge]) -> Result<Option<SignedGraph>, GraphError> {
    check_labels(n, edges)?;
    Ok(canonical_unchecked(n, edges))
}

impl CanonicalGraph {
    /// Build from edges already known to be oriented and loop-free; sorts them.
    pub(crate) fn from_oriented(n: usize, mut edges: EdgeList) -> CanonicalGraph {
        debug_assert!(edges.iter().all(|e| e.0 < e.1));
        edges.sort_unstable();
        CanonicalGraph { n: n as u8, edges }
    }

    /// Canonical graph from undirected pairs; orientation is forced low -> high.
    pub fn from_pairs(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<CanonicalGraph, GraphError> {
        let edges: Vec<Edge> = pairs.iter().map(|&(a, b)| Edge(a, b)).collect();
        match canonicalize(n, &edges)? {
            Some(sg) => Ok(sg.graph),
            None => Err(GraphError::Loop),
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        degree_sequence(self.n(), &self.edges)
    }

    /// Common valence if the graph is regular.
    pub fn degree(&self) -> Option<usize> {
        let deg = self.degrees();
        if deg.iter().all(|&d| d == deg[0]) {
            Some(deg[0])
        } else {
            None
        }
    }

    /// Edge multiset union on the same vertex set. Canonical inputs give a
    /// canonical output with sign +1.
    pub fn union(&self, other: &CanonicalGraph) -> CanonicalGraph {
        assert_eq!(self.n, other.n, "union of graphs on different vertex sets");
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        CanonicalGraph::from_oriented(self.n(), edges)
    }

    /// Replace the edges at slots `i` and `j` by `new_i`, `new_j` (directed)
    /// and canonicalize. `None` if a loop appears.
    pub fn replace_pair(&self, i: usize, j: usize, new_i: Edge, new_j: Edge) -> Option<SignedGraph> {
        let mut edges: Vec<Edge> = self.edges.to_vec();
        edges[i] = new_i;
        edges[j] = new_j;
        canonical_unchecked(self.n(), &edges)
    }

    /// Graph with the given edge slots removed (not necessarily regular).
    pub fn without_slots(&self, slots: &[usize]) -> CanonicalGraph {
        let edges: EdgeList = self
            .edges
            .iter()
            .enumerate()
            .filter(|(k, _)| !slots.contains(k))
            .map(|(_, e)| *e)
            .collect();
        CanonicalGraph { n: self.n, edges }
    }

    /// Edges restricted to a vertex subset (both endpoints inside).
    pub fn restrict(&self, vertices: &[Vertex]) -> CanonicalGraph {
        let edges: EdgeList = self
            .edges
            .iter()
            .filter(|e| vertices.contains(&e.0) && vertices.contains(&e.1))
            .copied()
            .collect();
        CanonicalGraph { n: self.n, edges }
    }

    /// Crossing slot pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                if edges_cross(self.edges[i], self.edges[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Lexicographically smallest crossing pair of slots.
    pub fn first_crossing(&self) -> Option<(usize, usize)> {
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                if edges_cross(self.edges[i], self.edges[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_planar(&self) -> bool {
        self.first_crossing().is_none()
    }

    /// Number of edge slots crossing the chord `e`.
    pub fn crossings_with(&self, e: Edge) -> usize {
        self.edges.iter().filter(|f| edges_cross(e, **f)).count()
    }

    /// Termination potential: sum over edge slots of `d * (n - d)`.
    pub fn potential(&self) -> u64 {
        let n = self.n as u64;
        self.edges
            .iter()
            .map(|e| {
                let d = e.span() as u64;
                d * (n - d)
            })
            .sum()
    }

    /// Multiplicity of the undirected pair `{a, b}`.
    pub fn multiplicity(&self, a: Vertex, b: Vertex) -> usize {
        let e = Edge(a.min(b), a.max(b));
        self.edges.iter().filter(|f| **f == e).count()
    }

    /// Slots whose edge contains `v`.
    pub fn slots_at(&self, v: Vertex) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(v))
            .map(|(k, _)| k)
            .collect()
    }

    /// Relabel the vertices through `map` (local -> host) onto a host vertex
    /// set of size `n`, canonicalizing. The sign accounts for edges whose
    /// orientation flips under the map.
    pub fn relabel(&self, n: usize, map: &[Vertex]) -> SignedGraph {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge(map[e.0 as usize], map[e.1 as usize]))
            .collect();
        canonical_unchecked(n, &edges).expect("relabelling through an injective map cannot create loops")
    }

    pub fn to_pairs(&self) -> Vec<[Vertex; 2]> {
        self.edges.iter().map(|e| [e.0, e.1]).collect()
    }
}

impl fmt::Display for CanonicalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, "]")
    }
}

/// One cycle of a degree-two graph. A doubled edge is a 2-cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// Vertices in traversal order, starting at the smallest one.
    pub vertices: Vec<Vertex>,
    /// Edge slots of the cycle, in traversal order.
    pub slots: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.vertices.len() % 2 == 1
    }

    pub fn sorted_vertices(&self) -> Vec<Vertex> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Cycle>,
    /// `slot_cycle[s]` is the index of the cycle containing slot `s`.
    pub slot_cycle: Vec<usize>,
    /// `vertex_cycle[v]` is the index of the cycle through `v`.
    pub vertex_cycle: Vec<usize>,
}

impl CycleDecomposition {
    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.len()).collect()
    }

    pub fn num_odd(&self) -> usize {
        self.cycles.iter().filter(|c| c.is_odd()).count()
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// Cycles of a degree-two graph.
pub fn cycle_decomposition(g: &CanonicalGraph) -> Result<CycleDecomposition, GraphError> {
    let n = g.n();
    let mut incident: Vec<SmallVec<[usize; 2]>> = vec![SmallVec::new(); n];
    for (s, e) in g.edges().iter().enumerate() {
        incident[e.0 as usize].push(s);
        incident[e.1 as usize].push(s);
    }
    if incident.iter().any(|v| v.len() != 2) {
        return Err(GraphError::NotDegreeTwo { degrees: g.degrees() });
    }
    let mut slot_cycle = vec![usize::MAX; g.num_edges()];
    let mut vertex_cycle = vec![usize::MAX; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if vertex_cycle[start] != usize::MAX {
            continue;
        }
        let idx = cycles.len();
        let mut vertices = vec![start as Vertex];
        let mut slots = Vec::new();
        vertex_cycle[start] = idx;
        let mut cur = start as Vertex;
        // leave through the slot whose other end is smaller, for a stable walk
        let first = {
            let [s0, s1] = [incident[start][0], incident[start][1]];
            let o0 = g.edges()[s0].other(cur);
            let o1 = g.edges()[s1].other(cur);
            if o0 <= o1 {
                s0
            } else {
                s1
            }
        };
        let mut slot = first;
        loop {
            slot_cycle[slot] = idx;
            slots.push(slot);
            let next = g.edges()[slot].other(cur);
            if next as usize == start {
                break;
            }
            vertex_cycle[next as usize] = idx;
            vertices.push(next);
            let inc = &incident[next as usize];
            slot = if inc[0] == slot { inc[1] } else { inc[0] };
            cur = next;
        }
        cycles.push(Cycle { vertices, slots });
    }
    Ok(CycleDecomposition {
        cycles,
        slot_cycle,
        vertex_cycle,
    })
}

/// Connected, or exactly two odd cycles.
pub fn is_forbidden(cd: &CycleDecomposition) -> bool {
    cd.len() == 1 || (cd.len() == 2 && cd.num_odd() == 2)
}

pub fn is_allowable(g: &CanonicalGraph) -> Result<bool, GraphError> {
    Ok(!is_forbidden(&cycle_decomposition(g)?))
}

/// Allowability of a Plücker move on slots `s1`, `s2` of an allowable graph.
pub fn allowable_pair_in(cd: &CycleDecomposition, s1: usize, s2: usize) -> bool {
    if is_forbidden(cd) {
        return false;
    }
    let c1 = cd.slot_cycle[s1];
    let c2 = cd.slot_cycle[s2];
    if cd.len() == 2 {
        return c1 == c2;
    }
    if cd.len() == 3 && cd.num_odd() == 2 {
        return cd.cycles[c1].is_odd() == cd.cycles[c2].is_odd();
    }
    true
}

pub fn allowable_pair(g: &CanonicalGraph, s1: usize, s2: usize) -> Result<bool, GraphError> {
    Ok(allowable_pair_in(&cycle_decomposition(g)?, s1, s2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuasiPlanarStatus {
    Planar,
    /// Non-planar; the listed doubled edges are distinguished (sorted).
    QuasiPlanar(Vec<Edge>),
    No,
}

/// Doubled edges (as oriented pairs) of a degree-two graph, sorted.
pub fn doubled_edges(g: &CanonicalGraph) -> Vec<Edge> {
    let mut out: Vec<Edge> = Vec::new();
    let es = g.edges();
    for k in 1..es.len() {
        if es[k] == es[k - 1] && out.last() != Some(&es[k]) {
            out.push(es[k]);
        }
    }
    out
}

/// Whether removing every copy of `e` leaves a planar graph and `e` crosses
/// exactly two edge slots.
pub fn is_distinguished(g: &CanonicalGraph, e: Edge) -> bool {
    let rest: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, f)| **f == e)
        .map(|(k, _)| k)
        .collect();
    let h = g.without_slots(&rest);
    h.is_planar() && h.crossings_with(e) == 2
}

pub fn quasi_planar_status(g: &CanonicalGraph) -> QuasiPlanarStatus {
    if g.is_planar() {
        return QuasiPlanarStatus::Planar;
    }
    let dist: Vec<Edge> = doubled_edges(g)
        .into_iter()
        .filter(|&e| g.multiplicity(e.0, e.1) == 2 && is_distinguished(g, e))
        .collect();
    if dist.is_empty() {
        QuasiPlanarStatus::No
    } else {
        QuasiPlanarStatus::QuasiPlanar(dist)
    }
}

pub fn is_quasi_planar(g: &CanonicalGraph) -> bool {
    !matches!(quasi_planar_status(g), QuasiPlanarStatus::No)
}

/// The planar cycle through `vertices` (sorted ascending): consecutive pairs
/// plus the closing chord. Two vertices give a doubled edge.
pub fn planar_cycle_edges(vertices: &[Vertex]) -> EdgeList {
    let mut v = vertices.to_vec();
    v.sort_unstable();
    let mut out: EdgeList = SmallVec::new();
    for w in v.windows(2) {
        out.push(Edge(w[0], w[1]));
    }
    out.push(Edge(v[0], v[v.len() - 1]));
    out
}

/// Replace the distinguished doubled edge `e` and the cycle it crosses by the
/// planar cycle on their union of vertices.
pub fn associated_planar_at(g: &CanonicalGraph, e: Edge) -> Result<CanonicalGraph, GraphError> {
    if !is_distinguished(g, e) || g.multiplicity(e.0, e.1) != 2 {
        return Err(GraphError::NotQuasiPlanar(g.to_string()));
    }
    let cd = cycle_decomposition(g)?;
    let crossed: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, f)| edges_cross(e, **f))
        .map(|(k, _)| cd.slot_cycle[k])
        .collect();
    if crossed.len() != 2 || crossed[0] != crossed[1] {
        return Err(GraphError::NotQuasiPlanar(g.to_string()));
    }
    let c = crossed[0];
    let ecycle = cd.vertex_cycle[e.0 as usize];
    let mut verts = cd.cycles[c].vertices.clone();
    verts.push(e.0);
    verts.push(e.1);
    let mut edges: EdgeList = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(k, _)| cd.slot_cycle[*k] != c && cd.slot_cycle[*k] != ecycle)
        .map(|(_, f)| *f)
        .collect();
    edges.extend(planar_cycle_edges(&verts));
    Ok(CanonicalGraph::from_oriented(g.n(), edges))
}

/// Associated planar graph, using the lexicographically smallest
/// distinguished doubled edge. Planar graphs map to themselves.
pub fn associated_planar(g: &CanonicalGraph) -> Result<CanonicalGraph, GraphError> {
    match quasi_planar_status(g) {
        QuasiPlanarStatus::Planar => Ok(g.clone()),
        QuasiPlanarStatus::QuasiPlanar(d) => associated_planar_at(g, d[0]),
        QuasiPlanarStatus::No => Err(GraphError::NotQuasiPlanar(g.to_string())),
    }
}

/// Number of cycles, minus one for non-planar quasi-planar graphs.
pub fn level(g: &CanonicalGraph) -> Result<usize, GraphError> {
    let cd = cycle_decomposition(g)?;
    match quasi_planar_status(g) {
        QuasiPlanarStatus::Planar => Ok(cd.len()),
        QuasiPlanarStatus::QuasiPlanar(_) => Ok(cd.len() - 1),
        QuasiPlanarStatus::No => Err(GraphError::NotQuasiPlanar(g.to_string())),
    }
}

/// Vertices whose removal of incident edges leaves a planar graph.
pub fn special_vertices(g: &CanonicalGraph) -> Vec<Vertex> {
    (0..g.n() as Vertex)
        .filter(|&v| g.without_slots(&g.slots_at(v)).is_planar())
        .collect()
}

pub fn is_semi_planar(g: &CanonicalGraph) -> bool {
    !special_vertices(g).is_empty()
}

/// Position of `x` walking clockwise (increasing labels) from `a`.
fn clockwise_offset(n: usize, a: Vertex, x: Vertex) -> usize {
    (x as usize + n - a as usize) % n
}

/// Cycles met along the chord `slot` leaving the special vertex `a`, in order
/// of first encounter.
fn skewered_along(g: &CanonicalGraph, cd: &CycleDecomposition, a: Vertex, slot: usize) -> Vec<usize> {
    let n = g.n();
    let e = g.edges()[slot];
    let b = e.other(a);
    let ob = clockwise_offset(n, a, b);
    let mut hits: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, f)| edges_cross(e, **f))
        .map(|(k, f)| {
            // the endpoint on the clockwise arc from a to b orders the chords:
            // nearer to a along that arc means nearer to a along the chord
            let o0 = clockwise_offset(n, a, f.0);
            let near = if o0 < ob { o0 } else { clockwise_offset(n, a, f.1) };
            (near, cd.slot_cycle[k])
        })
        .collect();
    hits.sort_unstable();
    let mut out = Vec::new();
    for (_, c) in hits {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Skewered cycles (indices into the cycle decomposition) of the special
/// vertex `a`, ordered from `a` outwards.
pub fn skewered_cycles(g: &CanonicalGraph, a: Vertex) -> Result<Vec<usize>, GraphError> {
    let cd = cycle_decomposition(g)?;
    skewered_cycles_in(g, &cd, a)
}

pub fn skewered_cycles_in(g: &CanonicalGraph, cd: &CycleDecomposition, a: Vertex) -> Result<Vec<usize>, GraphError> {
    if !special_vertices(g).contains(&a) {
        return Err(GraphError::NotSpecial(a));
    }
    let slots = g.slots_at(a);
    let first = skewered_along(g, cd, a, slots[0]);
    let second = skewered_along(g, cd, a, slots[1]);
    if first != second {
        return Err(GraphError::SkeweredMismatch(a));
    }
    Ok(first)
}

/// The last skewered cycle met from `a`, if any.
pub fn extreme_cycle(g: &CanonicalGraph, a: Vertex) -> Result<Option<usize>, GraphError> {
    Ok(skewered_cycles(g, a)?.last().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, pairs: &[(u8, u8)]) -> CanonicalGraph {
        CanonicalGraph::from_pairs(n, pairs).unwrap()
    }

    /// Doubled {4,7} with triangles {0,5,6} and {1,2,3}.
    pub(crate) fn fig1_left() -> CanonicalGraph {
        g(8, &[(4, 7), (4, 7), (0, 5), (5, 6), (0, 6), (1, 2), (2, 3), (1, 3)])
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(4, &[Edge(2, 1), Edge(0, 3)]).unwrap().unwrap();
        assert_eq!(c.graph.edges(), &[Edge(0, 3), Edge(1, 2)]);
        assert_eq!(c.sign, -1);
        assert!(canonicalize(3, &[Edge(0, 0), Edge(1, 2), Edge(2, 1)]).unwrap().is_none());
        let c = canonicalize(4, &[Edge(1, 0), Edge(3, 2)]).unwrap().unwrap();
        assert_eq!(c.graph.edges(), &[Edge(0, 1), Edge(2, 3)]);
        assert_eq!(c.sign, 1);
    }

    #[test]
    fn canonicalize_rejects_irregular() {
        let err = canonicalize(4, &[Edge(0, 1), Edge(1, 2)]).unwrap_err();
        match err {
            GraphError::NotRegular { degrees } => assert_eq!(degrees, vec![1, 2, 1, 0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonicalize_idempotent() {
        let c = canonicalize(6, &[Edge(5, 0), Edge(3, 1), Edge(2, 4)]).unwrap().unwrap();
        let again = canonicalize(6, c.graph.edges()).unwrap().unwrap();
        assert_eq!(again.sign, 1);
        assert_eq!(again.graph, c.graph);
    }

    #[test]
    fn crossing_examples() {
        assert!(edges_cross(Edge(0, 2), Edge(1, 3)));
        assert!(!edges_cross(Edge(0, 1), Edge(2, 3)));
        assert!(!edges_cross(Edge(0, 1), Edge(1, 2)));
        assert!(!edges_cross(Edge(0, 2), Edge(0, 2)));
        assert!(edges_cross(Edge(3, 1), Edge(2, 0)));
    }

    #[test]
    fn planarity_examples() {
        assert!(g(6, &[(0, 1), (2, 3), (4, 5)]).is_planar());
        assert!(!g(6, &[(0, 3), (1, 4), (2, 5)]).is_planar());
        assert!(!fig1_left().is_planar());
    }

    #[test]
    fn cycle_examples() {
        let cd = cycle_decomposition(&g(4, &[(0, 1), (0, 1), (2, 3), (2, 3)])).unwrap();
        assert_eq!(cd.lengths(), vec![2, 2]);
        let cd = cycle_decomposition(&g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)])).unwrap();
        assert_eq!(cd.lengths(), vec![6]);
        let cd = cycle_decomposition(&g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])).unwrap();
        assert_eq!(cd.lengths(), vec![3, 3]);
        assert!(cycle_decomposition(&g(4, &[(0, 1), (2, 3)])).is_err());
    }

    #[test]
    fn allowability_examples() {
        let two_triangles = g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert!(!is_allowable(&two_triangles).unwrap());
        let dbl_square = g(6, &[(0, 3), (0, 3), (1, 2), (2, 4), (4, 5), (1, 5)]);
        assert!(is_allowable(&dbl_square).unwrap());
        // slot of one copy of {0,3} against {1,2}
        let s03 = dbl_square.edges().iter().position(|e| *e == Edge(0, 3)).unwrap();
        let s12 = dbl_square.edges().iter().position(|e| *e == Edge(1, 2)).unwrap();
        assert!(!allowable_pair(&dbl_square, s03, s12).unwrap());
        let s24 = dbl_square.edges().iter().position(|e| *e == Edge(2, 4)).unwrap();
        assert!(allowable_pair(&dbl_square, s12, s24).unwrap());
    }

    #[test]
    fn three_cycles_two_odd_pairs() {
        // triangles {0,1,2}, {3,4,5} and doubled {6,7}
        let h = g(8, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (6, 7)]);
        let s01 = h.edges().iter().position(|e| *e == Edge(0, 1)).unwrap();
        let s34 = h.edges().iter().position(|e| *e == Edge(3, 4)).unwrap();
        let s67 = h.edges().iter().position(|e| *e == Edge(6, 7)).unwrap();
        assert!(allowable_pair(&h, s01, s34).unwrap());
        assert!(!allowable_pair(&h, s01, s67).unwrap());
    }

    #[test]
    fn fig1_quasi_planar() {
        let left = fig1_left();
        assert_eq!(quasi_planar_status(&left), QuasiPlanarStatus::QuasiPlanar(vec![Edge(4, 7)]));
        let right = associated_planar(&left).unwrap();
        let expected = g(8, &[(0, 4), (4, 5), (5, 6), (6, 7), (0, 7), (1, 2), (2, 3), (1, 3)]);
        assert_eq!(right, expected);
        assert!(right.is_planar());
        assert_eq!(level(&left).unwrap(), 2);
        assert_eq!(level(&right).unwrap(), 2);
        let sv = special_vertices(&left);
        assert!(sv.contains(&4) && sv.contains(&7));
    }

    #[test]
    fn quasi_planar_other_examples() {
        let p = g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(quasi_planar_status(&p), QuasiPlanarStatus::Planar);
        let small = g(6, &[(0, 3), (0, 3), (1, 2), (2, 4), (4, 5), (1, 5)]);
        assert_eq!(quasi_planar_status(&small), QuasiPlanarStatus::QuasiPlanar(vec![Edge(0, 3)]));
        let six_cycle = g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        assert_eq!(associated_planar(&small).unwrap(), six_cycle);
        assert_eq!(level(&small).unwrap(), 1);
        // the 6-cycle 1-2-3-5-6-7 meets chord 0-4 only at 3-5 and 1-7
        let h = g(8, &[(0, 4), (0, 4), (1, 2), (2, 3), (3, 5), (5, 6), (6, 7), (1, 7)]);
        assert_eq!(h.crossings_with(Edge(0, 4)), 2);
        assert_eq!(quasi_planar_status(&h), QuasiPlanarStatus::QuasiPlanar(vec![Edge(0, 4)]));
        let h = g(8, &[(0, 4), (0, 4), (1, 5), (5, 2), (2, 6), (6, 3), (3, 7), (1, 7)]);
        assert!(h.crossings_with(Edge(0, 4)) >= 3);
        assert_eq!(quasi_planar_status(&h), QuasiPlanarStatus::No);
    }

    #[test]
    fn level_of_doubled_pairs() {
        let h = g(10, &[(0, 1), (0, 1), (2, 3), (2, 3), (4, 5), (4, 5), (6, 7), (6, 7), (8, 9), (8, 9)]);
        assert_eq!(level(&h).unwrap(), 5);
    }

    #[test]
    fn interlocking_triangles_have_no_special_vertex() {
        let h = g(6, &[(0, 2), (2, 4), (0, 4), (1, 3), (3, 5), (1, 5)]);
        assert!(special_vertices(&h).is_empty());
        assert!(!is_semi_planar(&h));
    }

    #[test]
    fn planar_graphs_all_special() {
        let h = g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(special_vertices(&h).len(), 6);
    }

    #[test]
    fn skewered_examples() {
        let left = fig1_left();
        let cd = cycle_decomposition(&left).unwrap();
        let sk = skewered_cycles(&left, 4).unwrap();
        assert_eq!(sk.len(), 1);
        assert_eq!(cd.cycles[sk[0]].sorted_vertices(), vec![0, 5, 6]);
        assert_eq!(extreme_cycle(&left, 7).unwrap(), Some(sk[0]));
        assert!(skewered_cycles(&left, 1).is_err() || special_vertices(&left).contains(&1));
    }

    #[test]
    fn potential_decreases_on_splits() {
        // a<c<b<d with gaps s,t,u: first replacement drops by 2su,
        // second by 2t(n-s-t-u)
        let n = 10usize;
        let h = CanonicalGraph::from_oriented(n, smallvec::smallvec![Edge(1, 5), Edge(3, 8)]);
        let phi = h.potential();
        let a = CanonicalGraph::from_oriented(n, smallvec::smallvec![Edge(1, 8), Edge(3, 5)]);
        let b = CanonicalGraph::from_oriented(n, smallvec::smallvec![Edge(1, 3), Edge(5, 8)]);
        let (s, t, u) = (2u64, 2u64, 3u64);
        assert_eq!(phi - a.potential(), 2 * s * u);
        assert_eq!(phi - b.potential(), 2 * t * (n as u64 - s - t - u));
    }
}
