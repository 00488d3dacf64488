//! Quasi-planar graphs: the census of equivalence classes, the level
//! filtration, the ±2 comparison with the associated planar graph, moves of
//! the doubled edge inside a class, and the reduction of an allowable graph
//! to allowable quasi-planar graphs using allowable moves only.
//!
//! Everything stated about W′ is certified by projecting to the planar basis
//! of W; nothing here assumes that allowable Plücker relations generate all
//! relations among allowable graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::identities::{apply_identity, certify_allowable, certify_allowable_term, solve_identity, IdentityName};
use crate::algebra::{allowable_predicate, rewrite, GraphVector, ReductionTrace, Straightener};
use crate::enumerate;
use crate::error::{Error, GraphError, Result};
use crate::graphs::{
    associated_planar, associated_planar_at, canonicalize, cycle_decomposition, doubled_edges, edges_cross,
    is_allowable, is_distinguished, quasi_planar_status, skewered_cycles_in, special_vertices, CanonicalGraph,
    CycleDecomposition, Edge, EdgeList, QuasiPlanarStatus, Vertex,
};
use crate::partitions::{merging_rank_mod_p, merging_relations, PieceStraightener, WTilde};
use crate::relspaces::Spaces;
use crate::ring::{is_dyadic, Rationals};

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn check_even(what: &'static str, n: usize, min: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(GraphError::OddVertexCount(what, n).into());
    }
    if n < min {
        return Err(GraphError::TooSmall { what, min, n }.into());
    }
    Ok(())
}

/// Level of a planar or quasi-planar graph: its number of cycles, not
/// counting a distinguished doubled edge.
pub fn level_of(g: &CanonicalGraph) -> Result<usize> {
    Ok(crate::graphs::level(g)?)
}

// ---------------------------------------------------------------- census

#[derive(Clone, Debug)]
pub struct QpClass {
    pub planar: CanonicalGraph,
    pub planar_allowable: bool,
    pub level: usize,
    /// allowable quasi-planar graphs with this associated planar graph
    /// (the planar graph itself included when allowable)
    pub members: Vec<CanonicalGraph>,
}

#[derive(Clone, Debug)]
pub struct QpCensus {
    pub n: usize,
    pub planar: usize,
    pub planar_forbidden: usize,
    pub nonplanar_allowable: usize,
    /// graphs with two distinguished doubled edges
    pub two_distinguished: usize,
    /// of those, the ones whose two associated planar graphs differ
    pub ambiguous: usize,
    pub classes: Vec<QpClass>,
}

impl QpCensus {
    pub fn empty_classes(&self) -> Vec<&QpClass> {
        self.classes.iter().filter(|c| c.members.is_empty()).collect()
    }

    pub fn with_representative(&self) -> usize {
        self.classes.iter().filter(|c| !c.members.is_empty()).count()
    }

    /// Empty classes up to rotations and reflections of the circle; each
    /// entry is the smallest graph of its orbit.
    pub fn empty_orbits(&self) -> Vec<CanonicalGraph> {
        let mut out: Vec<CanonicalGraph> = self.empty_classes().iter().map(|c| dihedral_min(&c.planar)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn class_of(&self, planar: &CanonicalGraph) -> Option<&QpClass> {
        self.classes
            .binary_search_by(|c| c.planar.cmp(planar))
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn summary(&self) -> CensusSummary {
        let mut by_level: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for c in &self.classes {
            let e = by_level.entry(c.level).or_default();
            e.0 += 1;
            e.1 += c.members.len();
        }
        CensusSummary {
            n: self.n,
            planar_graphs: self.planar,
            planar_forbidden: self.planar_forbidden,
            nonplanar_allowable_quasi_planar: self.nonplanar_allowable,
            classes_with_representative: self.with_representative(),
            empty_classes: self.empty_classes().iter().map(|c| c.planar.to_string()).collect(),
            empty_orbits: self.empty_orbits().iter().map(|g| g.to_string()).collect(),
            two_distinguished: self.two_distinguished,
            ambiguous_association: self.ambiguous,
            by_level: by_level.into_iter().map(|(l, (c, m))| (l, c, m)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusSummary {
    pub n: usize,
    pub planar_graphs: usize,
    pub planar_forbidden: usize,
    pub nonplanar_allowable_quasi_planar: usize,
    pub classes_with_representative: usize,
    pub empty_classes: Vec<String>,
    pub empty_orbits: Vec<String>,
    pub two_distinguished: usize,
    pub ambiguous_association: usize,
    /// (level, classes, members)
    pub by_level: Vec<(usize, usize, usize)>,
}

/// Smallest image of `g` under the dihedral group of the circle.
pub fn dihedral_min(g: &CanonicalGraph) -> CanonicalGraph {
    let n = g.n();
    let mut best = g.clone();
    for k in 0..n {
        for flip in [false, true] {
            let map: Vec<Vertex> = (0..n)
                .map(|v| {
                    let r = (v + k) % n;
                    (if flip { n - 1 - r } else { r }) as Vertex
                })
                .collect();
            let h = g.relabel(n, &map).graph;
            if h < best {
                best = h;
            }
        }
    }
    best
}

/// Non-planar quasi-planar graphs: a doubled chord plus a planar graph on the
/// other vertices crossing it exactly twice.
pub fn nonplanar_quasi_planar(n: usize) -> Vec<CanonicalGraph> {
    let local = enumerate::planar_graphs(n - 2, 2);
    let mut pairs = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            pairs.push((u, v));
        }
    }
    let mut out: Vec<CanonicalGraph> = pairs
        .par_iter()
        .flat_map_iter(|&(u, v)| {
            let others: Vec<Vertex> = (0..n as Vertex).filter(|&x| x != u && x != v).collect();
            let e = Edge(u, v);
            local
                .iter()
                .filter_map(|h| {
                    let mut es: EdgeList = h
                        .edges()
                        .iter()
                        .map(|f| Edge(others[f.0 as usize], others[f.1 as usize]))
                        .collect();
                    let crossings = es.iter().filter(|f| edges_cross(e, **f)).count();
                    if crossings != 2 {
                        return None;
                    }
                    es.push(e);
                    es.push(e);
                    Some(CanonicalGraph::from_oriented(n, es))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Group allowable quasi-planar graphs by associated planar graph.
pub fn enumerate_quasi_planar(n: usize) -> Result<QpCensus> {
    check_even("quasi-planar census", n, 6)?;
    let planar = enumerate::planar_graphs(n, 2);
    let mut classes: Vec<QpClass> = planar
        .iter()
        .map(|p| {
            let allowable = is_allowable(p).unwrap_or(false);
            QpClass {
                planar: p.clone(),
                planar_allowable: allowable,
                level: cycle_decomposition(p).map(|cd| cd.len()).unwrap_or(0),
                members: if allowable { vec![p.clone()] } else { Vec::new() },
            }
        })
        .collect();
    let planar_forbidden = classes.iter().filter(|c| !c.planar_allowable).count();
    let candidates = nonplanar_quasi_planar(n);
    let tagged: Vec<(CanonicalGraph, CanonicalGraph, bool, bool)> = candidates
        .par_iter()
        .filter(|g| is_allowable(g).unwrap_or(false))
        .map(|g| {
            let d = match quasi_planar_status(g) {
                QuasiPlanarStatus::QuasiPlanar(d) => d,
                _ => unreachable!("constructed quasi-planar"),
            };
            let a = associated_planar_at(g, d[0]).expect("distinguished");
            let two = d.len() > 1;
            let amb = two && d[1..].iter().any(|&e| associated_planar_at(g, e).ok().as_ref() != Some(&a));
            (g.clone(), a, two, amb)
        })
        .collect();
    let mut two_distinguished = 0;
    let mut ambiguous = 0;
    let nonplanar_allowable = tagged.len();
    for (g, a, two, amb) in tagged {
        two_distinguished += two as usize;
        ambiguous += amb as usize;
        let i = classes
            .binary_search_by(|c| c.planar.cmp(&a))
            .map_err(|_| Error::Reduction(format!("associated graph {a} is not planar")))?;
        classes[i].members.push(g);
    }
    for c in classes.iter_mut() {
        c.members.sort();
    }
    Ok(QpCensus {
        n,
        planar: planar.len(),
        planar_forbidden,
        nonplanar_allowable,
        two_distinguished,
        ambiguous,
        classes,
    })
}

// ---------------------------------------------------------------- filtration

/// Planar graphs of `W` by level; a vector lies in F^i when its planar
/// expansion only uses graphs of level at least `i`.
pub struct LevelFiltration {
    pub n: usize,
    pub counts: BTreeMap<usize, usize>,
}

impl LevelFiltration {
    pub fn new(n: usize) -> Self {
        let mut counts = BTreeMap::new();
        for g in enumerate::planar_graphs(n, 2) {
            *counts.entry(cycle_decomposition(&g).map(|c| c.len()).unwrap_or(0)).or_insert(0) += 1;
        }
        LevelFiltration { n, counts }
    }

    /// dim F^i W.
    pub fn dim(&self, i: usize) -> usize {
        self.counts.range(i..).map(|(_, c)| c).sum()
    }

    /// Smallest level in the planar support, `None` for zero.
    pub fn min_level(planar: &GraphVector<Rationals>) -> Option<usize> {
        planar
            .terms()
            .map(|(g, _)| cycle_decomposition(g).map(|c| c.len()).unwrap_or(0))
            .min()
    }

    pub fn contains(planar: &GraphVector<Rationals>, i: usize) -> bool {
        Self::min_level(planar).map_or(true, |m| m >= i)
    }
}

// ---------------------------------------------------------------- ±2 comparison

/// The identity that trades a distinguished doubled edge `e` for its
/// associated planar picture, with its sites and the index of the term that
/// matches `g` (`None`: the left side). The two crossing edges run from
/// `x1, x2` inside the arc of `e` to `y1, y2` outside it:
/// four distinct ends use I1, a shared inside or outside end uses I2, and a
/// doubled crossing edge uses the square identity.
fn comparison_sites(g: &CanonicalGraph, e: Edge) -> Result<(IdentityName, Vec<Vertex>, Option<usize>)> {
    let crossing: Vec<Edge> = g.edges().iter().copied().filter(|f| edges_cross(e, *f)).collect();
    if crossing.len() != 2 {
        return Err(Error::Hypothesis(format!("{e} is crossed {} times in {g}", crossing.len())));
    }
    let (u, v) = (e.0, e.1);
    let n = g.n();
    let inside = |x: Vertex| u < x && x < v;
    let mut ends: Vec<(Vertex, Vertex)> = crossing
        .iter()
        .map(|f| if inside(f.0) { (f.0, f.1) } else { (f.1, f.0) })
        .collect();
    // inside ends ascending; outside ends by distance past v
    let past_v = |y: Vertex| (y as usize + n - v as usize) % n;
    ends.sort_by_key(|&(x, y)| (x, std::cmp::Reverse(past_v(y))));
    let (x1, y1) = ends[0];
    let (x2, y2) = ends[1];
    Ok(match (x1 == x2, y1 == y2) {
        (false, false) => (IdentityName::I1, vec![u, x1, x2, v, y2, y1], None),
        (true, false) => {
            let (near, far) = if past_v(y1) < past_v(y2) { (y1, y2) } else { (y2, y1) };
            (IdentityName::I2, vec![far, u, x1, v, near], Some(1))
        }
        (false, true) => (IdentityName::I2, vec![x2, v, y1, u, x1], Some(1)),
        (true, true) => (IdentityName::Sqr, vec![u, x1, v, y1], Some(1)),
    })
}

/// The term of the comparison identity that carries the planar picture of
/// the doubled edge: the first right-hand term of I1, otherwise the left side.
fn planar_picture(g: &CanonicalGraph, name: IdentityName, sites: &[Vertex], term: Option<usize>) -> Result<CanonicalGraph> {
    let id = crate::algebra::identities::Identity::get(name);
    let matched = match term {
        None => &id.lhs,
        Some(i) => &id.rhs[i].1,
    };
    let picture = match name {
        IdentityName::I1 => &id.rhs[0].1,
        _ => &id.lhs,
    };
    let push = |p: &[(Vertex, Vertex)]| -> Vec<Edge> {
        p.iter().map(|&(a, b)| Edge(sites[a as usize], sites[b as usize]).oriented().0).collect()
    };
    let mut es = crate::algebra::identities::remove_edges(g, &push(matched))
        .ok_or_else(|| Error::Hypothesis(format!("{} pattern not in {g}", name.as_str())))?;
    es.extend(push(picture));
    canonicalize(g.n(), &es)?
        .map(|sg| sg.graph)
        .ok_or_else(|| Error::Reduction("planar picture degenerates".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub graph: String,
    pub edge: String,
    pub planar: String,
    pub level: usize,
    pub identity: String,
    /// `X_Γ ≡ sign · 2 · X_Γ′` modulo F^{level+1}
    pub sign: i8,
    /// every other term of the identity has more cycles than the level
    pub other_terms_higher: bool,
    /// smallest level in the straightened remainder (None: remainder zero)
    pub remainder_min_level: Option<usize>,
    pub certified: bool,
}

/// Rewrite at the distinguished doubled edge `e` and certify
/// `X_Γ − 2·sign·X_Γ′ ∈ F^{i+1} W`.
pub fn two_comparison_at(g: &CanonicalGraph, e: Edge, w: &Straightener<Rationals>) -> Result<Comparison> {
    if g.is_planar() {
        return Err(Error::Hypothesis(format!("{g} is planar; the comparison is vacuous")));
    }
    if !is_distinguished(g, e) || g.multiplicity(e.0, e.1) != 2 {
        return Err(GraphError::NotQuasiPlanar(g.to_string()).into());
    }
    let level = level_of(g)?;
    let planar = associated_planar_at(g, e)?;
    let (name, sites, term) = comparison_sites(g, e)?;
    let expansion = solve_identity(g, name, &sites, term)?;
    let picture = planar_picture(g, name, &sites, term)?;
    if picture != planar {
        return Err(Error::Reduction(format!("{} picture {picture} is not the associated graph {planar}", name.as_str())));
    }
    let c = expansion.coeff(&planar).cloned().unwrap_or_else(BigRational::zero);
    let sign: i8 = if c == q(2) {
        1
    } else if c == q(-2) {
        -1
    } else {
        return Err(Error::Reduction(format!("coefficient {c} of the associated graph is not ±2")));
    };
    let mut rest = expansion.clone();
    rest.add_term(planar.clone(), -c);
    let other_terms_higher = rest
        .terms()
        .all(|(h, _)| cycle_decomposition(h).map(|cd| cd.len() > level).unwrap_or(false));
    let remainder = w.straighten(&rest);
    // the expansion must be X_Γ itself
    let sound = w.straighten(&expansion) == *w.straighten_graph(g);
    let remainder_min_level = LevelFiltration::min_level(&remainder);
    let certified = sound && remainder_min_level.map_or(true, |m| m > level);
    Ok(Comparison {
        graph: g.to_string(),
        edge: e.to_string(),
        planar: planar.to_string(),
        level,
        identity: name.as_str().to_string(),
        sign,
        other_terms_higher,
        remainder_min_level,
        certified,
    })
}

/// [`two_comparison_at`] at the smallest distinguished doubled edge.
pub fn two_comparison(g: &CanonicalGraph, w: &Straightener<Rationals>) -> Result<Comparison> {
    match quasi_planar_status(g) {
        QuasiPlanarStatus::QuasiPlanar(d) => two_comparison_at(g, d[0], w),
        QuasiPlanarStatus::Planar => Err(Error::Hypothesis(format!("{g} is planar; the comparison is vacuous"))),
        QuasiPlanarStatus::No => Err(GraphError::NotQuasiPlanar(g.to_string()).into()),
    }
}

// ---------------------------------------------------------------- moving the doubled edge

#[derive(Clone, Debug, Serialize)]
pub struct MoveCertificate {
    pub from: String,
    pub to: String,
    /// `X_Γ ≡ factor · X_Γ′` modulo F^{level+1}
    pub factor: String,
    pub level: usize,
    pub remainder_min_level: Option<usize>,
    /// forbidden moves needed to rederive the two identity applications
    pub identity_forbidden: usize,
    pub certified: bool,
}

/// The kind of quasi-planar graph the doubled-edge moves apply to.
pub fn movable_kind(g: &CanonicalGraph) -> Option<&'static str> {
    let d = match quasi_planar_status(g) {
        QuasiPlanarStatus::QuasiPlanar(d) => d,
        _ => return None,
    };
    let cd = cycle_decomposition(g).ok()?;
    match cd.len() {
        2 => Some("level-1"),
        3 if cd.num_odd() == 2 && d.len() == 1 => Some("odd level-2"),
        _ => None,
    }
}

/// Move the distinguished doubled edge of a level-1 or odd level-2 graph to
/// `c-e`, where `c-d-e` is a path of `Γ`: I2 at `b,c,d,e,f` then I1 at the
/// old doubled edge.
pub fn move_doubled_edge(
    g: &CanonicalGraph,
    target: (Vertex, Vertex, Vertex),
    w: &Straightener<Rationals>,
) -> Result<(CanonicalGraph, MoveCertificate)> {
    let kind = movable_kind(g).ok_or_else(|| {
        Error::Hypothesis(format!("{g} is neither a level-1 nor an odd level-2 quasi-planar graph"))
    })?;
    let old = match quasi_planar_status(g) {
        QuasiPlanarStatus::QuasiPlanar(d) => d[0],
        _ => unreachable!(),
    };
    let level = level_of(g)?;
    let (c, d, e) = target;
    if Edge(c.min(e), c.max(e)) == old {
        let cert = MoveCertificate {
            from: g.to_string(),
            to: g.to_string(),
            factor: "1".into(),
            level,
            remainder_min_level: None,
            identity_forbidden: 0,
            certified: true,
        };
        return Ok((g.clone(), cert));
    }
    if g.multiplicity(c, d) == 0 || g.multiplicity(d, e) == 0 || c == e {
        return Err(Error::Hypothesis(format!("{c}-{d}-{e} is not a path of {g}")));
    }
    if kind == "odd level-2" && g.multiplicity(c, e) > 0 {
        return Err(Error::Hypothesis(format!("{c},{d},{e} form a 3-cycle")));
    }
    let other = |x: Vertex, not: Vertex| -> Result<Vertex> {
        let slots = g.slots_at(x);
        let ns: Vec<Vertex> = slots.iter().map(|&s| g.edges()[s].other(x)).collect();
        if ns[0] == not {
            Ok(ns[1])
        } else if ns[1] == not {
            Ok(ns[0])
        } else {
            Err(Error::Hypothesis(format!("{not} is not adjacent to {x}")))
        }
    };
    let b = other(c, d)?;
    let f = other(e, d)?;
    let i2_sites = vec![b, c, d, e, f];
    let mut forbidden = certify_allowable(g, IdentityName::I2, &i2_sites)?.forbidden;
    let first = apply_identity(g, IdentityName::I2, &i2_sites)?;
    // the I2 term with c-e doubled, rewritten at the old doubled edge
    let mut expansion = GraphVector::zero(Rationals);
    let mut image = None;
    for (h, k) in first.terms() {
        if h.multiplicity(c.min(e), c.max(e)) == 2 && h.multiplicity(old.0, old.1) == 2 {
            let (name, sites, term) = comparison_sites(h, old)?;
            forbidden += certify_allowable_term(h, name, &sites, term)?.forbidden;
            let sub = solve_identity(h, name, &sites, term)?;
            image = Some(planar_picture(h, name, &sites, term)?);
            expansion.add_scaled(&sub, k);
        } else {
            expansion.add_term(h.clone(), k.clone());
        }
    }
    let to = image.ok_or_else(|| Error::Reduction("no term carries both doubled edges".into()))?;
    let ok_target = quasi_planar_status(&to) != QuasiPlanarStatus::No
        && is_distinguished(&to, Edge(c.min(e), c.max(e)))
        && associated_planar(&to)? == associated_planar(g)?;
    let factor = expansion.coeff(&to).cloned().unwrap_or_else(BigRational::zero);
    let mut rest = expansion.clone();
    rest.add_term(to.clone(), -factor.clone());
    let remainder = w.straighten(&rest);
    let sound = w.straighten(&expansion) == *w.straighten_graph(g);
    let remainder_min_level = LevelFiltration::min_level(&remainder);
    let unit = !factor.is_zero() && is_dyadic(&factor) && is_dyadic(&factor.recip());
    let certified = sound && ok_target && unit && remainder_min_level.map_or(true, |m| m > level);
    Ok((
        to.clone(),
        MoveCertificate {
            from: g.to_string(),
            to: to.to_string(),
            factor: factor.to_string(),
            level,
            remainder_min_level,
            identity_forbidden: forbidden,
            certified,
        },
    ))
}

// ---------------------------------------------------------------- graded span check

#[derive(Clone, Debug, Serialize)]
pub struct ClassCheck {
    pub planar: String,
    pub level: usize,
    pub members: usize,
    /// every non-planar member compares to ±2 times the planar graph
    pub comparisons_ok: bool,
    /// for level-1 and odd level-2 classes: members linked by certified moves
    pub move_connected: Option<bool>,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedSpanReport {
    pub n: usize,
    pub classes: usize,
    pub verified: usize,
    pub move_checked: usize,
    pub move_connected: usize,
    pub failures: Vec<ClassCheck>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn check_class(class: &QpClass, w: &Straightener<Rationals>, moves: bool) -> ClassCheck {
    let nonplanar: Vec<&CanonicalGraph> = class.members.iter().filter(|g| !g.is_planar()).collect();
    let comparisons_ok = nonplanar
        .iter()
        .all(|g| two_comparison(g, w).map(|c| c.certified).unwrap_or(false));
    let movable: Vec<&CanonicalGraph> = nonplanar.iter().copied().filter(|g| movable_kind(g).is_some()).collect();
    let move_connected = if moves && movable.len() > 1 {
        let index: HashMap<&CanonicalGraph, usize> = movable.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let mut parent: Vec<usize> = (0..movable.len()).collect();
        let mut applicable = false;
        for (i, g) in movable.iter().enumerate() {
            for (c, d, e) in paths_of_length_two(g) {
                let Ok((to, cert)) = move_doubled_edge(g, (c, d, e), w) else { continue };
                applicable = true;
                if !cert.certified {
                    continue;
                }
                if let Some(&j) = index.get(&to) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        // with only 3-cycles to move along, no move applies
        let root = find(&mut parent, 0);
        applicable.then(|| (0..movable.len()).all(|i| find(&mut parent, i) == root))
    } else if moves && movable.len() == 1 {
        Some(true)
    } else {
        None
    };
    ClassCheck {
        planar: class.planar.to_string(),
        level: class.level,
        members: class.members.len(),
        comparisons_ok,
        move_connected,
        verified: comparisons_ok,
    }
}

/// Paths `c-d-e` of a graph along cycles of length at least three, skipping
/// doubled edges.
fn paths_of_length_two(g: &CanonicalGraph) -> Vec<(Vertex, Vertex, Vertex)> {
    let mut out = Vec::new();
    for d in 0..g.n() as Vertex {
        let s = g.slots_at(d);
        let a = g.edges()[s[0]].other(d);
        let b = g.edges()[s[1]].other(d);
        if a != b {
            out.push((a, d, b));
        }
    }
    out
}

/// Check every equivalence class: all members agree with ±2 times the planar
/// graph in the graded quotient; level-1 and odd level-2 classes are also
/// linked by doubled-edge moves when `moves` is set.
pub fn graded_span_check(n: usize, moves: bool) -> Result<GradedSpanReport> {
    let census = enumerate_quasi_planar(n)?;
    let w = Straightener::with_memo(Rationals);
    let checks: Vec<ClassCheck> = census.classes.par_iter().map(|c| check_class(c, &w, moves)).collect();
    let move_checked = checks.iter().filter(|c| c.move_connected.is_some()).count();
    let move_connected = checks.iter().filter(|c| c.move_connected == Some(true)).count();
    Ok(GradedSpanReport {
        n,
        classes: checks.len(),
        verified: checks.iter().filter(|c| c.verified).count(),
        move_checked,
        move_connected,
        failures: checks.into_iter().filter(|c| !c.verified).collect(),
    })
}

// ---------------------------------------------------------------- W′ versus W

#[derive(Clone, Debug, Serialize)]
pub struct WPrimeLine {
    /// 0 means Q
    pub prime: u64,
    pub dim_w2: usize,
    pub dim_w1: usize,
    pub dim_w: usize,
    pub isomorphic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WPrimeReport {
    pub n: usize,
    pub dim_wtilde: usize,
    /// number of equivalence classes with an allowable representative
    pub classes: usize,
    pub lines: Vec<WPrimeLine>,
}

/// Dimensions of W″ = W̃ / merging and W′ = W″ / odd exchange against W.
/// Over Q for n ≤ 8; modulo each listed prime always.
pub fn wprime_iso_check(n: usize, primes: &[u64]) -> Result<WPrimeReport> {
    if !(6..=10).contains(&n) || n % 2 != 0 {
        return Err(Error::Hypothesis(format!("W′ comparison is implemented for n in 6, 8, 10, got {n}")));
    }
    let wt = WTilde::new(n)?;
    let sp = Spaces::new(n)?;
    let ps = PieceStraightener::new();
    let merging = merging_relations(&wt, &ps);
    // no odd-cycle exchange below twelve points
    let exchange = crate::partitions::odd_exchange_relations(n, &ps)?;
    debug_assert!(exchange.is_empty());
    let dim_w = sp.dim_w();
    let mut lines = Vec::new();
    // merging columns die in W, so their rank stops at dim ker(W̃ → W)
    let to_w = wt.to_w(&sp);
    for &p in primes {
        let cap = wt.len() - crate::lattice::rank_mod_p(&to_w, p);
        let r = merging_rank_mod_p(&wt, &merging, p, cap);
        let d = wt.len() - r;
        lines.push(WPrimeLine { prime: p, dim_w2: d, dim_w1: d, dim_w, isomorphic: d == dim_w });
    }
    if n <= 8 {
        let m = crate::lattice::SparseIntMatrix::from_columns(wt.len(), merging);
        let r = crate::lattice::rank_over_q(&m);
        let d = wt.len() - r;
        lines.push(WPrimeLine { prime: 0, dim_w2: d, dim_w1: d, dim_w, isomorphic: d == dim_w });
    }
    let classes = enumerate_quasi_planar(n)?.with_representative();
    Ok(WPrimeReport { n, dim_wtilde: wt.len(), classes, lines })
}

// ---------------------------------------------------------------- reduction engine

/// Result of reducing one allowable graph.
#[derive(Clone, Debug)]
pub struct Reduced {
    /// `X′_Γ` as a combination of allowable quasi-planar graphs
    pub vector: GraphVector<Rationals>,
    pub moves: usize,
    pub forbidden: usize,
    pub identities: usize,
    /// the rule that fired at the top
    pub case: &'static str,
}

impl Reduced {
    pub fn dyadic(&self) -> bool {
        self.vector.terms().all(|(_, c)| is_dyadic(c))
    }
}

#[derive(Debug)]
enum Fail {
    Loop,
    NoRule(String),
    Hard(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Hard(e)
    }
}

impl From<GraphError> for Fail {
    fn from(e: GraphError) -> Self {
        Fail::Hard(e.into())
    }
}

/// Outcome of one rule: `X_Γ = expansion`, with the moves it took.
struct Step {
    case: &'static str,
    expansion: GraphVector<Rationals>,
    trace: ReductionTrace,
}

/// Constructive reduction of allowable graphs to allowable quasi-planar ones.
/// Results are memoized; rules are tried in a fixed priority order.
pub struct Reducer {
    memo: DashMap<CanonicalGraph, Arc<Reduced>>,
    max_depth: usize,
}

impl Default for Reducer {
    fn default() -> Self {
        Self::new()
    }
}

fn is_target(g: &CanonicalGraph) -> bool {
    quasi_planar_status(g) != QuasiPlanarStatus::No
}

fn uncrossed_slots(g: &CanonicalGraph) -> Vec<bool> {
    let es = g.edges();
    (0..es.len())
        .map(|i| !es.iter().enumerate().any(|(j, f)| j != i && edges_cross(es[i], *f)))
        .collect()
}

fn neighbours(g: &CanonicalGraph, v: Vertex) -> (Vertex, Vertex) {
    let s = g.slots_at(v);
    (g.edges()[s[0]].other(v), g.edges()[s[1]].other(v))
}

fn other_neighbour(g: &CanonicalGraph, v: Vertex, not: Vertex) -> Vertex {
    let (a, b) = neighbours(g, v);
    if a == not {
        b
    } else {
        a
    }
}

/// Strictly inside the arc going up from `p` to `q` (cyclically).
fn in_arc(n: usize, p: Vertex, q: Vertex, v: Vertex) -> bool {
    let off = |x: Vertex| (x as usize + n - p as usize) % n;
    off(v) > 0 && off(v) < off(q)
}

impl Reducer {
    pub fn new() -> Self {
        Reducer { memo: DashMap::new(), max_depth: 64 }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn clear(&self) {
        self.memo.clear();
    }

    /// Reduce `g`; with a recording `trace` the top-level steps are logged.
    pub fn reduce(&self, g: &CanonicalGraph, trace: &mut ReductionTrace) -> Result<Arc<Reduced>> {
        if g.degree() != Some(2) {
            return Err(Error::Hypothesis(format!("{g} is not of degree two")));
        }
        check_even("quasi-planar reduction", g.n(), 10)?;
        if !is_allowable(g)? {
            return Err(Error::Hypothesis(format!("{g} is forbidden")));
        }
        let mut stack = Vec::new();
        match self.reduce_rec(g, &mut stack, trace) {
            Ok(r) => Ok(r),
            Err(Fail::Hard(e)) => Err(e),
            Err(Fail::Loop) => Err(Error::Reduction(format!("every rule for {g} cycles back"))),
            Err(Fail::NoRule(s)) => Err(Error::Reduction(s)),
        }
    }

    fn reduce_rec(
        &self,
        g: &CanonicalGraph,
        stack: &mut Vec<CanonicalGraph>,
        trace: &mut ReductionTrace,
    ) -> Result<Arc<Reduced>, Fail> {
        if let Some(hit) = self.memo.get(g) {
            return Ok(hit.clone());
        }
        if is_target(g) {
            let r = Arc::new(Reduced {
                vector: GraphVector::from_graph(Rationals, g.clone()),
                moves: 0,
                forbidden: 0,
                identities: 0,
                case: "quasi-planar",
            });
            return Ok(r);
        }
        if stack.contains(g) || stack.len() >= self.max_depth {
            return Err(Fail::Loop);
        }
        stack.push(g.clone());
        let result = self.try_rules(g, stack, trace);
        stack.pop();
        let r = Arc::new(result?);
        self.memo.insert(g.clone(), r.clone());
        Ok(r)
    }

    fn try_rules(
        &self,
        g: &CanonicalGraph,
        stack: &mut Vec<CanonicalGraph>,
        trace: &mut ReductionTrace,
    ) -> Result<Reduced, Fail> {
        let cd = cycle_decomposition(g)?;
        let mut last = Fail::NoRule(format!("no rule applies to {g}"));
        for step in self.candidate_steps(g, &cd)? {
            let mut vector = GraphVector::zero(Rationals);
            let (mut moves, mut forbidden, mut identities) = (step.trace.moves, step.trace.forbidden, step.trace.identities);
            let mut sub_trace = if trace.record { ReductionTrace::recording() } else { ReductionTrace::counting() };
            let mut ok = true;
            for (h, c) in step.expansion.terms() {
                if h == g {
                    ok = false;
                    last = Fail::Loop;
                    break;
                }
                match self.reduce_rec(h, stack, &mut sub_trace) {
                    Ok(r) => {
                        vector.add_scaled(&r.vector, c);
                        moves += r.moves;
                        forbidden += r.forbidden;
                        identities += r.identities;
                    }
                    Err(Fail::Hard(e)) => return Err(Fail::Hard(e)),
                    Err(f) => {
                        ok = false;
                        last = f;
                        break;
                    }
                }
            }
            if ok {
                trace.case(step.case, g);
                trace.absorb(step.trace);
                trace.absorb(sub_trace);
                return Ok(Reduced { vector, moves, forbidden, identities, case: step.case });
            }
        }
        Err(last)
    }

    /// Rules in priority order, lazily filtered to those that apply.
    fn candidate_steps(&self, g: &CanonicalGraph, cd: &CycleDecomposition) -> Result<Vec<Step>, Fail> {
        let mut steps = Vec::new();
        let unc = uncrossed_slots(g);
        let es = g.edges();
        let n = g.n();

        // (a) a doubled edge crossed at most twice
        for e in doubled_edges(g) {
            if g.crossings_with(e) <= 2 {
                if let Some(s) = hold_and_straighten("a: doubled edge crossed at most twice", g, &[e])? {
                    steps.push(s);
                    break;
                }
            }
        }
        // (b) three consecutive uncrossed edges
        if let Some((a, b, c, d)) = uncrossed_path(g, &unc) {
            if g.multiplicity(a, d) > 0 {
                let held = [Edge(a.min(b), a.max(b)), Edge(b.min(c), b.max(c)), Edge(c.min(d), c.max(d)), Edge(a.min(d), a.max(d))];
                if let Some(s) = hold_and_straighten("b: uncrossed 4-cycle", g, &held)? {
                    steps.push(s);
                }
            } else {
                let x = other_neighbour(g, a, b);
                let y = other_neighbour(g, d, c);
                if let Some(s) = identity_step("b: I3 on an uncrossed path", g, IdentityName::I3, &[x, a, b, c, d, y])? {
                    steps.push(s);
                }
            }
        }
        // (c) an uncrossed cycle of length at least four
        for cyc in &cd.cycles {
            if cyc.len() >= 4 && cyc.slots.iter().all(|&s| unc[s]) {
                if cyc.len() % 2 == 0 {
                    let held: Vec<Edge> = cyc.slots.iter().map(|&s| es[s]).collect();
                    if let Some(s) = hold_and_straighten("c: uncrossed even cycle", g, &held)? {
                        steps.push(s);
                    }
                } else {
                    let v = &cyc.vertices;
                    if let Some(s) = identity_step("c: I2 on an uncrossed odd cycle", g, IdentityName::I2, &v[..5])? {
                        steps.push(s);
                    }
                }
                break;
            }
        }
        // (d) two uncrossed triangles
        let triangles: Vec<&crate::graphs::Cycle> = cd
            .cycles
            .iter()
            .filter(|c| c.len() == 3 && c.slots.iter().all(|&s| unc[s]))
            .collect();
        if triangles.len() >= 2 {
            let held: Vec<Edge> = triangles[..2].iter().flat_map(|c| c.slots.iter().map(|&s| es[s])).collect();
            if let Some(s) = hold_and_straighten("d: two uncrossed triangles", g, &held)? {
                steps.push(s);
            }
        }
        // semi-planar cases
        for a in special_vertices(g) {
            let sc = cd.vertex_cycle[a as usize];
            let special = &cd.cycles[sc];
            let Ok(skewered) = skewered_cycles_in(g, cd, a) else { continue };
            // (e) special cycle of length at least four
            if special.len() >= 5 {
                let pos = special.vertices.iter().position(|&v| v == a).expect("a on its cycle");
                let m = special.len();
                let path: Vec<Vertex> = (1..=4).map(|k| special.vertices[(pos + k) % m]).collect();
                let (p0, p3) = (path[0], path[3]);
                let x = other_neighbour(g, p0, path[1]);
                let y = other_neighbour(g, p3, path[2]);
                if let Some(s) =
                    identity_step("e: I3 inside the special cycle", g, IdentityName::I3, &[x, path[0], path[1], path[2], path[3], y])?
                {
                    steps.push(s);
                }
            } else if special.len() == 4 {
                let pos = special.vertices.iter().position(|&v| v == a).expect("a on its cycle");
                let sites: Vec<Vertex> = (0..4).map(|k| special.vertices[(pos + k) % 4]).collect();
                if let Some(s) = identity_step("e: square identity on the special 4-cycle", g, IdentityName::Sqr, &sites)? {
                    steps.push(s);
                }
            }
            // (f) skewered cycle of length other than 3, 4
            let (x, y) = neighbours(g, a);
            let side = |v: Vertex| if x == y { in_arc(n, a, x, v) } else { in_arc(n, x.min(y), x.max(y), v) != (in_arc(n, x.min(y), x.max(y), a)) };
            for &ci in &skewered {
                let cyc = &cd.cycles[ci];
                let m = cyc.len();
                if m < 5 {
                    continue;
                }
                if let Some((start, run)) = longest_side_run(&cyc.vertices, &side) {
                    let at = |k: usize| cyc.vertices[(start + k + m) % m];
                    if run >= 4 {
                        let (b, c, d, e) = (at(0), at(1), at(2), at(3));
                        let (xx, yy) = (at(m - 1), at(4));
                        if let Some(s) = identity_step("f: I3 on a skewered cycle", g, IdentityName::I3, &[xx, b, c, d, e, yy])? {
                            steps.push(s);
                        }
                    } else if run == 3 {
                        let sites = [at(m - 1), at(0), at(1), at(2), at(3)];
                        if let Some(s) = identity_step("f: I2 on a skewered cycle", g, IdentityName::I2, &sites)? {
                            steps.push(s);
                        }
                    }
                }
            }
            // generic step: straighten the special and the extreme skewered cycle
            if let Some(&xi) = skewered.last() {
                let mut inside = vec![false; n];
                for &v in special.vertices.iter().chain(cd.cycles[xi].vertices.iter()) {
                    inside[v as usize] = true;
                }
                if let Some(s) = straighten_inside("final: straighten special and extreme cycles", g, &inside)? {
                    steps.push(s);
                }
                let ext = &cd.cycles[xi];
                if ext.len() == 4 {
                    if let Some(s) = identity_step("final: square identity on the extreme 4-cycle", g, IdentityName::Sqr, &ext.vertices)? {
                        steps.push(s);
                    }
                }
            }
        }
        // any doubled edge: hold it, the rest becomes planar
        for e in doubled_edges(g) {
            if let Some(s) = hold_and_straighten("hold a doubled edge", g, &[e])? {
                steps.push(s);
                break;
            }
        }
        // plain allowable straightening
        {
            let v = GraphVector::from_graph(Rationals, g.clone());
            let mut tr = ReductionTrace::counting();
            let (out, _) = rewrite(&v, &allowable_predicate, &mut tr);
            if tr.moves > 0 {
                steps.push(Step { case: "allowable straightening", expansion: out, trace: tr });
            }
        }
        // create doubled edges
        for cyc in &cd.cycles {
            if cyc.len() == 4 {
                if let Some(s) = identity_step("square identity on a 4-cycle", g, IdentityName::Sqr, &cyc.vertices)? {
                    steps.push(s);
                }
            } else if cyc.len() >= 5 {
                for k in 0..cyc.len() {
                    let sites: Vec<Vertex> = (0..5).map(|j| cyc.vertices[(k + j) % cyc.len()]).collect();
                    if let Some(s) = identity_step("I2 on a long cycle", g, IdentityName::I2, &sites)? {
                        steps.push(s);
                        break;
                    }
                }
            }
        }
        Ok(steps)
    }
}

/// The longest run of consecutive cycle vertices on one side; returns its
/// start index and length (runs wrap around).
fn longest_side_run(vs: &[Vertex], side: &dyn Fn(Vertex) -> bool) -> Option<(usize, usize)> {
    let m = vs.len();
    let sides: Vec<bool> = vs.iter().map(|&v| side(v)).collect();
    if sides.iter().all(|&s| s == sides[0]) {
        return None;
    }
    let mut best = (0, 0);
    for start in 0..m {
        if sides[(start + m - 1) % m] == sides[start] {
            continue;
        }
        let mut len = 0;
        while len < m && sides[(start + len) % m] == sides[start] {
            len += 1;
        }
        if len > best.1 {
            best = (start, len);
        }
    }
    Some(best)
}

fn uncrossed_path(g: &CanonicalGraph, unc: &[bool]) -> Option<(Vertex, Vertex, Vertex, Vertex)> {
    let es = g.edges();
    let n = g.n();
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
    for (s, e) in es.iter().enumerate() {
        if unc[s] {
            adj[e.0 as usize].push((e.1, s));
            adj[e.1 as usize].push((e.0, s));
        }
    }
    for a in 0..n as Vertex {
        for &(b, s1) in &adj[a as usize] {
            for &(c, s2) in &adj[b as usize] {
                if s2 == s1 || c == a {
                    continue;
                }
                for &(d, s3) in &adj[c as usize] {
                    if s3 == s2 || s3 == s1 || d == a || d == b {
                        continue;
                    }
                    return Some((a, b, c, d));
                }
            }
        }
    }
    None
}

/// Hold the listed edges (all copies) and straighten the rest with
/// allowable moves.
fn hold_and_straighten(case: &'static str, g: &CanonicalGraph, held: &[Edge]) -> Result<Option<Step>, Fail> {
    let pred = |h: &CanonicalGraph, i: usize, j: usize| {
        let es = h.edges();
        !held.contains(&es[i]) && !held.contains(&es[j]) && allowable_predicate(h, i, j)
    };
    let v = GraphVector::from_graph(Rationals, g.clone());
    let mut tr = ReductionTrace::counting();
    let (out, _) = rewrite(&v, &pred, &mut tr);
    if tr.moves == 0 {
        return Ok(None);
    }
    Ok(Some(Step { case, expansion: out, trace: tr }))
}

/// Straighten only among the vertices in `inside`, allowable moves only.
fn straighten_inside(case: &'static str, g: &CanonicalGraph, inside: &[bool]) -> Result<Option<Step>, Fail> {
    let pred = |h: &CanonicalGraph, i: usize, j: usize| {
        let (e, f) = (h.edges()[i], h.edges()[j]);
        inside[e.0 as usize] && inside[e.1 as usize] && inside[f.0 as usize] && inside[f.1 as usize] && allowable_predicate(h, i, j)
    };
    let v = GraphVector::from_graph(Rationals, g.clone());
    let mut tr = ReductionTrace::counting();
    let (out, _) = rewrite(&v, &pred, &mut tr);
    if tr.moves == 0 {
        return Ok(None);
    }
    Ok(Some(Step { case, expansion: out, trace: tr }))
}

/// Apply an identity if its derivation in the host uses allowable moves only.
fn identity_step(case: &'static str, g: &CanonicalGraph, name: IdentityName, sites: &[Vertex]) -> Result<Option<Step>, Fail> {
    let cert = match certify_allowable(g, name, sites) {
        Ok(c) => c,
        Err(Error::Hypothesis(_)) => return Ok(None),
        Err(e) => return Err(Fail::Hard(e)),
    };
    if !cert.ok() {
        return Ok(None);
    }
    let expansion = match apply_identity(g, name, sites) {
        Ok(v) => v,
        Err(Error::Hypothesis(_)) => return Ok(None),
        Err(e) => return Err(Fail::Hard(e)),
    };
    let mut tr = ReductionTrace::recording();
    tr.moves += cert.moves;
    tr.identity(name.as_str(), g, sites, true);
    Ok(Some(Step { case, expansion, trace: tr }))
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionCheck {
    pub graph: String,
    pub case: String,
    pub terms: usize,
    pub moves: usize,
    pub forbidden: usize,
    pub identities: usize,
    pub all_quasi_planar: bool,
    pub all_allowable: bool,
    pub dyadic: bool,
    pub max_denominator: BigInt,
    pub sound: bool,
}

impl ReductionCheck {
    pub fn passed(&self) -> bool {
        self.forbidden == 0 && self.all_quasi_planar && self.all_allowable && self.dyadic && self.sound
    }
}

/// Reduce and certify one graph against the planar basis of W.
pub fn reduce_and_check(r: &Reducer, g: &CanonicalGraph, w: &Straightener<Rationals>) -> Result<ReductionCheck> {
    let red = r.reduce(g, &mut ReductionTrace::counting())?;
    let all_quasi_planar = red.vector.terms().all(|(h, _)| is_target(h));
    let all_allowable = red.vector.terms().all(|(h, _)| is_allowable(h).unwrap_or(false));
    // the memo is meant for the (few) quasi-planar graphs; Γ itself is
    // straightened without it
    let direct = crate::algebra::straighten(&GraphVector::from_graph(Rationals, g.clone()));
    let sound = w.straighten(&red.vector) == direct;
    Ok(ReductionCheck {
        graph: g.to_string(),
        case: red.case.to_string(),
        terms: red.vector.len(),
        moves: red.moves,
        forbidden: red.forbidden,
        identities: red.identities,
        all_quasi_planar,
        all_allowable,
        dyadic: red.dyadic(),
        max_denominator: max_denominator(&red.vector),
        sound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleTypeLine {
    pub lengths: Vec<usize>,
    pub graphs: usize,
    pub passed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionCensus {
    pub n: usize,
    pub types: Vec<CycleTypeLine>,
    pub random: usize,
    pub random_passed: usize,
    pub seed: u64,
    pub forbidden_moves: usize,
    pub max_denominator: String,
    /// first few failures (graph and reason)
    pub failures: Vec<(String, String)>,
}

impl ReductionCensus {
    pub fn passed(&self) -> bool {
        self.random_passed == self.random && self.types.iter().all(|t| t.passed == t.graphs)
    }
}

/// Reduce every allowable graph of the listed cycle types plus `random`
/// seeded random allowable graphs, certifying each against W. Memo tables
/// are flushed once the reducer holds `memo_cap` graphs.
pub fn reduction_census(n: usize, types: &[Vec<usize>], random: usize, seed: u64, memo_cap: usize) -> Result<ReductionCensus> {
    use rand::SeedableRng;
    check_even("quasi-planar reduction", n, 10)?;
    let r = Reducer::new();
    let w = Straightener::with_memo(Rationals);
    let mut failures = Vec::new();
    let mut forbidden_moves = 0;
    let mut max_den = BigInt::one();
    let mut run = |batch: &[CanonicalGraph], failures: &mut Vec<(String, String)>| -> usize {
        let mut passed = 0;
        for chunk in batch.chunks(2048) {
            let out: Vec<Result<ReductionCheck>> = chunk.par_iter().map(|g| reduce_and_check(&r, g, &w)).collect();
            for (g, res) in chunk.iter().zip(out) {
                match res {
                    Ok(c) => {
                        forbidden_moves += c.forbidden;
                        if c.max_denominator > max_den {
                            max_den = c.max_denominator.clone();
                        }
                        if c.passed() {
                            passed += 1;
                        } else if failures.len() < 10 {
                            failures.push((c.graph.clone(), format!("{c:?}")));
                        }
                    }
                    Err(e) => {
                        if failures.len() < 10 {
                            failures.push((g.to_string(), e.to_string()));
                        }
                    }
                }
            }
            if r.memo_len() > memo_cap {
                r.clear();
            }
        }
        passed
    };
    let mut lines = Vec::new();
    for t in types {
        let gs: Vec<CanonicalGraph> =
            graphs_of_cycle_type(n, t).into_iter().filter(|g| is_allowable(g).unwrap_or(false)).collect();
        let passed = run(&gs, &mut failures);
        lines.push(CycleTypeLine { lengths: t.clone(), graphs: gs.len(), passed });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut sample = Vec::with_capacity(random);
    while sample.len() < random {
        let g = enumerate::random_regular(n, 2, &mut rng);
        if is_allowable(&g)? {
            sample.push(g);
        }
    }
    let random_passed = run(&sample, &mut failures);
    Ok(ReductionCensus {
        n,
        types: lines,
        random,
        random_passed,
        seed,
        forbidden_moves,
        max_denominator: max_den.to_string(),
        failures,
    })
}

/// All degree-two graphs with the given cycle lengths.
pub fn graphs_of_cycle_type(n: usize, lengths: &[usize]) -> Vec<CanonicalGraph> {
    let mut want = lengths.to_vec();
    want.sort_unstable();
    // cycles are built around their smallest free vertex
    fn rec(
        n: usize,
        used: &mut Vec<bool>,
        remaining: &mut Vec<usize>,
        edges: &mut EdgeList,
        out: &mut Vec<CanonicalGraph>,
    ) {
        let Some(start) = (0..n).find(|&v| !used[v]) else {
            if remaining.is_empty() {
                out.push(CanonicalGraph::from_oriented(n, edges.clone()));
            }
            return;
        };
        let mut tried = BTreeSet::new();
        for k in 0..remaining.len() {
            let len = remaining[k];
            if !tried.insert(len) {
                continue;
            }
            remaining.remove(k);
            used[start] = true;
            let mut path = vec![start as Vertex];
            cycles(n, len, used, &mut path, remaining, edges, out);
            used[start] = false;
            remaining.insert(k, len);
        }
    }
    fn cycles(
        n: usize,
        len: usize,
        used: &mut Vec<bool>,
        path: &mut Vec<Vertex>,
        remaining: &mut Vec<usize>,
        edges: &mut EdgeList,
        out: &mut Vec<CanonicalGraph>,
    ) {
        if path.len() == len {
            // close; each cycle once: second vertex < last vertex (or length 2)
            if len > 2 && path[1] > path[len - 1] {
                return;
            }
            let before = edges.len();
            for w in path.windows(2) {
                edges.push(Edge(w[0].min(w[1]), w[0].max(w[1])));
            }
            let (a, b) = (path[0], path[len - 1]);
            edges.push(Edge(a.min(b), a.max(b)));
            rec(n, used, remaining, edges, out);
            edges.truncate(before);
            return;
        }
        for v in path[0] as usize + 1..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            path.push(v as Vertex);
            cycles(n, len, used, path, remaining, edges, out);
            path.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut edges = EdgeList::new();
    rec(n, &mut used, &mut want, &mut edges, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Dyadic check of a rational coefficient, as exposed to reports.
pub fn coefficient_is_dyadic(c: &BigRational) -> bool {
    is_dyadic(c)
}

/// Largest power of two in the denominators.
pub fn max_denominator(v: &GraphVector<Rationals>) -> BigInt {
    v.terms().map(|(_, c)| c.denom().abs()).max().unwrap_or_else(BigInt::one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn g(n: usize, pairs: &[(Vertex, Vertex)]) -> CanonicalGraph {
        CanonicalGraph::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn census_n6_has_one_empty_class() {
        let c = enumerate_quasi_planar(6).unwrap();
        assert_eq!(c.planar, 15);
        // two triangles on consecutive vertices, in its three rotations
        assert_eq!(c.empty_classes().len(), 3);
        let orbits = c.empty_orbits();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0], g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]));
        assert_eq!(c.with_representative(), 12);
    }

    #[test]
    fn census_n8_has_no_empty_class() {
        let c = enumerate_quasi_planar(8).unwrap();
        assert_eq!(c.planar, 91);
        assert!(c.empty_classes().is_empty());
        assert_eq!(c.with_representative(), 91);
    }

    #[test]
    fn fig1_comparison() {
        let w = Straightener::with_memo(Rationals);
        let fig = g(8, &[(4, 7), (4, 7), (0, 5), (5, 6), (0, 6), (1, 2), (2, 3), (1, 3)]);
        let c = two_comparison(&fig, &w).unwrap();
        assert!(c.certified, "{c:?}");
        assert!(c.other_terms_higher);
        assert_eq!(c.level, 2);
        assert!(two_comparison(&g(8, &[(0, 1), (0, 1), (2, 3), (2, 3), (4, 5), (4, 5), (6, 7), (6, 7)]), &w).is_err());
    }

    #[test]
    fn filtration_dims() {
        let f = LevelFiltration::new(8);
        assert_eq!(f.dim(0), 91);
        assert_eq!(f.dim(4), 14);
    }

    #[test]
    fn move_level_one() {
        let w = Straightener::with_memo(Rationals);
        // doubled 0-5 crossed by the 8-cycle 1-2-3-4-6-7-8-9
        let host = g(10, &[(0, 5), (0, 5), (1, 2), (2, 3), (3, 4), (4, 6), (6, 7), (7, 8), (8, 9), (1, 9)]);
        assert_eq!(movable_kind(&host), Some("level-1"));
        let (to, cert) = move_doubled_edge(&host, (7, 8, 9), &w).unwrap();
        assert!(cert.certified, "{cert:?}");
        assert_eq!(to.multiplicity(7, 9), 2);
        let (same, c2) = move_doubled_edge(&host, (0, 1, 5), &w).unwrap();
        assert_eq!(same, host);
        assert_eq!(c2.factor, "1");
    }

    #[test]
    fn cycle_type_counts() {
        assert_eq!(graphs_of_cycle_type(10, &[2, 2, 2, 2, 2]).len(), 945);
        assert_eq!(graphs_of_cycle_type(10, &[3, 3, 4]).len(), 6300);
        assert_eq!(graphs_of_cycle_type(6, &[6]).len(), 60);
        let all: usize = [vec![2, 2, 2], vec![2, 4], vec![3, 3], vec![6]]
            .iter()
            .map(|t| graphs_of_cycle_type(6, t).len())
            .sum();
        assert_eq!(all, 130);
    }

    #[test]
    fn exceptional_configuration() {
        // triangle 0-3-4 with special vertex 0, square 1-2-5-6, triangle 7-8-9
        let host = g(10, &[(0, 3), (3, 4), (0, 4), (1, 2), (2, 5), (5, 6), (1, 6), (7, 8), (8, 9), (7, 9)]);
        assert_eq!(special_vertices(&host), vec![0]);
        let r = Reducer::new();
        let w = Straightener::with_memo(Rationals);
        let mut tr = ReductionTrace::recording();
        let red = r.reduce(&host, &mut tr).unwrap();
        assert!(tr.lines().iter().any(|l| l.contains("SQR")), "{:?}", tr.lines());
        assert_eq!(red.forbidden, 0);
        assert!(red.dyadic());
        let chk = reduce_and_check(&r, &host, &w).unwrap();
        assert!(chk.passed(), "{chk:?}");
    }

    #[test]
    fn quasi_planar_is_fixed() {
        let r = Reducer::new();
        let host = g(10, &[(0, 5), (0, 5), (1, 2), (2, 3), (3, 4), (4, 6), (6, 7), (7, 8), (8, 9), (1, 9)]);
        let mut tr = ReductionTrace::recording();
        let red = r.reduce(&host, &mut tr).unwrap();
        assert_eq!(red.vector, GraphVector::from_graph(Rationals, host));
        assert!(tr.events.is_empty());
    }

    #[test]
    fn random_reductions_are_sound() {
        let r = Reducer::new();
        let w = Straightener::with_memo(Rationals);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 40 {
            let h = enumerate::random_regular(10, 2, &mut rng);
            if !is_allowable(&h).unwrap() {
                continue;
            }
            let chk = reduce_and_check(&r, &h, &w).unwrap();
            assert!(chk.passed(), "{chk:?}");
            done += 1;
        }
    }
}
