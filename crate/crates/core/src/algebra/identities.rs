//! The long identities used by the reductions: I1, I2, I3 and the square
//! identity.
//!
//! Each identity is a loose-ended local pattern on a few visible vertices,
//! stated as `c * X[lhs] = sum c_i X[rhs_i]` with every edge oriented from
//! the lower local label to the higher one. Since they are identities of
//! bracket polynomials they survive any substitution of host vertices,
//! including non-injective ones (coincident points kill the terms with a
//! loop).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{evaluate, rewrite, straighten, GraphVector, PointAssignment, ReductionTrace};
use crate::error::{Error, Result};
use crate::graphs::{canonicalize, canonicalize_partial, CanonicalGraph, Edge, SignedGraph, Vertex};
use crate::ring::{Integers, Rationals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityName {
    I1,
    I2,
    I3,
    Sqr,
}

impl IdentityName {
    pub const ALL: [IdentityName; 4] = [IdentityName::I1, IdentityName::I2, IdentityName::I3, IdentityName::Sqr];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityName::I1 => "I1",
            IdentityName::I2 => "I2",
            IdentityName::I3 => "I3",
            IdentityName::Sqr => "SQR",
        }
    }

    pub fn parse(s: &str) -> Option<IdentityName> {
        match s.to_ascii_uppercase().as_str() {
            "I1" => Some(IdentityName::I1),
            "I2" => Some(IdentityName::I2),
            "I3" => Some(IdentityName::I3),
            "SQR" => Some(IdentityName::Sqr),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub name: IdentityName,
    /// Number of visible vertices; local labels are `0..verts`.
    pub verts: usize,
    pub lhs_coeff: i64,
    pub lhs: Vec<(Vertex, Vertex)>,
    pub rhs: Vec<(i64, Vec<(Vertex, Vertex)>)>,
}

impl Identity {
    pub fn get(name: IdentityName) -> Identity {
        match name {
            // doubled 0-3 crossed by 1-5 and 2-4; the first term on the right
            // is the associated planar picture
            IdentityName::I1 => Identity {
                name,
                verts: 6,
                lhs_coeff: 1,
                lhs: vec![(0, 3), (0, 3), (1, 5), (2, 4)],
                rhs: vec![
                    (2, vec![(0, 1), (2, 3), (3, 4), (0, 5)]),
                    (1, vec![(0, 1), (0, 2), (3, 4), (3, 5)]),
                    (1, vec![(0, 4), (0, 5), (1, 3), (2, 3)]),
                    (1, vec![(0, 3), (1, 2), (0, 5), (3, 4)]),
                    (1, vec![(0, 3), (4, 5), (0, 1), (2, 3)]),
                ],
            },
            // path 0-1-2-3-4
            IdentityName::I2 => Identity {
                name,
                verts: 5,
                lhs_coeff: -2,
                lhs: vec![(0, 1), (1, 2), (2, 3), (3, 4)],
                rhs: vec![
                    (1, vec![(0, 4), (1, 2), (2, 3), (1, 3)]),
                    (-1, vec![(0, 2), (2, 4), (1, 3), (1, 3)]),
                    (1, vec![(0, 3), (3, 4), (1, 2), (1, 2)]),
                    (1, vec![(0, 1), (1, 4), (2, 3), (2, 3)]),
                ],
            },
            // path 0-1-2-3-4-5
            IdentityName::I3 => Identity {
                name,
                verts: 6,
                lhs_coeff: -2,
                lhs: vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)],
                rhs: vec![
                    (1, vec![(0, 5), (1, 2), (2, 3), (3, 4), (1, 4)]),
                    (1, vec![(0, 3), (2, 3), (2, 5), (1, 4), (1, 4)]),
                    (1, vec![(0, 1), (1, 4), (4, 5), (2, 3), (2, 3)]),
                    (1, vec![(0, 3), (3, 4), (4, 5), (1, 2), (1, 2)]),
                    (1, vec![(0, 1), (1, 2), (2, 5), (3, 4), (3, 4)]),
                    (1, vec![(0, 5), (1, 2), (1, 2), (3, 4), (3, 4)]),
                    (-1, vec![(0, 2), (2, 4), (4, 5), (1, 3), (1, 3)]),
                    (-1, vec![(0, 1), (1, 3), (3, 5), (2, 4), (2, 4)]),
                    (-1, vec![(0, 5), (1, 3), (1, 3), (2, 4), (2, 4)]),
                ],
            },
            // square a-b-c-d-a, labels in cycle order
            IdentityName::Sqr => Identity {
                name,
                verts: 4,
                lhs_coeff: 2,
                lhs: vec![(0, 1), (1, 2), (2, 3), (0, 3)],
                rhs: vec![
                    (-1, vec![(0, 1), (0, 1), (2, 3), (2, 3)]),
                    (1, vec![(0, 2), (0, 2), (1, 3), (1, 3)]),
                    (-1, vec![(0, 3), (0, 3), (1, 2), (1, 2)]),
                ],
            },
        }
    }

    fn local(&self, pairs: &[(Vertex, Vertex)]) -> SignedGraph {
        let edges: Vec<Edge> = pairs.iter().map(|&(a, b)| Edge(a, b)).collect();
        canonicalize_partial(self.verts, &edges)
            .expect("pattern labels in range")
            .expect("patterns have no loops")
    }

    /// `lhs_coeff * X[lhs] - sum c_i X[rhs_i]` on the visible vertices; zero
    /// in the graph ring.
    pub fn defect_vector(&self) -> GraphVector<Integers> {
        let mut v = GraphVector::zero(Integers);
        v.add_signed(&self.local(&self.lhs), &BigInt::from(self.lhs_coeff));
        for (c, t) in &self.rhs {
            v.add_signed(&self.local(t), &BigInt::from(-c));
        }
        v
    }

    /// Same defect, pushed into a host through `map` (local -> host) with the
    /// fixed edges `rest` appended to every term.
    fn host_defect(&self, n: usize, map: &[Vertex], rest: &[Edge]) -> GraphVector<Integers> {
        let mut v = GraphVector::zero(Integers);
        let mut add = |pairs: &[(Vertex, Vertex)], c: i64| {
            let mut edges: Vec<Edge> = pairs.iter().map(|&(a, b)| Edge(map[a as usize], map[b as usize])).collect();
            edges.extend_from_slice(rest);
            if let Some(sg) = canonicalize_partial(n, &edges).expect("host labels in range") {
                v.add_signed(&sg, &BigInt::from(c));
            }
        };
        add(&self.lhs, self.lhs_coeff);
        for (c, t) in &self.rhs {
            add(t, -c);
        }
        v
    }

    /// The left-hand pattern pushed into a host: canonical edges and sign.
    fn host_lhs(&self, map: &[Vertex]) -> Option<(Vec<Edge>, i8)> {
        let mut sign = 1i8;
        let mut out = Vec::with_capacity(self.lhs.len());
        for &(a, b) in &self.lhs {
            let e = Edge(map[a as usize], map[b as usize]);
            if e.is_loop() {
                return None;
            }
            let (o, rev) = e.oriented();
            if rev {
                sign = -sign;
            }
            out.push(o);
        }
        Some((out, sign))
    }
}

/// Edges of `host` left after removing the multiset `part`, or `None` if
/// `part` is not contained in `host`.
pub fn remove_edges(host: &CanonicalGraph, part: &[Edge]) -> Option<Vec<Edge>> {
    let mut rest: Vec<Edge> = host.edges().to_vec();
    for e in part {
        let pos = rest.iter().position(|f| f == e)?;
        rest.swap_remove(pos);
    }
    Some(rest)
}

/// Rewrite `X_host` with the identity placed at `map` (local -> host):
/// `X_host = (sign / lhs_coeff) * sum c_i X[rhs_i + rest]`.
pub fn apply_identity(host: &CanonicalGraph, name: IdentityName, map: &[Vertex]) -> Result<GraphVector<Rationals>> {
    let id = Identity::get(name);
    if map.len() != id.verts {
        return Err(Error::Hypothesis(format!("{} needs {} sites", name.as_str(), id.verts)));
    }
    let (lhs, sign) = id
        .host_lhs(map)
        .ok_or_else(|| Error::Hypothesis(format!("{} left side degenerates at {:?}", name.as_str(), map)))?;
    let rest = remove_edges(host, &lhs).ok_or_else(|| {
        Error::Hypothesis(format!("{} pattern at {:?} is not contained in {}", name.as_str(), map, host))
    })?;
    let n = host.n();
    let scale = BigRational::new(BigInt::from(sign as i64), BigInt::from(id.lhs_coeff));
    let mut out = GraphVector::zero(Rationals);
    for (c, t) in &id.rhs {
        let mut edges: Vec<Edge> = t.iter().map(|&(a, b)| Edge(map[a as usize], map[b as usize])).collect();
        edges.extend_from_slice(&rest);
        if let Some(sg) = canonicalize(n, &edges)? {
            let coeff = &scale * BigRational::from_integer(BigInt::from(*c));
            out.add_signed(&sg, &coeff);
        }
    }
    Ok(out)
}

/// Host edges outside the pattern of `term` (`None`: the left side).
fn host_rest(host: &CanonicalGraph, id: &Identity, map: &[Vertex], term: Option<usize>) -> Result<Vec<Edge>> {
    let name = id.name.as_str();
    if map.len() != id.verts {
        return Err(Error::Hypothesis(format!("{name} needs {} sites", id.verts)));
    }
    let pattern = match term {
        None => &id.lhs,
        Some(i) => &id.rhs.get(i).ok_or_else(|| Error::Hypothesis(format!("{name} has no term {i}")))?.1,
    };
    let mut part = Vec::with_capacity(pattern.len());
    for &(a, b) in pattern {
        let e = Edge(map[a as usize], map[b as usize]);
        if e.is_loop() {
            return Err(Error::Hypothesis(format!("{name} term degenerates at {map:?}")));
        }
        part.push(e.oriented().0);
    }
    remove_edges(host, &part)
        .ok_or_else(|| Error::Hypothesis(format!("{name} pattern at {map:?} is not contained in {host}")))
}

/// Rewrite `X_host` through any term of the identity: `term` is `None` for
/// the left side, `Some(i)` for the i-th right-hand term. The host must
/// contain that term's pattern; the result expresses `X_host` through the
/// remaining terms.
pub fn solve_identity(
    host: &CanonicalGraph,
    name: IdentityName,
    map: &[Vertex],
    term: Option<usize>,
) -> Result<GraphVector<Rationals>> {
    let id = Identity::get(name);
    let rest = host_rest(host, &id, map, term)?;
    let defect = id
        .host_defect(host.n(), map, &rest)
        .map_ring(Rationals, |c| BigRational::from_integer(c.clone()));
    let d = defect
        .coeff(host)
        .cloned()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::Hypothesis(format!("{} cancels the host at {:?}", name.as_str(), map)))?;
    let mut out = GraphVector::zero(Rationals);
    for (g, c) in defect.terms() {
        if g != host {
            out.add_term(g.clone(), -(c / &d));
        }
    }
    Ok(out)
}

/// Certify an identity application inside a host by rederiving it: the host
/// defect, straightened among the visible vertices only, must vanish. Every
/// Plücker move of the derivation is counted in `trace` (with allowability
/// against the host graph it acts on). Returns whether the defect vanished and
/// no move was forbidden.
pub fn certify_application(
    host: &CanonicalGraph,
    name: IdentityName,
    map: &[Vertex],
    trace: &mut ReductionTrace,
) -> Result<bool> {
    let id = Identity::get(name);
    let (lhs, _) = id
        .host_lhs(map)
        .ok_or_else(|| Error::Hypothesis(format!("{} left side degenerates", name.as_str())))?;
    let rest = remove_edges(host, &lhs)
        .ok_or_else(|| Error::Hypothesis(format!("{} pattern not contained in host", name.as_str())))?;
    let n = host.n();
    let defect = id.host_defect(n, map, &rest);
    let mut inside = vec![false; n];
    for &v in map {
        inside[v as usize] = true;
    }
    let mut local = ReductionTrace {
        record: false,
        check_allowable: false,
        ..Default::default()
    };
    let pred = |g: &CanonicalGraph, i: usize, j: usize| {
        let e = g.edges()[i];
        let f = g.edges()[j];
        inside[e.0 as usize] && inside[e.1 as usize] && inside[f.0 as usize] && inside[f.1 as usize]
    };
    // the local moves may well be forbidden in the host: that is what the
    // identity is for. Only vanishing inside the sites matters.
    let (out, stuck) = rewrite(&defect, &pred, &mut local);
    trace.moves += local.moves;
    Ok(out.is_zero() && stuck.is_empty())
}

/// Whether an identity application is a consequence of allowable Plücker
/// moves in the host.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AllowableCertificate {
    /// every graph in the host defect is allowable
    pub terms_allowable: bool,
    /// the defect straightens to zero among the sites
    pub vanishes: bool,
    pub moves: usize,
    /// forbidden moves of the accepted derivation
    pub forbidden: usize,
}

impl AllowableCertificate {
    pub fn ok(&self) -> bool {
        self.terms_allowable && self.vanishes && self.forbidden == 0
    }
}

/// Rederive an identity application inside the sites, counting the
/// allowability of every move. If the plain derivation needs a forbidden move,
/// a second one restricted to allowable pairs is attempted.
pub fn certify_allowable(host: &CanonicalGraph, name: IdentityName, map: &[Vertex]) -> Result<AllowableCertificate> {
    certify_allowable_term(host, name, map, None)
}

/// [`certify_allowable`] with the host matching term `term` of the identity.
pub fn certify_allowable_term(
    host: &CanonicalGraph,
    name: IdentityName,
    map: &[Vertex],
    term: Option<usize>,
) -> Result<AllowableCertificate> {
    let id = Identity::get(name);
    let rest = host_rest(host, &id, map, term)?;
    let n = host.n();
    let defect = id.host_defect(n, map, &rest);
    let terms_allowable = defect.terms().all(|(g, _)| crate::graphs::is_allowable(g).unwrap_or(false));
    let mut inside = vec![false; n];
    for &v in map {
        inside[v as usize] = true;
    }
    let within = |g: &CanonicalGraph, i: usize, j: usize| {
        let e = g.edges()[i];
        let f = g.edges()[j];
        inside[e.0 as usize] && inside[e.1 as usize] && inside[f.0 as usize] && inside[f.1 as usize]
    };
    let mut tr = ReductionTrace::counting();
    let (out, _) = rewrite(&defect, &within, &mut tr);
    if out.is_zero() && tr.forbidden == 0 {
        return Ok(AllowableCertificate { terms_allowable, vanishes: true, moves: tr.moves, forbidden: 0 });
    }
    let restricted = |g: &CanonicalGraph, i: usize, j: usize| within(g, i, j) && super::allowable_predicate(g, i, j);
    let mut tr2 = ReductionTrace::counting();
    let (out2, _) = rewrite(&defect, &restricted, &mut tr2);
    if out2.is_zero() {
        return Ok(AllowableCertificate { terms_allowable, vanishes: true, moves: tr2.moves, forbidden: tr2.forbidden });
    }
    Ok(AllowableCertificate { terms_allowable, vanishes: out.is_zero(), moves: tr.moves, forbidden: tr.forbidden })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityTerm {
    pub coeff: i64,
    pub graph: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HostCheck {
    pub host: String,
    pub map: Vec<Vertex>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs_coefficient: i64,
    pub lhs: String,
    pub terms: Vec<IdentityTerm>,
    /// Straightening the defect on the visible vertices gives zero.
    pub symbolic: bool,
    pub evaluations: usize,
    pub evaluation_ok: bool,
    pub hosts: Vec<HostCheck>,
    pub counterexample: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.symbolic && self.evaluation_ok && !self.hosts.is_empty() && self.hosts.iter().all(|h| h.ok)
    }
}

/// Pair up the missing edge ends at random (no loops) so that every host
/// vertex ends with degree two.
pub fn random_completion(n: usize, partial: &[Edge], rng: &mut impl rand::Rng) -> Option<Vec<Edge>> {
    let mut deg = vec![0usize; n];
    for e in partial {
        deg[e.0 as usize] += 1;
        deg[e.1 as usize] += 1;
    }
    if deg.iter().any(|&d| d > 2) {
        return None;
    }
    let mut stubs: Vec<Vertex> = Vec::new();
    for (v, &d) in deg.iter().enumerate() {
        for _ in d..2 {
            stubs.push(v as Vertex);
        }
    }
    for _ in 0..200 {
        stubs.shuffle(rng);
        if stubs.chunks(2).all(|c| c[0] != c[1]) {
            let mut out = partial.to_vec();
            out.extend(stubs.chunks(2).map(|c| Edge(c[0], c[1])));
            return Some(out);
        }
    }
    None
}

/// Verify an identity symbolically, by evaluation at `evals` random points
/// and inside `hosts` random completions on `host_n` vertices.
pub fn verify_identity(name: IdentityName, seed: u64, evals: usize, hosts: usize, host_n: usize) -> IdentityReport {
    let id = Identity::get(name);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (name as u64).wrapping_mul(0x9e37_79b9));
    let defect = id.defect_vector();
    let symbolic = straighten(&defect).is_zero();

    let mut counterexample = None;
    let mut evaluation_ok = true;
    for _ in 0..evals {
        let pa = PointAssignment::random(id.verts, 1000, &mut rng);
        let val = evaluate(&defect, &pa).expect("integer coefficients");
        if val != BigRational::from_integer(0.into()) {
            evaluation_ok = false;
            let pts: Vec<String> = pa.points.iter().map(|(x, y)| format!("({x},{y})")).collect();
            counterexample = Some(format!("points {} give defect {}", pts.join(" "), val));
            break;
        }
    }

    let mut checks = Vec::new();
    let mut attempts = 0;
    while checks.len() < hosts && attempts < 100 * hosts.max(1) {
        attempts += 1;
        let mut sites: Vec<Vertex> = (0..host_n as Vertex).collect();
        sites.shuffle(&mut rng);
        let map: Vec<Vertex> = sites[..id.verts].to_vec();
        let lhs: Vec<Edge> = id.lhs.iter().map(|&(a, b)| Edge(map[a as usize], map[b as usize])).collect();
        let Some(full) = random_completion(host_n, &lhs, &mut rng) else {
            continue;
        };
        let rest = full[lhs.len()..].to_vec();
        let defect = id.host_defect(host_n, &map, &rest);
        let ok = straighten(&defect).is_zero();
        let host = canonicalize(host_n, &full).ok().flatten();
        let host = match host {
            Some(h) => h.graph.to_string(),
            None => continue,
        };
        if !ok && counterexample.is_none() {
            counterexample = Some(format!("host {} with sites {:?}", host, map));
        }
        checks.push(HostCheck { host, map, ok });
    }

    let show = |pairs: &[(Vertex, Vertex)]| {
        let s: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("[{}]", s.join(" "))
    };
    IdentityReport {
        name: name.as_str().to_string(),
        lhs_coefficient: id.lhs_coeff,
        lhs: show(&id.lhs),
        terms: id
            .rhs
            .iter()
            .map(|(c, t)| IdentityTerm {
                coeff: *c,
                graph: show(t),
            })
            .collect(),
        symbolic,
        evaluations: evals,
        evaluation_ok,
        hosts: checks,
        counterexample,
    }
}

/// Convenience: check that a rewritten vector agrees with `X_host` in the
/// planar basis.
pub fn agrees_with_host(host: &CanonicalGraph, v: &GraphVector<Rationals>) -> bool {
    let lhs = straighten(&GraphVector::from_graph(Rationals, host.clone()));
    lhs == straighten(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_pass() {
        for name in IdentityName::ALL {
            let r = verify_identity(name, 0, 10, 5, 10);
            assert!(r.passed(), "{} failed: {:?}", name.as_str(), r.counterexample);
        }
    }

    #[test]
    fn wrong_sign_is_caught() {
        let mut id = Identity::get(IdentityName::Sqr);
        id.rhs[0].0 = 1;
        assert!(!straighten(&id.defect_vector()).is_zero());
    }

    #[test]
    fn coefficients_as_printed() {
        assert_eq!(Identity::get(IdentityName::I1).rhs[0].0, 2);
        assert_eq!(Identity::get(IdentityName::I2).lhs_coeff, -2);
        assert_eq!(Identity::get(IdentityName::Sqr).lhs_coeff, 2);
    }

    #[test]
    fn apply_in_host() {
        // path 0-1-2-3-4 inside the 10-cycle
        let host = CanonicalGraph::from_pairs(
            10,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (0, 9)],
        )
        .unwrap();
        let v = apply_identity(&host, IdentityName::I2, &[0, 1, 2, 3, 4]).unwrap();
        assert!(agrees_with_host(&host, &v));
        let mut tr = ReductionTrace::counting();
        assert!(certify_application(&host, IdentityName::I2, &[0, 1, 2, 3, 4], &mut tr).unwrap());
    }

    #[test]
    fn coincident_sites_kill_terms() {
        // I3 with the two outer sites identified: 6-cycle 0..5 closed at 0
        let host = CanonicalGraph::from_pairs(
            10,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 6), (6, 7), (7, 8), (8, 9), (5, 9)],
        )
        .unwrap();
        let v = apply_identity(&host, IdentityName::I3, &[0, 1, 2, 3, 4, 0]).unwrap();
        assert!(agrees_with_host(&host, &v));
    }
}
