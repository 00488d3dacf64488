//! JSON forms of graphs, graph vectors and partitioned terms.
//!
//! A graph is `{"n": 8, "edges": [[0,1],[0,1],[2,3],...]}` with directed
//! pairs; canonical output adds `"sign"`. A vector is a list of
//! `{"coeff": "-3/2", "graph": {...}}`; coefficients are strings so that
//! big rationals survive. A partitioned term is
//! `{"graph": {...}, "partition": [[0,1],[2,3,4,5]]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::GraphVector;
use crate::error::{Error, Result};
use crate::graphs::{canonicalize, CanonicalGraph, Edge, SignedGraph, Vertex};
use crate::partitions::{EvenPartition, PartitionedTerm};
use crate::ring::Rationals;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl GraphJson {
    /// Canonicalize; `None` when a loop kills the graph. An input `sign`
    /// multiplies the canonical sign.
    pub fn to_signed(&self) -> Result<Option<SignedGraph>> {
        let edges: Vec<Edge> = self.edges.iter().map(|&[a, b]| Edge(a, b)).collect();
        let sg = canonicalize(self.n, &edges)?;
        Ok(sg.map(|mut s| {
            s.sign *= self.sign.unwrap_or(1);
            s
        }))
    }

    pub fn to_graph(&self) -> Result<CanonicalGraph> {
        match self.to_signed()? {
            Some(sg) if sg.sign == 1 => Ok(sg.graph),
            Some(sg) => Err(Error::Parse(format!("graph {} is not in canonical orientation", sg.graph))),
            None => Err(Error::Parse("graph has a loop".into())),
        }
    }

    pub fn canonical(g: &CanonicalGraph) -> Self {
        GraphJson { n: g.n(), edges: g.to_pairs(), sign: Some(1) }
    }

    pub fn signed(sg: &SignedGraph) -> Self {
        GraphJson { n: sg.graph.n(), edges: sg.graph.to_pairs(), sign: Some(sg.sign) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub graph: GraphJson,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad coefficient {s:?}: {e}")))
}

/// Read a vector; every term is canonicalized, loops vanish and like terms
/// are collected. All graphs must share one `n`.
pub fn vector_from_json(terms: &[TermJson]) -> Result<GraphVector<Rationals>> {
    let mut v = GraphVector::zero(Rationals);
    let mut n = None;
    for t in terms {
        if *n.get_or_insert(t.graph.n) != t.graph.n {
            return Err(Error::Parse("vector mixes vertex counts".into()));
        }
        let c = parse_rational(&t.coeff)?;
        if let Some(sg) = t.graph.to_signed()? {
            v.add_signed(&sg, &c);
        }
    }
    Ok(v)
}

pub fn vector_to_json(v: &GraphVector<Rationals>) -> Vec<TermJson> {
    v.terms()
        .map(|(g, c)| TermJson { coeff: c.to_string(), graph: GraphJson::canonical(g) })
        .collect()
}

/// A file holding either a single graph or a vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorInput {
    Vector(Vec<TermJson>),
    Graph(GraphJson),
}

impl VectorInput {
    pub fn into_vector(self) -> Result<GraphVector<Rationals>> {
        match self {
            VectorInput::Vector(ts) => vector_from_json(&ts),
            VectorInput::Graph(g) => vector_from_json(&[TermJson { coeff: "1".into(), graph: g }]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedTermJson {
    pub graph: GraphJson,
    pub partition: Vec<Vec<Vertex>>,
}

impl PartitionedTermJson {
    pub fn to_term(&self) -> Result<PartitionedTerm> {
        let g = self.graph.to_graph()?;
        let p = EvenPartition::new(g.n(), self.partition.clone())?;
        PartitionedTerm::new(g, p)
    }

    pub fn from_term(t: &PartitionedTerm) -> Self {
        PartitionedTermJson { graph: GraphJson::canonical(&t.graph), partition: t.partition.pieces().to_vec() }
    }
}

pub fn graph_from_str(s: &str) -> Result<CanonicalGraph> {
    let g: GraphJson = serde_json::from_str(s)?;
    g.to_graph()
}

pub fn vector_from_str(s: &str) -> Result<GraphVector<Rationals>> {
    let v: VectorInput = serde_json::from_str(s)?;
    v.into_vector()
}

/// Integer coefficient as a JSON-safe string.
pub fn int_string(c: &BigInt) -> String {
    c.to_string()
}

/// `1`, `-1`, or the rational itself, for compact text output.
pub fn coeff_text(c: &BigRational) -> String {
    if c.is_one() {
        "+".into()
    } else if (-c).is_one() {
        "-".into()
    } else if c > &BigRational::zero() {
        format!("+{c}")
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let s = r#"{"n": 4, "edges": [[1,0],[2,3],[0,1],[3,2]]}"#;
        let g: GraphJson = serde_json::from_str(s).unwrap();
        let sg = g.to_signed().unwrap().unwrap();
        assert_eq!(sg.sign, 1);
        let out = serde_json::to_string(&GraphJson::signed(&sg)).unwrap();
        assert_eq!(out, r#"{"n":4,"edges":[[0,1],[0,1],[2,3],[2,3]],"sign":1}"#);
        let back: GraphJson = serde_json::from_str(&out).unwrap();
        assert_eq!(back.to_graph().unwrap(), sg.graph);
    }

    #[test]
    fn reversed_edge_flips_sign() {
        let g = GraphJson { n: 2, edges: vec![[1, 0]], sign: None };
        assert_eq!(g.to_signed().unwrap().unwrap().sign, -1);
        assert!(g.to_graph().is_err());
    }

    #[test]
    fn loops_vanish_in_vectors() {
        let s = r#"[{"coeff":"3","graph":{"n":2,"edges":[[0,0],[1,1]]}},
                    {"coeff":"-1/2","graph":{"n":2,"edges":[[1,0]]}}]"#;
        let v = vector_from_str(s).unwrap();
        assert_eq!(v.len(), 1);
        let (g, c) = v.terms().next().unwrap();
        assert_eq!(g, &CanonicalGraph::from_pairs(2, &[(0, 1)]).unwrap());
        assert_eq!(c, &BigRational::new(1.into(), 2.into()));
        let json = serde_json::to_string(&vector_to_json(&v)).unwrap();
        assert_eq!(vector_from_str(&json).unwrap(), v);
    }

    #[test]
    fn single_graph_is_a_vector() {
        let v = vector_from_str(r#"{"n":4,"edges":[[0,2],[1,3]]}"#).unwrap();
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn partitioned_term() {
        let s = r#"{"graph":{"n":6,"edges":[[0,1],[0,1],[2,3],[3,4],[4,5],[2,5]]},"partition":[[0,1],[2,3,4,5]]}"#;
        let t: PartitionedTermJson = serde_json::from_str(s).unwrap();
        let term = t.to_term().unwrap();
        let out = PartitionedTermJson::from_term(&term);
        assert_eq!(out.to_term().unwrap(), term);
        assert_eq!(out.graph.sign, Some(1));
        let bad = r#"{"graph":{"n":6,"edges":[[0,1],[0,1],[2,3],[3,4],[4,5],[2,5]]},"partition":[[0,2],[1,3,4,5]]}"#;
        let t: PartitionedTermJson = serde_json::from_str(bad).unwrap();
        assert!(t.to_term().is_err());
    }
}
