use thiserror::Error;

use crate::graphs::{Edge, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count {0} out of range (need 2..=64)")]
    BadVertexCount(usize),
    #[error("edge {edge} has a label outside 0..{n}")]
    LabelOutOfRange { edge: Edge, n: usize },
    #[error("graph is not regular; degree sequence {degrees:?}")]
    NotRegular { degrees: Vec<usize> },
    #[error("graph is not of degree two; degree sequence {degrees:?}")]
    NotDegreeTwo { degrees: Vec<usize> },
    #[error("graph has a loop")]
    Loop,
    #[error("graph {0} is not quasi-planar")]
    NotQuasiPlanar(String),
    #[error("vertex {0} is not special")]
    NotSpecial(Vertex),
    #[error("skewered cycles from vertex {0} depend on the edge followed")]
    SkeweredMismatch(Vertex),
    #[error("edges {0} and {1} share an endpoint")]
    OverlappingEndpoints(Edge, Edge),
    #[error("{0} requires an even vertex count, got {1}")]
    OddVertexCount(&'static str, usize),
    #[error("{what} requires n >= {min}, got {n}")]
    TooSmall { what: &'static str, min: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),
    #[error("{0}")]
    Hypothesis(String),
    #[error("identity {name} failed: {detail}")]
    IdentityMismatch { name: String, detail: String },
    #[error("reduction failed: {0}")]
    Reduction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
