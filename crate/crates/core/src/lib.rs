//! Exact graphical calculus for the coordinate ring of `n` points on the
//! projective line modulo SL(2).

/// Changes whenever cached results could change.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-r3");

pub mod algebra;
pub mod enumerate;
pub mod error;
pub mod graphs;
pub mod io;
pub mod lattice;
pub mod partitions;
pub mod quasiplanar;
pub mod relspaces;
pub mod ring;

pub use algebra::{GraphVector, ReductionTrace, Straightener, TraceEvent};
pub use error::{Error, GraphError, Result};
pub use graphs::{canonicalize, edges_cross, CanonicalGraph, CycleDecomposition, Edge, QuasiPlanarStatus, SignedGraph, Vertex};
pub use lattice::{LatticeBasis, SparseIntMatrix};
pub use ring::{Integers, PrimeField, Rationals, Ring};
