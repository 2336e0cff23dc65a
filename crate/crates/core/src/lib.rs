//! Multigraph toolkit for edge-disjoint Steiner tree and Steiner forest
//! packing.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: multigraphs whose edge ids survive contraction and subdivision,
//! * [`connectivity`]: unit-capacity flow oracles, constrained cuts and
//!   minimum-length disjoint path systems,
//! * [`transforms`]: splitting-off, degree-2 suppression, fake edges and the
//!   edge-union merge,
//! * [`packing`]: extension/balance verifiers, spanning-tree packing,
//!   exact search and the recursive decompose-and-pack driver,
//! * [`kg_family`]: the (k,g)-family feasibility functional and its audit,
//! * [`counterexample`]: generator and checker for the extension
//!   counterexample,
//! * [`io`], [`generate`] and [`sweep`]: file format, random instances and the
//!   experiment harness used by the `forestpack` binary.

pub mod connectivity;
pub mod counterexample;
pub mod error;
mod flow;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kg_family;
pub mod packing;
pub mod sweep;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::{EdgeId, EdgeKind, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};
