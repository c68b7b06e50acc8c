//! Packing-vs-covering engine for even A-cycles in undirected graphs.
//!
//! An *A-cycle* is a cycle through at least one vertex of a distinguished
//! set `A`; an *even* A-cycle has an even number of edges. Given a graph,
//! a set `A` and a target `k`, the engine constructively produces either
//! `k` pairwise edge-disjoint even A-cycles or a small edge set meeting
//! every even A-cycle, together with a machine-checkable certificate.
//!
//! The crate is organised as follows:
//!
//! - [`graph`]: the labeled graph type, file format, and cycles.
//! - [`blocks`]: block-cut tree decomposition.
//! - [`surgery`]: edge subdivision and degree-2 suppression.
//! - [`cycles`]: theta graphs, a--b--c paths, exact cycle enumeration.
//! - [`trees`]: subtree packing lemmas and the degree/claw/path trichotomy.
//! - [`engine`]: the single-hitting-vertex pipeline and the general driver.
//! - [`gadgets`]: wall-based counterexample generators and their verifier.
//! - [`oracle`]: exact desk-scale baselines (packing, hitting sets,
//!   certificate verification).
//! - [`gen`]: deterministic random and exhaustive instance generators.

pub mod blocks;
pub mod certificate;
pub mod cycles;
pub mod engine;
pub mod gadgets;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod surgery;
pub mod trees;

mod flow;

pub use graph::{Cycle, GraphError, LabeledGraph};
