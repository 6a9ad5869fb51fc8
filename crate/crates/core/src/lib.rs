//! Deterministic simulation and verification of self-stabilizing
//! independent-set algorithms.
//!
//! The crate is split into a graph layer ([`graph`]), a generic
//! guarded-command engine with pluggable daemons ([`engine`]), concrete
//! rule sets ([`algorithms`]), ground-truth checkers ([`verifier`]) and the
//! experiment harness ([`experiment`], [`chart`]).

pub mod algorithms;
pub mod chart;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod graph;
pub mod verifier;

pub use error::{Error, Result};
pub use graph::{gen_random_graph, Graph, GraphGenSpec, NodeId};
