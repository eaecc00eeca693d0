//! Inference of acyclic chemical graphs with bounded branch-height.
//!
//! The crate covers the whole pipeline: graph descriptors, a small ReLU
//! regression network, a mixed-integer model that inverts the network over a
//! scheme graph (emitted as LP text), and a dynamic-programming enumerator of
//! all trees matching a target frequency vector.

pub mod ann;
pub mod chemgraph;
pub mod dataset;
pub mod descriptors;
pub mod graphsearch;
pub mod milp;
pub mod par;
