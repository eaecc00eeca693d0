//! Labeled acyclic chemical graphs and tree topology.
//!
//! A chemical graph is a hydrogen-suppressed multigraph whose vertices carry
//! element labels and whose edges carry bond multiplicities in `1..=3`. This
//! module holds the element alphabet, the graph type with its text format,
//! center and k-branch analysis, rooted tree templates and canonical forms.

mod alphabet;
pub mod canon;
mod graph;
pub mod random;
mod template;
mod tree;

use thiserror::Error;

pub use alphabet::{
    bond_char, standard_mass, BondConfig, ChemicalAlphabet, ElemId, Element, Gamma, BC_DEGREE_PLUS_MULT,
};
pub use canon::{canonical_form, canonical_form_min_root};
pub use graph::{format_graph, parse_graph, parse_graphs, validate, ChemicalGraph, Edge, ValidityReport, Violation};
pub use template::{template_size, RootedTreeTemplate};
pub use tree::{
    branch_decomposition, branch_decomposition_rooted, diameter_and_center, BranchDecomposition, BranchTree, Center,
    FringeTree, RootedTree,
};

/// Errors raised by graph construction, parsing and topology queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChemError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown element '{0}'")]
    UnknownElement(String),
    #[error("line {line}: unknown element '{symbol}'")]
    UnknownElementAt { line: usize, symbol: String },
    #[error("multiplicity {0} outside [1,3]")]
    Multiplicity(i64),
    #[error("line {line}: multiplicity {m} outside [1,3]")]
    MultiplicityAt { line: usize, m: i64 },
    #[error("edge ({u},{v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("roots must be one vertex or two adjacent vertices")]
    BadRoot,
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
}
