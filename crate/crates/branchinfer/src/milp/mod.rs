//! Mixed-integer model that inverts a ReLU network over the scheme graph.
//!
//! The model is built in memory, emitted as CPLEX LP text, and solutions
//! (`name value` lines) are parsed back, checked constraint by constraint and
//! decoded into a chemical graph.

mod bounds;
mod build;
mod encode;
mod model;
mod num;
mod relu;
mod scheme;

use thiserror::Error;

use crate::ann::AnnError;
use crate::chemgraph::ChemError;
use crate::descriptors::DescError;

pub use bounds::{bounds_from_features, compute_bounds, DescriptorBounds, Range};
pub use build::{build_model, build_structure, dc_domain, network_inputs, tuple_domain, InverseModel};
pub use encode::{decode_graph, embed, encode_full, encode_graph, Embedding};
pub use model::{
    check_assignment, check_constraint, check_dense, check_domains, check_subset, emit_lp, parse_lp, parse_solution,
    Assignment, Constraint, Group, Lin, MilpModel, Sense, Var, VarKind, Violation,
};
pub use num::{default_tolerance, parse_decimal, Num};
pub use relu::{add_relu_block, add_target_window, relu_values, ReluVars};
pub use scheme::{names, s_star, SchemeGraph, Slot, TargetSpec};

/// Errors raised while building, emitting, parsing or checking models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("invalid target specification: {0}")]
    InvalidSpec(String),
    #[error("infeasible specification: {0}")]
    Infeasible(String),
    #[error("invalid descriptor bounds: {0}")]
    InvalidBounds(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("constraints without variables cannot hold: {0:?}")]
    StaticInfeasible(Vec<String>),
    #[error("network takes {got} inputs, the descriptor vector has {expected}")]
    Shape { expected: usize, got: usize },
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("LP line {line}: {msg}")]
    LpParse { line: usize, msg: String },
    #[error("solution line {line}: {msg}")]
    Solution { line: usize, msg: String },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("value {value} of '{var}' lies outside its bounds")]
    OutOfBounds { var: String, value: String },
    #[error("value {value} of integer variable '{var}' is not integral")]
    NotIntegral { var: String, value: String },
    #[error("graph outside the target class: {0}")]
    OutsideClass(String),
    #[error("fringe tree of size {fringe} at vertex {root} violates the size bound")]
    FringeTooLarge { fringe: usize, root: usize },
    #[error("cannot decode solution: {0}")]
    Decode(String),
    #[error(transparent)]
    Desc(#[from] DescError),
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Ann(#[from] AnnError),
}
