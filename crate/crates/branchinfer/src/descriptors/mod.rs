//! Descriptor vectors of whole graphs and frequency vectors of fragments.

mod feature;
mod freq;

use thiserror::Error;

pub use feature::{
    descriptor_count, descriptor_names, feature_vector, format_rational, formula, hydrogen_count, write_feature_csv,
    FeatureVector,
};
pub use freq::{
    fictitious_adjust, frequency_vector, frequency_vector_with_offsets, graph_frequency_vector, shift_terminal_degree,
    Fictitious, FreqKey, FreqLayout, FrequencyVector, RootedFragment, Side,
};

/// Errors raised while computing descriptors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescError {
    #[error("graph is not a tree")]
    NotATree,
    #[error("vertex {vertex} has degree {degree} > 4")]
    DegreeTooLarge { vertex: usize, degree: usize },
    #[error("edge {edge} has an adjacency configuration outside the alphabet")]
    TupleNotInGamma { edge: usize },
    #[error("edge {edge} has a bond configuration outside the alphabet")]
    BondConfigOutside { edge: usize },
    #[error("negative hydrogen count {0}: valence exceeded")]
    NegativeHydrogen(i64),
    #[error("frequency entry would leave [0, 65535]")]
    NegativeEntry,
    #[error("key outside the frequency layout")]
    KeyOutsideLayout,
    #[error("fragment terminals are not vertices of a tree")]
    InvalidFragment,
    #[error("i/o: {0}")]
    Io(String),
}
