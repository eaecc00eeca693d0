//! Stage-1 corpus curation.

use std::fmt;

use crate::chemgraph::{validate, ChemicalAlphabet, ChemicalGraph, Violation};

/// Why a graph was removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// At most three carbon atoms.
    FewCarbons(usize),
    /// A label outside the alphabet.
    ElementOutsideAlphabet(usize),
    Disconnected,
    Cyclic,
    /// Valence exceeded or adjacency configuration outside Γ.
    Valence,
    Empty,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::FewCarbons(c) => write!(f, "only {c} carbon atoms"),
            RejectReason::ElementOutsideAlphabet(a) => write!(f, "element id {a} outside alphabet"),
            RejectReason::Disconnected => write!(f, "disconnected"),
            RejectReason::Cyclic => write!(f, "cyclic"),
            RejectReason::Valence => write!(f, "valence mismatch"),
            RejectReason::Empty => write!(f, "empty graph"),
        }
    }
}

/// Accepted graphs and the reason for each rejection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stage1Report {
    pub accepted: Vec<ChemicalGraph>,
    /// `(input index, reason)`.
    pub rejected: Vec<(usize, RejectReason)>,
}

fn check(g: &ChemicalGraph, alphabet: &ChemicalAlphabet) -> Option<RejectReason> {
    if let Some(&a) = g.labels().iter().find(|&&a| a >= alphabet.len()) {
        return Some(RejectReason::ElementOutsideAlphabet(a));
    }
    let carbons = match alphabet.id("C") {
        Some(c) => g.labels().iter().filter(|&&a| a == c).count(),
        None => 0,
    };
    if carbons <= 3 {
        return Some(RejectReason::FewCarbons(carbons));
    }
    let report = validate(g, alphabet);
    report.violations.first().map(|v| match v {
        Violation::Empty => RejectReason::Empty,
        Violation::Disconnected => RejectReason::Disconnected,
        Violation::Cyclic => RejectReason::Cyclic,
        Violation::ValenceOverflow { .. } | Violation::TupleNotInGamma { .. } => RejectReason::Valence,
    })
}

/// Keeps acyclic, connected, valence-consistent graphs over the alphabet
/// with more than three carbon atoms.
pub fn stage1_filter(graphs: &[ChemicalGraph], alphabet: &ChemicalAlphabet) -> Stage1Report {
    let verdicts = crate::par::map(graphs, |g| check(g, alphabet));
    let mut report = Stage1Report::default();
    for (i, (g, v)) in graphs.iter().zip(verdicts).enumerate() {
        match v {
            None => report.accepted.push(g.clone()),
            Some(r) => report.rejected.push((i, r)),
        }
    }
    report
}
