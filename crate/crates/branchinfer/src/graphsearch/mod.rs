//! Dynamic-programming enumeration of acyclic chemical graphs with two or
//! three leaf 2-branches that realize a target frequency vector, plus a
//! brute-force oracle.

pub mod brute;
pub mod bucket;
pub mod extend;
pub mod fringe;
pub mod pairs;
pub mod search;

use std::fmt;
use std::ops::RangeInclusive;
use std::time::Duration;

use num_bigint::BigUint;
use thiserror::Error;

use crate::chemgraph::{branch_decomposition, ChemError, ChemicalAlphabet, ChemicalGraph};
use crate::descriptors::{graph_frequency_vector, DescError, FreqLayout, FrequencyVector, Side};

pub use brute::{
    brute_force_enumerate, free_trees, has_branch_symmetry, in_class, random_class_member, realizes, BruteTarget,
};
pub use bucket::{BucketKey, BucketKind, Entry, Family, Origin, VectorBucket};
pub use fringe::{can_append, enumerate_fringe_trees, extensible, neighbor_budget};
pub use pairs::{complement, feasible_pairs, FeasiblePair};
pub use search::{search, search_bl2, search_bl3};

/// Errors raised by the graph search.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("diameter {dia} is too small for {bl} leaf branches")]
    DiameterTooSmall { dia: usize, bl: usize },
    #[error("bl=3 impossible for this x*/dia*: δ3 = {0} < 0")]
    Bl3Impossible(i64),
    #[error("bl must be 2 or 3, got {0}")]
    UnsupportedBl(usize),
    #[error("d_max must be 3 or 4, got {0}")]
    UnsupportedDmax(u8),
    #[error("target vector has {got} entries per side, layout needs {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("graph has maximum degree {got} above d_max = {dmax}")]
    DegreeAboveMax { got: usize, dmax: u8 },
    #[error("brute force supports at most {max} vertices, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("brute force found more than {0} graphs")]
    CapExceeded(usize),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Desc(#[from] DescError),
}

/// Resource limits of one search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Wall-clock cap per combination step; `None` keeps the run deterministic.
    pub step_time: Option<Duration>,
    /// Maximum number of vectors per bucket.
    pub ub: usize,
    /// Maximum number of output graphs.
    pub max_output: usize,
    /// Keep every construction so that all realizations can be assembled.
    pub exhaustive: bool,
}

impl SearchLimits {
    /// No caps, exhaustive provenance.
    pub fn unlimited() -> Self {
        SearchLimits {
            step_time: None,
            ub: usize::MAX,
            max_output: usize::MAX,
            exhaustive: true,
        }
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            step_time: None,
            ub: 1_000_000,
            max_output: 100,
            exhaustive: false,
        }
    }
}

/// A target: frequency vector, diameter, maximum degree and number of leaf
/// 2-branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchProblem {
    pub layout: FreqLayout,
    pub x: FrequencyVector,
    pub dia: usize,
    pub dmax: u8,
    pub bl: usize,
    /// Number of vertices n*.
    pub n: usize,
    /// Number of in-vertices.
    pub n_inl: usize,
}

impl SearchProblem {
    pub fn new(
        alphabet: ChemicalAlphabet,
        x: FrequencyVector,
        dia: usize,
        dmax: u8,
        bl: usize,
    ) -> Result<Self, SearchError> {
        let layout = FreqLayout::new(&alphabet);
        if x.w_in().len() != layout.dim() {
            return Err(SearchError::DimensionMismatch {
                got: x.w_in().len(),
                want: layout.dim(),
            });
        }
        if !(3..=4).contains(&dmax) {
            return Err(SearchError::UnsupportedDmax(dmax));
        }
        let n_inl = layout.elem_range().map(|p| x.get_pos(Side::In, p) as usize).sum();
        let n = x.vertex_count(&layout) as usize;
        Ok(SearchProblem {
            layout,
            x,
            dia,
            dmax,
            bl,
            n,
            n_inl,
        })
    }

    /// The target of a known tree: x* = f(G), its diameter and leaf 2-branch
    /// count.
    pub fn from_graph(g: &ChemicalGraph, alphabet: &ChemicalAlphabet, dmax: u8) -> Result<Self, SearchError> {
        if g.max_degree() > dmax as usize {
            return Err(SearchError::DegreeAboveMax {
                got: g.max_degree(),
                dmax,
            });
        }
        let bd = branch_decomposition(g, 2)?;
        let layout = FreqLayout::new(alphabet);
        let x = graph_frequency_vector(g, &bd.in_vertex, &layout)?;
        SearchProblem::new(alphabet.clone(), x, bd.dia, dmax, bd.bl)
    }

    pub fn alphabet(&self) -> &ChemicalAlphabet {
        self.layout.alphabet()
    }

    /// Backbone lengths (δ1, δ2) of the two end-subtrees for bl = 2.
    pub fn bl2_deltas(&self) -> Result<(usize, usize), SearchError> {
        if self.dia < 5 {
            return Err(SearchError::DiameterTooSmall { dia: self.dia, bl: 2 });
        }
        let s = self.dia - 5;
        Ok((s / 2, s.div_ceil(2)))
    }

    /// Backbone length δ3 of the co-subtree for bl = 3.
    pub fn delta3(&self) -> Result<usize, SearchError> {
        let d3 = self.n_inl as i64 - self.dia as i64 + 2;
        if d3 < 0 {
            return Err(SearchError::Bl3Impossible(d3));
        }
        Ok(d3 as usize)
    }

    /// Admissible δ1 for bl = 3; δ2 = dia* − 6 − δ1.
    pub fn bl3_delta1_range(&self) -> Result<RangeInclusive<usize>, SearchError> {
        if self.dia < 6 {
            return Err(SearchError::DiameterTooSmall { dia: self.dia, bl: 3 });
        }
        let d3 = self.delta3()?;
        let lo = self.dia.div_ceil(2) - 3;
        let hi = (self.dia - 6).saturating_sub(d3);
        Ok(lo..=hi)
    }

    /// Text form: header lines followed by one `in|ex key count` line per
    /// nonzero entry.
    pub fn to_text(&self) -> String {
        format!(
            "alphabet {}\ndia {}\ndmax {}\nbl {}\n{}",
            self.alphabet(),
            self.dia,
            self.dmax,
            self.bl,
            self.x.to_text(&self.layout)
        )
    }

    /// Inverse of [`SearchProblem::to_text`]; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SearchError> {
        let mut alphabet = None;
        let (mut dia, mut dmax, mut bl) = (None, None, None);
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| SearchError::Syntax {
                line: i + 1,
                msg: msg.to_string(),
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| syntax("expected a nonnegative integer"));
            match parts.as_slice() {
                ["alphabet", spec] => alphabet = Some(ChemicalAlphabet::parse(spec)?),
                ["dia", v] => dia = Some(num(v)?),
                ["dmax", v] => dmax = Some(num(v)?),
                ["bl", v] => bl = Some(num(v)?),
                [side @ ("in" | "ex"), key, count] => entries.push((i + 1, *side, key.to_string(), num(count)?)),
                _ => return Err(syntax("unrecognized line")),
            }
        }
        let missing = |what: &str| SearchError::Syntax {
            line: 0,
            msg: format!("missing '{what}' line"),
        };
        let alphabet = alphabet.unwrap_or_else(ChemicalAlphabet::cno);
        let layout = FreqLayout::new(&alphabet);
        let mut x = FrequencyVector::zeros(&layout);
        for (line, side, key, count) in entries {
            let k = layout.parse_key(&key).ok_or_else(|| SearchError::Syntax {
                line,
                msg: format!("unknown key '{key}'"),
            })?;
            let s = if side == "in" { Side::In } else { Side::Ex };
            let c = i32::try_from(count).map_err(|_| SearchError::Syntax {
                line,
                msg: "count too large".into(),
            })?;
            x.add(&layout, s, k, c).map_err(|_| SearchError::Syntax {
                line,
                msg: format!("key '{key}' is outside the layout"),
            })?;
        }
        let dmax = dmax.ok_or_else(|| missing("dmax"))?;
        SearchProblem::new(
            alphabet,
            x,
            dia.ok_or_else(|| missing("dia"))?,
            u8::try_from(dmax).map_err(|_| SearchError::UnsupportedDmax(u8::MAX))?,
            bl.ok_or_else(|| missing("bl"))?,
        )
    }
}

/// Shared read-only state of one search.
#[derive(Clone, Copy, Debug)]
pub struct SearchContext<'a> {
    pub layout: &'a FreqLayout,
    pub x: &'a FrequencyVector,
    pub dmax: u8,
    pub limits: &'a SearchLimits,
}

impl<'a> SearchContext<'a> {
    pub fn new(problem: &'a SearchProblem, limits: &'a SearchLimits) -> Self {
        SearchContext {
            layout: &problem.layout,
            x: &problem.x,
            dmax: problem.dmax,
            limits,
        }
    }

    pub fn alphabet(&self) -> &'a ChemicalAlphabet {
        self.layout.alphabet()
    }
}

/// Outcome of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Pairwise non-isomorphic target graphs, in discovery order.
    pub graphs: Vec<ChemicalGraph>,
    /// Number of feasible pairs (#FP).
    pub pair_count: usize,
    /// Lower bound on the number of target graphs (G-LB).
    pub lower_bound: BigUint,
    /// Sum of count products over feasible pairs, before symmetry division.
    pub pair_product_sum: BigUint,
    /// Some bucket dropped vectors under the size cap.
    pub truncated: bool,
    /// Some step hit its time limit.
    pub timed_out: bool,
    /// Assembly stopped at the output cap.
    pub output_capped: bool,
    /// Assembled graphs that failed the final recheck.
    pub rejected: usize,
    /// All target graphs are listed.
    pub complete: bool,
}

impl SearchResult {
    /// `#FP=…, G-LB=…, #G=…, complete=…`
    pub fn summary_line(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SearchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#FP={}, G-LB={}, #G={}, complete={}",
            self.pair_count,
            self.lower_bound,
            self.graphs.len(),
            self.complete
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::random::{path, spider};

    #[test]
    fn bl2_deltas_split_the_path() {
        let al = ChemicalAlphabet::cno();
        let p = SearchProblem::from_graph(&path(10), &al, 4).unwrap();
        assert_eq!((p.dia, p.bl), (9, 2));
        assert_eq!(p.bl2_deltas().unwrap(), (2, 2));
        let p = SearchProblem::from_graph(&path(11), &al, 4).unwrap();
        assert_eq!(p.bl2_deltas().unwrap(), (2, 3));
    }

    #[test]
    fn bl3_deltas_of_a_spider() {
        let al = ChemicalAlphabet::cno();
        // arms of 5, 4 and 3 edges; leaf branches two steps before each end
        let p = SearchProblem::from_graph(&spider(&[5, 4, 3]), &al, 4).unwrap();
        assert_eq!((p.dia, p.bl, p.n_inl), (9, 3, 7));
        // in-arms 3, 2, 1: δ3 = 0, δ1 = 2 (arm 3), δ2 = 1 (arm 2)
        assert_eq!(p.delta3().unwrap(), 0);
        assert_eq!(p.bl3_delta1_range().unwrap(), 2..=3);
    }

    #[test]
    fn delta3_negative_is_an_error() {
        let al = ChemicalAlphabet::cno();
        let mut p = SearchProblem::from_graph(&spider(&[4, 4, 3]), &al, 4).unwrap();
        p.n_inl = 2;
        assert!(matches!(p.delta3(), Err(SearchError::Bl3Impossible(_))));
    }

    #[test]
    fn text_round_trip() {
        let al = ChemicalAlphabet::cno();
        let mut g = spider(&[3, 3, 2]);
        g.set_label(3, 2);
        g.set_multiplicity(2, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        let q = SearchProblem::parse(&p.to_text()).unwrap();
        assert_eq!(p, q);
        assert!(SearchProblem::parse("dia 5\nbl 2\n").is_err());
        assert!(SearchProblem::parse("dia 5\ndmax 4\nbl 2\nin ac:C:F:1 1\n").is_err());
    }

    #[test]
    fn summary_line_format() {
        let r = SearchResult {
            graphs: vec![],
            pair_count: 3,
            lower_bound: BigUint::from(2u32),
            pair_product_sum: BigUint::from(4u32),
            truncated: false,
            timed_out: false,
            output_capped: false,
            rejected: 0,
            complete: true,
        };
        assert_eq!(r.summary_line(), "#FP=3, G-LB=2, #G=0, complete=true");
    }
}
