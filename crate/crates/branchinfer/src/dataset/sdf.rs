//! V2000 molfile ingestion with hydrogen suppression.

use std::fmt;

use crate::chemgraph::{ChemicalAlphabet, ChemicalGraph};

/// Why a record was skipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkipReason {
    /// The record carries a charge on some atom.
    ChargedElement,
    /// A heavy atom outside the alphabet.
    ElementOutsideAlphabet(String),
    /// Aromatic or query bond order.
    UnsupportedBond(u32),
    /// The connection table could not be read.
    Corrupt(String),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::ChargedElement => write!(f, "charged element"),
            SkipReason::ElementOutsideAlphabet(s) => write!(f, "element {s} outside alphabet"),
            SkipReason::UnsupportedBond(t) => write!(f, "unsupported bond type {t}"),
            SkipReason::Corrupt(m) => write!(f, "corrupt record: {m}"),
        }
    }
}

/// One accepted record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdfRecord {
    /// Position of the record in the file, from 0.
    pub index: usize,
    /// First header line.
    pub name: String,
    pub graph: ChemicalGraph,
}

/// Outcome of ingesting one SDF text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub records: Vec<SdfRecord>,
    /// `(index, name, reason)` of every skipped record.
    pub skipped: Vec<(usize, String, SkipReason)>,
}

impl IngestReport {
    pub fn graphs(&self) -> Vec<ChemicalGraph> {
        self.records.iter().map(|r| r.graph.clone()).collect()
    }
}

/// Splits `text` at `$$$$` lines and parses every record in parallel.
///
/// Hydrogens and their bonds are dropped. A corrupt record is skipped with a
/// reason and never aborts the batch.
pub fn ingest_sdf(text: &str, alphabet: &ChemicalAlphabet) -> IngestReport {
    let mut blocks: Vec<String> = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        if line.trim_end() == "$$$$" {
            blocks.push(std::mem::take(&mut cur));
        } else {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    if !cur.trim().is_empty() {
        blocks.push(cur);
    }
    let parsed = crate::par::map(&blocks, |b| parse_record(b, alphabet));
    let mut report = IngestReport::default();
    for (index, (name, res)) in parsed.into_iter().enumerate() {
        match res {
            Ok(graph) => report.records.push(SdfRecord { index, name, graph }),
            Err(reason) => report.skipped.push((index, name, reason)),
        }
    }
    report
}

fn field(line: &str, from: usize, to: usize) -> &str {
    let end = to.min(line.len());
    if from >= end {
        return "";
    }
    line.get(from..end).unwrap_or("").trim()
}

fn int(s: &str, what: &str) -> Result<i64, SkipReason> {
    s.parse::<i64>()
        .map_err(|_| SkipReason::Corrupt(format!("bad {what} '{s}'")))
}

fn parse_record(block: &str, alphabet: &ChemicalAlphabet) -> (String, Result<ChemicalGraph, SkipReason>) {
    let lines: Vec<&str> = block.lines().collect();
    // leading blank lines between records belong to no header
    let start = lines.iter().position(|l| !l.trim().is_empty()).unwrap_or(0);
    let lines = &lines[start.min(lines.len())..];
    let name = lines.first().map(|l| l.trim().to_string()).unwrap_or_default();
    (name, parse_table(lines, alphabet))
}

fn parse_table(lines: &[&str], alphabet: &ChemicalAlphabet) -> Result<ChemicalGraph, SkipReason> {
    let counts = lines
        .get(3)
        .ok_or_else(|| SkipReason::Corrupt("missing counts line".into()))?;
    if counts.contains("V3000") {
        return Err(SkipReason::Corrupt("V3000 is not supported".into()));
    }
    let n_atoms = int(field(counts, 0, 3), "atom count")? as usize;
    let n_bonds = int(field(counts, 3, 6), "bond count")? as usize;
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(SkipReason::Corrupt("truncated connection table".into()));
    }
    let mut charged = false;
    let mut heavy = vec![None; n_atoms];
    let mut g = ChemicalGraph::new();
    for (i, line) in lines[4..4 + n_atoms].iter().enumerate() {
        let symbol = field(line, 31, 34);
        if symbol.is_empty() {
            return Err(SkipReason::Corrupt(format!("atom {} has no symbol", i + 1)));
        }
        let chg = field(line, 36, 39);
        if !chg.is_empty() && int(chg, "charge code")? != 0 {
            charged = true;
        }
        if symbol == "H" || symbol == "D" {
            continue;
        }
        match alphabet.id(symbol) {
            Some(a) => heavy[i] = Some(g.add_vertex(a)),
            None => return Err(SkipReason::ElementOutsideAlphabet(symbol.to_string())),
        }
    }
    let mut bonds = Vec::new();
    for line in &lines[4 + n_atoms..4 + n_atoms + n_bonds] {
        let u = int(field(line, 0, 3), "bond atom")?;
        let v = int(field(line, 3, 6), "bond atom")?;
        let t = int(field(line, 6, 9), "bond type")?;
        let in_range = |x: i64| x >= 1 && x as usize <= n_atoms;
        if !in_range(u) || !in_range(v) {
            return Err(SkipReason::Corrupt(format!("bond {u}-{v} outside atom block")));
        }
        bonds.push((u as usize - 1, v as usize - 1, t));
    }
    for line in &lines[4 + n_atoms + n_bonds..] {
        if line.starts_with("M  END") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            let vals: Vec<&str> = rest.split_whitespace().collect();
            // count, then (atom, charge) pairs
            if vals.iter().skip(2).step_by(2).any(|c| c.parse::<i64>() != Ok(0)) {
                charged = true;
            }
        }
    }
    if charged {
        return Err(SkipReason::ChargedElement);
    }
    for (u, v, t) in bonds {
        let (Some(a), Some(b)) = (heavy[u], heavy[v]) else {
            continue;
        };
        if !(1..=3).contains(&t) {
            return Err(SkipReason::UnsupportedBond(t as u32));
        }
        g.add_edge(a, b, t as u8)
            .map_err(|e| SkipReason::Corrupt(e.to_string()))?;
    }
    Ok(g)
}
