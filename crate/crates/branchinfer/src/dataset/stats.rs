//! Branch-length, branch-height and fringe-size statistics of a corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::chemgraph::{branch_decomposition, ChemicalGraph};

/// Statistics for one branch parameter k.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KStats {
    pub k: usize,
    /// Graphs by number of leaf k-branches.
    pub bl_hist: BTreeMap<usize, usize>,
    /// Graphs by k-branch height.
    pub bh_hist: BTreeMap<usize, usize>,
    /// Graphs whose k-fringe-trees all satisfy `n <= 2d + 2`.
    pub fringe_ok: usize,
    /// Graphs by degree of the root in the k-branch-tree (a center pair
    /// counts as one root).
    pub root_degree_hist: BTreeMap<usize, usize>,
}

/// Corpus statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    /// Number of graphs analysed.
    pub total: usize,
    /// Graphs by maximum vertex degree.
    pub max_degree_hist: BTreeMap<usize, usize>,
    pub per_k: Vec<KStats>,
    /// Graphs that are not trees and were left out.
    pub skipped: usize,
}

fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

impl CorpusStats {
    /// Share of graphs in bucket `key` of a histogram.
    pub fn ratio(&self, hist: &BTreeMap<usize, usize>, key: usize) -> f64 {
        ratio(hist.get(&key).copied().unwrap_or(0), self.total)
    }

    /// Share of graphs satisfying the fringe size bound for `per_k[i]`.
    pub fn fringe_ratio(&self, i: usize) -> f64 {
        ratio(self.per_k[i].fringe_ok, self.total)
    }

    /// CSV rows `k,statistic,value,count,ratio`; k is empty for k-free rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,statistic,value,count,ratio\n");
        for (v, c) in &self.max_degree_hist {
            let _ = writeln!(s, ",max_degree,{v},{c},{}", ratio(*c, self.total));
        }
        for ks in &self.per_k {
            for (name, hist) in [
                ("bl", &ks.bl_hist),
                ("bh", &ks.bh_hist),
                ("root_degree", &ks.root_degree_hist),
            ] {
                for (v, c) in hist {
                    let _ = writeln!(s, "{},{name},{v},{c},{}", ks.k, ratio(*c, self.total));
                }
            }
            let _ = writeln!(
                s,
                "{},fringe_ok,,{},{}",
                ks.k,
                ks.fringe_ok,
                ratio(ks.fringe_ok, self.total)
            );
        }
        s
    }

    /// Human-readable table with percentages.
    pub fn to_table(&self) -> String {
        let mut s = format!("graphs: {} (non-trees skipped: {})\n", self.total, self.skipped);
        let pct = |c: usize| 100.0 * ratio(c, self.total);
        let line = |s: &mut String, label: &str, hist: &BTreeMap<usize, usize>| {
            let cells: Vec<String> = hist.iter().map(|(v, c)| format!("{v}:{c} ({:.1}%)", pct(*c))).collect();
            let _ = writeln!(s, "  {label:<12} {}", cells.join("  "));
        };
        line(&mut s, "max degree", &self.max_degree_hist);
        for ks in &self.per_k {
            let _ = writeln!(s, "k = {}", ks.k);
            line(&mut s, "bl", &ks.bl_hist);
            line(&mut s, "bh", &ks.bh_hist);
            line(&mut s, "root degree", &ks.root_degree_hist);
            let _ = writeln!(s, "  {:<12} {} ({:.1}%)", "n<=2d+2", ks.fringe_ok, pct(ks.fringe_ok));
        }
        s
    }
}

/// Maximum degree plus `(bl, bh, fringe ok, root degree)` per k.
type GraphRow = (usize, Vec<(usize, usize, bool, usize)>);

/// Per-graph record, reduced into [`CorpusStats`].
fn graph_stats(g: &ChemicalGraph, ks: &[usize]) -> Option<GraphRow> {
    let mut per = Vec::with_capacity(ks.len());
    for &k in ks {
        let bd = branch_decomposition(g, k).ok()?;
        let roots: Vec<usize> = (0..bd.branch_tree.nodes.len())
            .filter(|&i| bd.branch_tree.parent[i].is_none())
            .collect();
        let root_degree = bd
            .branch_tree
            .parent
            .iter()
            .filter(|p| p.is_some_and(|q| roots.contains(&q)))
            .count();
        per.push((bd.bl, bd.bh, bd.oversized_fringe_trees().is_empty(), root_degree));
    }
    Some((g.max_degree(), per))
}

/// Histograms of bl_k, bh_k, branch-tree root degree and fringe-size
/// compliance for every k, plus the maximum-degree distribution.
pub fn corpus_stats(graphs: &[ChemicalGraph], ks: &[usize]) -> CorpusStats {
    let rows = crate::par::map(graphs, |g| graph_stats(g, ks));
    let mut st = CorpusStats {
        per_k: ks.iter().map(|&k| KStats { k, ..KStats::default() }).collect(),
        ..CorpusStats::default()
    };
    for row in rows {
        let Some((maxdeg, per)) = row else {
            st.skipped += 1;
            continue;
        };
        st.total += 1;
        *st.max_degree_hist.entry(maxdeg).or_default() += 1;
        for (ksx, (bl, bh, ok, rd)) in st.per_k.iter_mut().zip(per) {
            *ksx.bl_hist.entry(bl).or_default() += 1;
            *ksx.bh_hist.entry(bh).or_default() += 1;
            *ksx.root_degree_hist.entry(rd).or_default() += 1;
            ksx.fringe_ok += ok as usize;
        }
    }
    st
}
