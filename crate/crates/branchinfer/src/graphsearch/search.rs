//! The full searches for two and three leaf 2-branches.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::chemgraph::{canonical_form, ChemicalGraph};
use crate::descriptors::RootedFragment;

use super::brute::realizes;
use super::bucket::{buckets_of, BucketKind, Family, VectorBucket};
use super::extend::{build_main, disjoint_union, extend_end, extend_end2, fragments_of};
use super::fringe::enumerate_fringe_trees;
use super::pairs::{feasible_pairs, FeasiblePair};
use super::{SearchContext, SearchError, SearchLimits, SearchProblem, SearchResult};

/// Dispatches on the number of leaf 2-branches.
pub fn search(problem: &SearchProblem, limits: &SearchLimits) -> Result<SearchResult, SearchError> {
    match problem.bl {
        2 => search_bl2(problem, limits),
        3 => search_bl3(problem, limits),
        b => Err(SearchError::UnsupportedBl(b)),
    }
}

/// Buckets computed so far plus the incompleteness flags.
struct Stage {
    family: Family,
    timed_out: bool,
}

impl Stage {
    fn absorb(&mut self, (buckets, timed_out): (Vec<VectorBucket>, bool)) {
        self.timed_out |= timed_out;
        for b in buckets {
            self.family.insert(b.key, b);
        }
    }

    fn truncated(&self) -> bool {
        self.family.values().any(|b| b.truncated)
    }
}

/// Σ t(w¹)·t(w²) over the pairs.
fn product_sum(pairs: &[FeasiblePair], fam: &Family) -> BigUint {
    let count = |(k, w): &(super::BucketKey, crate::descriptors::FrequencyVector)| fam[k].entries[w].count.clone();
    pairs
        .iter()
        .map(|p| count(&p.left) * count(&p.right))
        .fold(BigUint::zero(), |a, b| a + b)
}

fn ceil_div(a: &BigUint, b: u32) -> BigUint {
    a.div_ceil(&BigUint::from(b))
}

/// Joins `left` at `terminal` to `right` at its r1.
fn join_graph(left: &RootedFragment, terminal: usize, right: &RootedFragment, q: u8) -> ChemicalGraph {
    let (mut g, off) = disjoint_union(&left.tree, &right.tree);
    g.add_edge(terminal, right.r1 + off, q).expect("terminals exist");
    g
}

/// Candidate graphs of one pair, at most `limit`; the flag reports a cut.
fn pair_graphs(pair: &FeasiblePair, fam: &Family, limit: usize) -> (Vec<(String, ChemicalGraph)>, bool) {
    let lefts = fragments_of(fam, &pair.left.0, &pair.left.1, limit);
    let rights = fragments_of(fam, &pair.right.0, &pair.right.1, limit);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for l in &lefts {
        let terminal = match pair.left.0.kind {
            BucketKind::Main => l.r3.expect("main fragments are tri-rooted"),
            _ => l.r1,
        };
        for r in &rights {
            if out.len() >= limit {
                return (out, true);
            }
            let g = join_graph(l, terminal, r, pair.q);
            let c = canonical_form(&g);
            if seen.insert(c.clone()) {
                out.push((c, g));
            }
        }
    }
    (out, false)
}

/// Assembles, rechecks and deduplicates the graphs of all pairs.
fn assemble(
    pairs: &[FeasiblePair],
    fam: &Family,
    problem: &SearchProblem,
    limits: &SearchLimits,
) -> (Vec<ChemicalGraph>, bool, usize) {
    let per_pair = crate::par::map(pairs, |p| {
        let (cands, cut) = pair_graphs(p, fam, limits.max_output);
        let checked: Vec<(String, ChemicalGraph, bool)> = cands
            .into_iter()
            .map(|(c, g)| {
                let ok = realizes(&g, problem);
                (c, g, ok)
            })
            .collect();
        (checked, cut)
    });
    let mut seen = BTreeSet::new();
    let mut graphs = Vec::new();
    let mut capped = false;
    let mut rejected = 0;
    'all: for (cands, cut) in per_pair {
        capped |= cut;
        for (c, g, ok) in cands {
            if !seen.insert(c) {
                continue;
            }
            if !ok {
                rejected += 1;
                continue;
            }
            if graphs.len() >= limits.max_output {
                capped = true;
                break 'all;
            }
            graphs.push(g);
        }
    }
    (graphs, capped, rejected)
}

fn finish(
    pairs: &[FeasiblePair],
    stage: &Stage,
    problem: &SearchProblem,
    limits: &SearchLimits,
    sum: BigUint,
    lower_bound: BigUint,
) -> SearchResult {
    let (graphs, output_capped, rejected) = assemble(pairs, &stage.family, problem, limits);
    let truncated = stage.truncated();
    let all_single = pairs.iter().all(|p| {
        stage.family[&p.left.0].entries[&p.left.1].count.is_one()
            && stage.family[&p.right.0].entries[&p.right.1].count.is_one()
    });
    let complete = !truncated && !stage.timed_out && !output_capped && (limits.exhaustive || all_single);
    SearchResult {
        graphs,
        pair_count: pairs.len(),
        lower_bound,
        pair_product_sum: sum,
        truncated,
        timed_out: stage.timed_out,
        output_capped,
        rejected,
        complete,
    }
}

/// Enumerates target graphs with two leaf 2-branches by pairing end-subtrees
/// of backbone lengths δ1 and δ2 across the central edge.
///
/// Every graph is found once per orientation of its central split, so the
/// lower bound halves the product sum, rounding up.
pub fn search_bl2(problem: &SearchProblem, limits: &SearchLimits) -> Result<SearchResult, SearchError> {
    if problem.bl != 2 {
        return Err(SearchError::UnsupportedBl(problem.bl));
    }
    let (d1, d2) = problem.bl2_deltas()?;
    let ctx = SearchContext::new(problem, limits);
    let mut stage = Stage {
        family: enumerate_fringe_trees(&ctx, &[BucketKind::End, BucketKind::Inl]),
        timed_out: false,
    };
    for h in 1..=d1.max(d2) {
        let step = extend_end(h, &stage.family, &ctx);
        stage.absorb(step);
    }
    let left = buckets_of(&stage.family, BucketKind::End, d1);
    let right = buckets_of(&stage.family, BucketKind::End, d2);
    let pairs = feasible_pairs(&left, &right, &ctx);
    let sum = product_sum(&pairs, &stage.family);
    let lb = ceil_div(&sum, 2);
    Ok(finish(&pairs, &stage, problem, limits, sum, lb))
}

/// Number of arm orderings that keep the backbone lengths in place:
/// the product of factorials of the multiplicities among (δ1, δ2, δ3).
pub fn arm_symmetry(d1: usize, d2: usize, d3: usize) -> u32 {
    match (d1 == d2, d2 == d3, d1 == d3) {
        (true, true, _) => 6,
        (true, false, _) | (false, true, _) | (false, false, true) => 2,
        _ => 1,
    }
}

/// Enumerates target graphs with three leaf 2-branches: main-subtrees holding
/// the two longest arms, paired at the joint vertex with an end-subtree of
/// backbone length δ3.
pub fn search_bl3(problem: &SearchProblem, limits: &SearchLimits) -> Result<SearchResult, SearchError> {
    if problem.bl != 3 {
        return Err(SearchError::UnsupportedBl(problem.bl));
    }
    let d3 = problem.delta3()?;
    let range = problem.bl3_delta1_range()?;
    let ctx = SearchContext::new(problem, limits);
    let mut stage = Stage {
        family: enumerate_fringe_trees(&ctx, &[BucketKind::End, BucketKind::Inl, BucketKind::Inl3]),
        timed_out: false,
    };
    let end_max = d3.max(*range.end());
    for h in 1..=end_max {
        let step = extend_end(h, &stage.family, &ctx);
        stage.absorb(step);
    }
    for d1 in range.clone() {
        let step = extend_end2(d1 + 1, &stage.family, &ctx);
        stage.absorb(step);
    }
    let mut pairs = Vec::new();
    let mut sum = BigUint::zero();
    let mut lb = BigUint::zero();
    for d1 in range {
        let d2 = problem.dia - 6 - d1;
        let step = build_main(d1, d2, &stage.family, &ctx);
        stage.absorb(step);
        let left = buckets_of(&stage.family, BucketKind::Main, d1 + 1);
        let right = buckets_of(&stage.family, BucketKind::End, d3);
        let found = feasible_pairs(&left, &right, &ctx);
        let s = product_sum(&found, &stage.family);
        lb += ceil_div(&s, arm_symmetry(d1, d2, d3));
        sum += s;
        pairs.extend(found);
    }
    Ok(finish(&pairs, &stage, problem, limits, sum, lb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::random::{path, spider};
    use crate::chemgraph::ChemicalAlphabet;

    fn canon_set(gs: &[ChemicalGraph]) -> BTreeSet<String> {
        gs.iter().map(canonical_form).collect()
    }

    #[test]
    fn arm_symmetry_factors() {
        assert_eq!(arm_symmetry(3, 2, 1), 1);
        assert_eq!(arm_symmetry(2, 2, 1), 2);
        assert_eq!(arm_symmetry(2, 1, 1), 2);
        assert_eq!(arm_symmetry(1, 1, 1), 6);
    }

    #[test]
    fn ten_vertex_dia7_round_trip() {
        // backbone 0-1-2-3-4-5 plus pendants making both ends 2-branches
        let al = ChemicalAlphabet::cno();
        let mut g = path(8);
        let x = g.add_vertex(1);
        g.add_edge(1, x, 1).unwrap();
        let y = g.add_vertex(2);
        g.add_edge(4, y, 2).unwrap();
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        assert_eq!((p.n, p.dia, p.bl), (10, 7, 2));
        let r = search_bl2(&p, &SearchLimits::unlimited()).unwrap();
        assert!(r.complete && r.rejected == 0);
        assert!(canon_set(&r.graphs).contains(&canonical_form(&g)));
        assert!(r.pair_count >= 1);
        assert!(r.lower_bound >= BigUint::from(1u32));
    }

    #[test]
    fn path_has_a_single_symmetric_realization() {
        let al = ChemicalAlphabet::cno();
        for n in [9, 10] {
            let p = SearchProblem::from_graph(&path(n), &al, 4).unwrap();
            let r = search(&p, &SearchLimits::unlimited()).unwrap();
            assert_eq!(r.graphs.len(), 1);
            assert_eq!(r.pair_product_sum, BigUint::one());
            assert_eq!(r.lower_bound, BigUint::one());
        }
    }

    #[test]
    fn conservation_violation_gives_no_pairs() {
        let al = ChemicalAlphabet::cno();
        let mut p = SearchProblem::from_graph(&path(10), &al, 4).unwrap();
        p.dia += 2;
        let r = search_bl2(&p, &SearchLimits::unlimited()).unwrap();
        assert_eq!(r.pair_count, 0);
        assert!(r.graphs.is_empty());
    }

    #[test]
    fn spider_round_trip_and_delta3_zero() {
        let al = ChemicalAlphabet::cno();
        let mut g = spider(&[4, 3, 3]);
        g.set_label(4, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        assert_eq!(p.bl, 3);
        assert_eq!(p.delta3().unwrap(), 0);
        let r = search_bl3(&p, &SearchLimits::unlimited()).unwrap();
        assert!(r.complete && r.rejected == 0);
        assert!(canon_set(&r.graphs).contains(&canonical_form(&g)));
    }

    #[test]
    fn wrong_class_is_rejected() {
        let al = ChemicalAlphabet::cno();
        let p = SearchProblem::from_graph(&path(10), &al, 4).unwrap();
        assert!(matches!(
            search_bl3(&p, &SearchLimits::unlimited()),
            Err(SearchError::UnsupportedBl(2))
        ));
    }

    #[test]
    fn output_cap_marks_incomplete() {
        let al = ChemicalAlphabet::cno();
        let mut g = path(9);
        g.set_label(0, 1);
        g.set_label(3, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        let full = search_bl2(&p, &SearchLimits::unlimited()).unwrap();
        assert!(full.graphs.len() >= 2, "{}", full.summary_line());
        let limits = SearchLimits {
            max_output: 1,
            ..SearchLimits::unlimited()
        };
        let r = search_bl2(&p, &limits).unwrap();
        assert_eq!(r.graphs.len(), 1);
        assert!(r.output_capped && !r.complete);
    }

    #[test]
    fn ub_truncation_marks_incomplete() {
        let al = ChemicalAlphabet::cno();
        let mut g = path(9);
        g.set_label(0, 1);
        g.set_label(3, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        let limits = SearchLimits {
            ub: 1,
            ..SearchLimits::unlimited()
        };
        let r = search_bl2(&p, &limits).unwrap();
        assert!(r.truncated && !r.complete);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let al = ChemicalAlphabet::cno();
        let mut g = spider(&[4, 4, 3]);
        g.set_label(2, 1);
        g.set_label(6, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        let a = search(&p, &SearchLimits::unlimited()).unwrap();
        crate::par::set_sequential(true);
        let b = search(&p, &SearchLimits::unlimited()).unwrap();
        crate::par::set_sequential(false);
        assert_eq!(a, b);
    }
}
