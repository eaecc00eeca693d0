//! 2-fringe-tree generation with extensibility pruning.

use crate::chemgraph::{BondConfig, ChemicalAlphabet, ChemicalGraph, ElemId, Gamma};
use crate::descriptors::{fictitious_adjust, Fictitious, FreqKey, FreqLayout, FrequencyVector, RootedFragment, Side};

use super::bucket::{BucketKey, BucketKind, Family, VectorBucket};
use super::SearchContext;

fn ex(w: &FrequencyVector, layout: &FreqLayout, key: FreqKey) -> i64 {
    w.get(layout, Side::Ex, key) as i64
}

/// Remaining external budget `x*_ex(key) − f_ex(key)`.
fn rem(x: &FrequencyVector, f: &FrequencyVector, layout: &FreqLayout, key: FreqKey) -> i64 {
    ex(x, layout, key) - ex(f, layout, key)
}

/// Necessary condition for a rooted fragment with external counts `f` to
/// extend to a 2-fringe-tree of some graph with frequency vector `x`.
///
/// For every element subset Λ', the remaining external atoms with elements
/// in Λ' must not outnumber the remaining external edges touching Λ'
/// (counted twice when both ends lie in Λ').
pub fn extensible(f: &FrequencyVector, x: &FrequencyVector, layout: &FreqLayout) -> bool {
    let al = layout.alphabet();
    let k = al.len();
    for mask in 1u32..(1u32 << k) {
        let inside = |a: ElemId| mask & (1 << a) != 0;
        let lhs: i64 = (0..k)
            .filter(|&a| inside(a))
            .map(|a| rem(x, f, layout, FreqKey::Elem(a)))
            .sum();
        let mut rhs = 0;
        for g in al.gamma() {
            let r = rem(x, f, layout, FreqKey::Gamma(*g));
            match (inside(g.a), inside(g.b)) {
                (true, true) => rhs += 2 * r,
                (true, false) | (false, true) => rhs += r,
                _ => {}
            }
        }
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// `nb(a)`: remaining external edge ends available to atoms of element `a`.
pub fn neighbor_budget(f: &FrequencyVector, x: &FrequencyVector, layout: &FreqLayout, a: ElemId) -> i64 {
    layout
        .alphabet()
        .gamma()
        .iter()
        .filter(|g| g.a == a || g.b == a)
        .map(|g| {
            let r = rem(x, f, layout, FreqKey::Gamma(*g));
            if g.a == g.b {
                2 * r
            } else {
                r
            }
        })
        .sum()
}

/// Whether a new atom may be appended to an `a`-atom of a fragment with
/// external counts `f`: `x*_ex(a) − f_ex(a) <= nb(a) − 1`.
pub fn can_append(f: &FrequencyVector, x: &FrequencyVector, layout: &FreqLayout, a: ElemId) -> bool {
    rem(x, f, layout, FreqKey::Elem(a)) < neighbor_budget(f, x, layout, a)
}

/// A child of the fringe root together with its leaf children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Branch {
    elem: ElemId,
    q: u8,
    /// Sorted `(element, multiplicity)` of the leaves below the child.
    leaves: Vec<(ElemId, u8)>,
}

/// All canonical branches under a root of element `a`, with their fixed
/// external contributions (everything except the root edge's Bc entry).
fn branches(a: ElemId, ctx: &SearchContext) -> Vec<(Branch, FrequencyVector)> {
    let al = ctx.alphabet();
    let layout = ctx.layout;
    let leaf_opts: Vec<(ElemId, u8)> = (0..al.len())
        .flat_map(|e| (1..=3u8).map(move |m| (e, m)))
        .filter(|&(e, m)| m <= al.val(e))
        .collect();
    let mut out = Vec::new();
    for c in 0..al.len() {
        for q in 1..=3u8 {
            if !al.is_proper(a, c, q) || q > al.val(c) {
                continue;
            }
            let max_leaves = (ctx.dmax as usize).saturating_sub(1);
            let mut stack: Vec<Vec<usize>> = vec![vec![]];
            while let Some(idx) = stack.pop() {
                let leaves: Vec<(ElemId, u8)> = idx.iter().map(|&i| leaf_opts[i]).collect();
                let bond: u8 = q + leaves.iter().map(|l| l.1).sum::<u8>();
                if bond > al.val(c) {
                    continue;
                }
                if let Some(v) = branch_vector(a, c, q, &leaves, al, layout) {
                    if v.le(ctx.x) {
                        out.push((
                            Branch {
                                elem: c,
                                q,
                                leaves: leaves.clone(),
                            },
                            v,
                        ));
                    }
                }
                if idx.len() < max_leaves {
                    let start = idx.last().copied().unwrap_or(0);
                    for i in start..leaf_opts.len() {
                        let mut next = idx.clone();
                        next.push(i);
                        stack.push(next);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn branch_vector(
    a: ElemId,
    c: ElemId,
    q: u8,
    leaves: &[(ElemId, u8)],
    al: &ChemicalAlphabet,
    layout: &FreqLayout,
) -> Option<FrequencyVector> {
    let mut w = FrequencyVector::zeros(layout);
    let deg_c = leaves.len() as u8 + 1;
    w.add(layout, Side::Ex, FreqKey::Elem(c), 1).ok()?;
    w.add(layout, Side::Ex, FreqKey::Gamma(Gamma::new(a, c, q)), 1).ok()?;
    w.add(layout, Side::Ex, FreqKey::Dg(deg_c), 1).ok()?;
    for &(e, m) in leaves {
        if !al.is_proper(c, e, m) {
            return None;
        }
        w.add(layout, Side::Ex, FreqKey::Elem(e), 1).ok()?;
        w.add(layout, Side::Ex, FreqKey::Gamma(Gamma::new(c, e, m)), 1).ok()?;
        w.add(layout, Side::Ex, FreqKey::Dg(1), 1).ok()?;
        w.add(layout, Side::Ex, FreqKey::Bc(BondConfig::new(deg_c, 1, m)), 1)
            .ok()?;
    }
    Some(w)
}

fn build_tree(a: ElemId, chosen: &[&Branch]) -> ChemicalGraph {
    let mut g = ChemicalGraph::with_labels(vec![a]);
    for br in chosen {
        let c = g.add_vertex(br.elem);
        g.add_edge(0, c, br.q).expect("fresh vertices");
        for &(e, m) in &br.leaves {
            let l = g.add_vertex(e);
            g.add_edge(c, l, m).expect("fresh vertices");
        }
    }
    g
}

/// Kinds of fringe buckets with their fictitious degree raise.
const FRINGE_KINDS: [(BucketKind, u8); 3] = [(BucketKind::End, 1), (BucketKind::Inl, 2), (BucketKind::Inl3, 3)];

/// Enumerates all rooted trees of height at most 2 that satisfy the fringe
/// size bound `n <= 2d + 2` and fit under `x`, bucketed by root element,
/// root degree and root bond sum.
///
/// End buckets hold f(T[+1]) of trees of height exactly 2, inl buckets
/// f(T[+2]) and inl+3 buckets f(T[+3]) of trees of height at most 2. Only the
/// requested kinds among those are produced.
pub fn enumerate_fringe_trees(ctx: &SearchContext, kinds: &[BucketKind]) -> Family {
    let al = ctx.alphabet();
    let roots: Vec<ElemId> = (0..al.len()).collect();
    let per_root: Vec<Vec<VectorBucket>> = crate::par::map(&roots, |&a| fringe_for_root(a, ctx, kinds));
    let mut fam = Family::new();
    for buckets in per_root {
        for b in buckets {
            fam.insert(b.key, b);
        }
    }
    fam
}

fn fringe_for_root(a: ElemId, ctx: &SearchContext, kinds: &[BucketKind]) -> Vec<VectorBucket> {
    let layout = ctx.layout;
    let al = ctx.alphabet();
    let brs = branches(a, ctx);
    let mut fam = Family::new();
    let mut root_vec = FrequencyVector::zeros(layout);
    if root_vec.add(layout, Side::In, FreqKey::Elem(a), 1).is_err() || !root_vec.le(ctx.x) {
        return Vec::new();
    }
    // depth-first over non-decreasing branch indices
    let mut stack: Vec<(Vec<usize>, FrequencyVector)> = vec![(vec![], root_vec)];
    while let Some((idx, partial)) = stack.pop() {
        let chosen: Vec<&Branch> = idx.iter().map(|&i| &brs[i].0).collect();
        let d = chosen.len() as u8;
        let bond: u8 = chosen.iter().map(|b| b.q).sum();
        let grand: usize = chosen.iter().map(|b| b.leaves.len()).sum();
        let tree = build_tree(a, &chosen);
        let frag = RootedFragment::rooted(tree, 0);
        for &(kind, p) in &FRINGE_KINDS {
            if grand > d as usize + 1 {
                break;
            }
            if !kinds.contains(&kind) || d + p > ctx.dmax || bond + p > al.val(a) {
                continue;
            }
            if kind == BucketKind::End && grand == 0 {
                continue;
            }
            let Ok(w) = fictitious_adjust(&frag, Fictitious::R1(p), layout) else {
                continue;
            };
            if !w.le(ctx.x) {
                continue;
            }
            let key = BucketKey::new(kind, 0, a, d, bond);
            fam.entry(key)
                .or_insert_with(|| VectorBucket::new(key, ctx.limits.ub))
                .add_one(w, frag.clone(), ctx.limits.exhaustive);
        }
        // one more branch; the final root degree is at most dmax - 1, so at
        // most dmax grandchildren can ever satisfy n <= 2d + 2
        if d + 1 >= ctx.dmax {
            continue;
        }
        let start = idx.last().copied().unwrap_or(0);
        for (i, (br, bv)) in brs.iter().enumerate().skip(start) {
            if grand + br.leaves.len() > ctx.dmax as usize || bond + br.q + 1 > al.val(a) {
                continue;
            }
            let next = partial.plus(bv);
            if !next.le(ctx.x) || !extensible(&next, ctx.x, layout) {
                continue;
            }
            let mut nidx = idx.clone();
            nidx.push(i);
            stack.push((nidx, next));
        }
    }
    fam.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::canon::rooted_canon;
    use crate::descriptors::frequency_vector;
    use crate::graphsearch::{SearchLimits, SearchProblem};
    use std::collections::BTreeSet;

    fn all_c_problem(n_ex: u16, dmax: u8) -> SearchProblem {
        let al = ChemicalAlphabet::from_symbols(&["C"]).unwrap();
        let layout = FreqLayout::new(&al);
        // generous budget over single bonds only
        let mut x = FrequencyVector::zeros(&layout);
        let c = FreqKey::Elem(0);
        x.add(&layout, Side::In, c, 1).unwrap();
        x.add(&layout, Side::Ex, c, n_ex as i32).unwrap();
        x.add(&layout, Side::Ex, FreqKey::Gamma(Gamma::new(0, 0, 1)), n_ex as i32)
            .unwrap();
        for d in 1..=4u8 {
            x.add(&layout, Side::In, FreqKey::Dg(d), 1).unwrap();
            x.add(&layout, Side::Ex, FreqKey::Dg(d), n_ex as i32).unwrap();
        }
        for b in al.bc().iter().filter(|b| b.m == 1) {
            x.add(&layout, Side::Ex, FreqKey::Bc(*b), n_ex as i32).unwrap();
        }
        SearchProblem::new(al, x, 7, dmax, 2).unwrap()
    }

    fn root_children_ok(g: &ChemicalGraph) -> bool {
        g.n() <= 2 * g.degree(0) + 2
    }

    #[test]
    fn all_carbon_fringe_trees_match_brute_force() {
        for dmax in [3u8, 4] {
            let p = all_c_problem(20, dmax);
            let limits = SearchLimits::unlimited();
            let ctx = SearchContext::new(&p, &limits);
            let fam = enumerate_fringe_trees(&ctx, &[BucketKind::Inl]);
            let mut got = BTreeSet::new();
            for b in fam.values() {
                for e in b.entries.values() {
                    for o in &e.origins {
                        if let super::super::bucket::Origin::Tree(f) = o {
                            assert!(got.insert(rooted_canon(&f.tree, 0, None)));
                        }
                    }
                }
            }
            // inl trees have root degree <= dmax - 2; brute force over all
            // rooted trees of height <= 2, then filter
            let want: BTreeSet<String> = {
                let mut w = BTreeSet::new();
                let mut level = vec![ChemicalGraph::with_labels(vec![0])];
                let mut seen = BTreeSet::new();
                seen.insert(rooted_canon(&level[0], 0, None));
                w.insert(rooted_canon(&level[0], 0, None));
                for _ in 1..9 {
                    let mut next = Vec::new();
                    for g in &level {
                        for v in 0..g.n() {
                            let depth = g.bfs_dist(0)[v].unwrap();
                            let cap = if v == 0 { dmax as usize - 2 } else { dmax as usize };
                            if depth >= 2 || g.degree(v) >= cap {
                                continue;
                            }
                            let mut h = g.clone();
                            let x = h.add_vertex(0);
                            h.add_edge(v, x, 1).unwrap();
                            let s = rooted_canon(&h, 0, None);
                            if seen.insert(s.clone()) {
                                if root_children_ok(&h) {
                                    w.insert(s);
                                }
                                next.push(h);
                            }
                        }
                    }
                    level = next;
                }
                w
            };
            assert_eq!(got, want, "dmax {dmax}");
        }
    }

    #[test]
    fn zero_external_budget_leaves_single_vertices() {
        let al = ChemicalAlphabet::cno();
        let layout = FreqLayout::new(&al);
        let mut x = FrequencyVector::zeros(&layout);
        for a in 0..3 {
            x.add(&layout, Side::In, FreqKey::Elem(a), 2).unwrap();
        }
        for d in 1..=4 {
            x.add(&layout, Side::In, FreqKey::Dg(d), 6).unwrap();
        }
        let p = SearchProblem::new(al.clone(), x, 6, 4, 2).unwrap();
        let limits = SearchLimits::unlimited();
        let ctx = SearchContext::new(&p, &limits);
        let fam = enumerate_fringe_trees(&ctx, &[BucketKind::End, BucketKind::Inl, BucketKind::Inl3]);
        assert!(fam.keys().all(|k| k.d == 0 && k.kind != BucketKind::End));
        assert_eq!(fam.values().map(|b| b.len()).sum::<usize>(), 3 * 2 - 1);
        for b in fam.values() {
            for e in b.entries.values() {
                assert_eq!(e.sample.tree.n(), 1);
            }
        }
    }

    #[test]
    fn stored_vectors_are_realized_by_samples_and_within_budget() {
        let al = ChemicalAlphabet::cno();
        let layout = FreqLayout::new(&al);
        let mut g = crate::chemgraph::random::spider(&[4, 4, 3]);
        g.set_label(5, 1);
        g.set_label(9, 2);
        let p = SearchProblem::from_graph(&g, &al, 4).unwrap();
        let limits = SearchLimits::unlimited();
        let ctx = SearchContext::new(&p, &limits);
        let fam = enumerate_fringe_trees(&ctx, &[BucketKind::End, BucketKind::Inl, BucketKind::Inl3]);
        assert!(!fam.is_empty());
        for b in fam.values() {
            assert!(b.within(&p.x));
            let raise = match b.key.kind {
                BucketKind::End => 1,
                BucketKind::Inl => 2,
                _ => 3,
            };
            for (w, e) in &b.entries {
                let f = &e.sample;
                assert_eq!(f.tree.label(f.r1), b.key.a);
                assert_eq!(f.tree.degree(f.r1) as u8, b.key.d);
                assert_eq!(f.tree.bond_sum(f.r1) as u8, b.key.m);
                assert_eq!(&fictitious_adjust(f, Fictitious::R1(raise), &layout).unwrap(), w);
                assert_eq!(e.count, num_bigint::BigUint::from(e.origins.len()));
                assert!(frequency_vector(f, &layout).is_ok());
            }
        }
    }

    fn ex_vector(al: &ChemicalAlphabet, elems: &[(ElemId, i32)], gammas: &[(Gamma, i32)]) -> FrequencyVector {
        let layout = FreqLayout::new(al);
        let mut x = FrequencyVector::zeros(&layout);
        for &(a, c) in elems {
            x.add(&layout, Side::Ex, FreqKey::Elem(a), c).unwrap();
        }
        for &(g, c) in gammas {
            x.add(&layout, Side::Ex, FreqKey::Gamma(g), c).unwrap();
        }
        x
    }

    #[test]
    fn extensible_detects_starved_elements() {
        let al = ChemicalAlphabet::cno();
        let layout = FreqLayout::new(&al);
        let f = FrequencyVector::zeros(&layout);
        let ample = ex_vector(&al, &[(0, 3)], &[(Gamma::new(0, 0, 1), 3)]);
        assert!(extensible(&f, &ample, &layout));
        // three O atoms left, no remaining edge touches O
        let starved = ex_vector(&al, &[(0, 2), (2, 3)], &[(Gamma::new(0, 0, 1), 2)]);
        assert!(!extensible(&f, &starved, &layout));
    }

    #[test]
    fn append_condition_boundary() {
        let al = ChemicalAlphabet::cno();
        let layout = FreqLayout::new(&al);
        let f = FrequencyVector::zeros(&layout);
        // nb(C) = 2·2 (C-C) + 1 (C-N) = 5
        let gam = [(Gamma::new(0, 0, 1), 2), (Gamma::new(0, 1, 1), 1)];
        assert_eq!(neighbor_budget(&f, &ex_vector(&al, &[], &gam), &layout, 0), 5);
        assert!(can_append(&f, &ex_vector(&al, &[(0, 4)], &gam), &layout, 0));
        assert!(!can_append(&f, &ex_vector(&al, &[(0, 5)], &gam), &layout, 0));
    }
}
