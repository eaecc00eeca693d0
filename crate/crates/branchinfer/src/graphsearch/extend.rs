//! Growing end-subtrees, end+2 subtrees and main-subtrees from smaller ones.

use std::time::Instant;

use crate::chemgraph::{BondConfig, ChemicalGraph, Gamma};
use crate::descriptors::{FreqKey, FrequencyVector, RootedFragment, Side};

use super::bucket::{buckets_of, BucketKey, BucketKind, Family, Origin, VectorBucket};
use super::SearchContext;

/// How a combination step joins its two inputs.
#[derive(Clone, Copy, Debug)]
struct Step {
    left: BucketKind,
    left_h: usize,
    /// Degree raise already present in the left vectors.
    left_raise: u8,
    right_h: usize,
    out: BucketKind,
    out_h: usize,
}

impl Step {
    /// Degree raise of the output vectors at the attachment terminal.
    fn out_raise(&self) -> u8 {
        self.left_raise - 1
    }

    /// Admissible output degrees.
    fn out_degrees(&self, dmax: u8) -> std::ops::RangeInclusive<u8> {
        match self.out {
            BucketKind::Main => 2..=dmax.saturating_sub(1),
            _ => 1..=dmax.saturating_sub(self.out_raise()),
        }
    }
}

/// Joins the left fragment's attachment terminal to the right fragment's r1
/// with multiplicity `q`, keeping the terminal roles of the combined kind.
pub fn join_fragments(left: &RootedFragment, left_kind: BucketKind, right: &RootedFragment, q: u8) -> RootedFragment {
    let (tree, off) = disjoint_union(&left.tree, &right.tree);
    let mut tree = tree;
    tree.add_edge(left.r1, right.r1 + off, q).expect("terminals exist");
    match left_kind {
        BucketKind::End2 => RootedFragment {
            tree,
            r1: left.r2,
            r2: right.r2 + off,
            r3: Some(left.r1),
        },
        _ => RootedFragment::bi_rooted(tree, left.r1, right.r2 + off),
    }
}

/// Disjoint union; vertices of `b` are shifted by the returned offset.
pub fn disjoint_union(a: &ChemicalGraph, b: &ChemicalGraph) -> (ChemicalGraph, usize) {
    let mut g = a.clone();
    let off = g.n();
    for v in 0..b.n() {
        g.add_vertex(b.label(v));
    }
    for e in b.edges() {
        g.add_edge(e.u + off, e.v + off, e.m).expect("edges of a tree");
    }
    (g, off)
}

/// Adds the joining edge's in-part entries, `None` if a key lies outside the
/// layout.
pub fn edge_entries(ctx: &SearchContext, gamma: Gamma, mu: BondConfig) -> Option<FrequencyVector> {
    let mut e = FrequencyVector::zeros(ctx.layout);
    e.add(ctx.layout, Side::In, FreqKey::Gamma(gamma), 1).ok()?;
    e.add(ctx.layout, Side::In, FreqKey::Bc(mu), 1).ok()?;
    Some(e)
}

/// Computes one output bucket of a combination step from frozen inputs.
fn combine_key(
    step: Step,
    key: BucketKey,
    family: &Family,
    ctx: &SearchContext,
    deadline: Option<Instant>,
) -> (VectorBucket, bool) {
    let al = ctx.alphabet();
    let mut out = VectorBucket::new(key, ctx.limits.ub);
    let mut timed_out = false;
    let lefts: Vec<&VectorBucket> = buckets_of(family, step.left, step.left_h)
        .into_iter()
        .filter(|b| b.key.a == key.a && b.key.d + 1 == key.d && b.key.m < key.m)
        .collect();
    let rights = buckets_of(family, BucketKind::End, step.right_h);
    'outer: for lb in &lefts {
        let q = key.m - lb.key.m;
        if q > 3 {
            continue;
        }
        for rb in &rights {
            let b = rb.key.a;
            if !al.is_proper(key.a, b, q) || rb.key.m + q > al.val(b) {
                continue;
            }
            let gamma = Gamma::new(key.a, b, q);
            let mu = BondConfig::new(lb.key.d + step.left_raise, rb.key.d + 1, q);
            let Some(edge) = edge_entries(ctx, gamma, mu) else {
                continue;
            };
            let Some(budget) = ctx.x.minus(&edge) else { continue };
            for (w1, e1) in &lb.entries {
                if !w1.le(&budget) {
                    continue;
                }
                if deadline.is_some_and(|t| Instant::now() > t) {
                    timed_out = true;
                    break 'outer;
                }
                for (w2, e2) in &rb.entries {
                    let w = w1.plus(w2);
                    if !w.le(&budget) {
                        continue;
                    }
                    let w = w.plus(&edge);
                    let origin = ctx.limits.exhaustive.then(|| Origin::Join {
                        left: (lb.key, w1.clone()),
                        right: (rb.key, w2.clone()),
                        q,
                    });
                    let count = &e1.count * &e2.count;
                    out.add(w, count, origin, || {
                        join_fragments(&e1.sample, step.left, &e2.sample, q)
                    });
                }
            }
        }
    }
    (out, timed_out)
}

/// Runs a combination step for every admissible output key in parallel.
fn run_step(step: Step, family: &Family, ctx: &SearchContext) -> (Vec<VectorBucket>, bool) {
    let al = ctx.alphabet();
    let mut keys = Vec::new();
    for a in 0..al.len() {
        for d in step.out_degrees(ctx.dmax) {
            let top = al.val(a).saturating_sub(step.out_raise());
            for m in d..=top {
                keys.push(BucketKey::new(step.out, step.out_h, a, d, m));
            }
        }
    }
    let deadline = ctx.limits.step_time.map(|t| Instant::now() + t);
    let results = crate::par::map(&keys, |&k| combine_key(step, k, family, ctx, deadline));
    let mut timed_out = false;
    let mut out = Vec::new();
    for (b, t) in results {
        timed_out |= t;
        if !b.is_empty() || b.truncated {
            out.push(b);
        }
    }
    (out, timed_out)
}

/// End-subtree vectors with backbone length `h >= 1`: an inl fringe tree at a
/// new backbone vertex joined to an end-subtree of length `h − 1`.
///
/// The joining edge gets γ = (a, b, q) and μ = (d' + 2, d'' + 1, q) where d'
/// is the fringe root degree and d'' the degree of the old r1.
pub fn extend_end(h: usize, family: &Family, ctx: &SearchContext) -> (Vec<VectorBucket>, bool) {
    assert!(h >= 1);
    let step = Step {
        left: BucketKind::Inl,
        left_h: 0,
        left_raise: 2,
        right_h: h - 1,
        out: BucketKind::End,
        out_h: h,
    };
    run_step(step, family, ctx)
}

/// End-subtree vectors with backbone length `h >= 1` whose r1 is the joint
/// vertex, stored as f(T[+2]).
pub fn extend_end2(h: usize, family: &Family, ctx: &SearchContext) -> (Vec<VectorBucket>, bool) {
    assert!(h >= 1);
    let step = Step {
        left: BucketKind::Inl3,
        left_h: 0,
        left_raise: 3,
        right_h: h - 1,
        out: BucketKind::End2,
        out_h: h,
    };
    run_step(step, family, ctx)
}

/// Main-subtree vectors f(T⟨+1⟩): an end+2 subtree with backbone `δ1 + 1`
/// joined at the joint vertex to an end-subtree with backbone `δ2`.
pub fn build_main(delta1: usize, delta2: usize, family: &Family, ctx: &SearchContext) -> (Vec<VectorBucket>, bool) {
    let step = Step {
        left: BucketKind::End2,
        left_h: delta1 + 1,
        left_raise: 2,
        right_h: delta2,
        out: BucketKind::Main,
        out_h: delta1 + 1,
    };
    run_step(step, family, ctx)
}

/// All fragments stored for `(key, w)`, expanded through the provenance
/// records, stopping after `limit` fragments.
///
/// Without provenance (non-exhaustive mode) only the sample is returned.
pub fn fragments_of(family: &Family, key: &BucketKey, w: &FrequencyVector, limit: usize) -> Vec<RootedFragment> {
    let Some(entry) = family.get(key).and_then(|b| b.entries.get(w)) else {
        return Vec::new();
    };
    if entry.origins.is_empty() {
        return vec![entry.sample.clone()];
    }
    let mut out = Vec::new();
    for o in &entry.origins {
        if out.len() >= limit {
            break;
        }
        match o {
            Origin::Tree(f) => out.push(f.clone()),
            Origin::Join { left, right, q } => {
                let ls = fragments_of(family, &left.0, &left.1, limit);
                let rs = fragments_of(family, &right.0, &right.1, limit);
                'prod: for l in &ls {
                    for r in &rs {
                        if out.len() >= limit {
                            break 'prod;
                        }
                        out.push(join_fragments(l, left.0.kind, r, *q));
                    }
                }
            }
        }
    }
    out
}
