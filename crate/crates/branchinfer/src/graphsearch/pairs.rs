//! Complements and feasible pairs of bucket vectors.

use crate::chemgraph::{BondConfig, Gamma};
use crate::descriptors::{FreqLayout, FrequencyVector};

use super::bucket::{BucketKey, VectorBucket};
use super::extend::edge_entries;
use super::SearchContext;

/// Two stored vectors whose fragments, joined at their attachment terminals
/// by an edge of multiplicity `q`, realize the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasiblePair {
    pub left: (BucketKey, FrequencyVector),
    pub right: (BucketKey, FrequencyVector),
    pub gamma: Gamma,
    pub mu: BondConfig,
    pub q: u8,
}

/// The (γ, μ)-complement `(x_in − w_in − 1_γ − 1_μ, x_ex − w_ex)`, or `None`
/// when an entry would turn negative or a key lies outside the layout.
pub fn complement(
    w: &FrequencyVector,
    gamma: Gamma,
    mu: BondConfig,
    x: &FrequencyVector,
    layout: &FreqLayout,
) -> Option<FrequencyVector> {
    use crate::descriptors::{FreqKey, Side};
    let mut c = x.minus(w)?;
    c.add(layout, Side::In, FreqKey::Gamma(gamma), -1).ok()?;
    c.add(layout, Side::In, FreqKey::Bc(mu), -1).ok()?;
    Some(c)
}

/// Pairs between two buckets for one multiplicity, by merging the sorted left
/// vectors with the sorted complements of the right vectors.
fn pairs_between(lb: &VectorBucket, rb: &VectorBucket, q: u8, ctx: &SearchContext) -> Vec<FeasiblePair> {
    let gamma = Gamma::new(lb.key.a, rb.key.a, q);
    let mu = BondConfig::new(lb.key.d + 1, rb.key.d + 1, q);
    let mut out = Vec::new();
    if edge_entries(ctx, gamma, mu).is_none() {
        return out;
    }
    let mut comps: Vec<(FrequencyVector, &FrequencyVector)> = rb
        .entries
        .keys()
        .filter_map(|w2| complement(w2, gamma, mu, ctx.x, ctx.layout).map(|c| (c, w2)))
        .collect();
    comps.sort();
    let mut left = lb.entries.keys().peekable();
    let mut right = comps.iter().peekable();
    while let (Some(&w1), Some(&(c, w2))) = (left.peek(), right.peek()) {
        match w1.cmp(c) {
            std::cmp::Ordering::Less => {
                left.next();
            }
            std::cmp::Ordering::Greater => {
                right.next();
            }
            std::cmp::Ordering::Equal => {
                out.push(FeasiblePair {
                    left: (lb.key, w1.clone()),
                    right: (rb.key, (*w2).clone()),
                    gamma,
                    mu,
                    q,
                });
                left.next();
                right.next();
            }
        }
    }
    out
}

/// All feasible pairs `(w¹ ∈ left, w² ∈ right)`: w¹ equals the (γ, μ)-complement
/// of w² with γ = (a1, a2, q) and μ = (d1 + 1, d2 + 1, q).
///
/// Left buckets are keyed at their attachment terminal with one pending
/// degree, right buckets at r1 with one pending degree. The result is sorted
/// by bucket keys, then by vectors.
pub fn feasible_pairs(left: &[&VectorBucket], right: &[&VectorBucket], ctx: &SearchContext) -> Vec<FeasiblePair> {
    let al = ctx.alphabet();
    let mut jobs = Vec::new();
    for lb in left {
        for rb in right {
            let top = 3u8
                .min(al.val(lb.key.a).saturating_sub(lb.key.m))
                .min(al.val(rb.key.a).saturating_sub(rb.key.m));
            for q in 1..=top {
                if al.is_proper(lb.key.a, rb.key.a, q) {
                    jobs.push((*lb, *rb, q));
                }
            }
        }
    }
    crate::par::map(&jobs, |&(lb, rb, q)| pairs_between(lb, rb, q, ctx))
        .into_iter()
        .flatten()
        .collect()
}
