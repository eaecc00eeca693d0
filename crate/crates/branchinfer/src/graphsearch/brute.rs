//! Exhaustive tree generation with canonical deduplication, used as an
//! oracle for the dynamic-programming search.

use std::collections::BTreeSet;

use crate::chemgraph::{
    branch_decomposition, canonical_form, validate, BondConfig, ChemicalAlphabet, ChemicalGraph, Gamma,
};
use crate::descriptors::{graph_frequency_vector, FreqKey, FreqLayout, FrequencyVector, Side};

use super::{SearchError, SearchProblem};

/// Largest vertex count accepted by the brute force.
pub const MAX_BRUTE_N: usize = 14;

/// What the brute force enumerates.
#[derive(Clone, Debug)]
pub enum BruteTarget<'a> {
    /// All graphs G with f(G) = x* (in/ex split by the 2-branch decomposition).
    Vector(&'a SearchProblem),
    /// All graphs with `n` vertices over the alphabet, maximum degree `dmax`
    /// and bond multiplicities at most `max_mult`.
    Budget {
        n: usize,
        alphabet: &'a ChemicalAlphabet,
        dmax: usize,
        max_mult: u8,
    },
}

/// Pairwise non-isomorphic unlabeled trees on `n` vertices with maximum
/// degree at most `dmax`, grown leaf by leaf.
pub fn free_trees(n: usize, dmax: usize) -> Vec<ChemicalGraph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![ChemicalGraph::with_labels(vec![0])];
    for _ in 1..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &level {
            for v in 0..g.n() {
                if g.degree(v) >= dmax {
                    continue;
                }
                let mut h = g.clone();
                let x = h.add_vertex(0);
                h.add_edge(v, x, 1).expect("fresh vertex");
                if seen.insert(canonical_form(&h)) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// Whether `g` lies in the searched class: maximum degree, diameter and leaf
/// 2-branch count of the problem, every 2-fringe-tree within `n <= 2d + 2`.
pub fn in_class(g: &ChemicalGraph, problem: &SearchProblem) -> bool {
    if g.max_degree() > problem.dmax as usize {
        return false;
    }
    match branch_decomposition(g, 2) {
        Ok(bd) => bd.dia == problem.dia && bd.bl == problem.bl && bd.oversized_fringe_trees().is_empty(),
        Err(_) => false,
    }
}

/// Whether `g` is a valid member of the class with f(G) = x*.
pub fn realizes(g: &ChemicalGraph, problem: &SearchProblem) -> bool {
    if !validate(g, problem.alphabet()).is_valid() || !in_class(g, problem) {
        return false;
    }
    let Ok(bd) = branch_decomposition(g, 2) else {
        return false;
    };
    graph_frequency_vector(g, &bd.in_vertex, &problem.layout).is_ok_and(|w| w == problem.x)
}

/// A random valid tree on `n` vertices with maximum degree `dmax`, `bl`
/// leaf 2-branches and every 2-fringe-tree within `n <= 2d + 2`, found by
/// rejection sampling within `tries` draws.
pub fn random_class_member<R: rand::Rng>(
    rng: &mut R,
    alphabet: &ChemicalAlphabet,
    n: usize,
    bl: usize,
    dmax: usize,
    tries: usize,
) -> Option<ChemicalGraph> {
    for _ in 0..tries {
        let g = crate::chemgraph::random::random_chemical_tree(rng, alphabet, n, dmax, 0.25);
        if g.max_degree() > dmax || !validate(&g, alphabet).is_valid() {
            continue;
        }
        let Ok(bd) = branch_decomposition(&g, 2) else { continue };
        if bd.bl == bl && bd.oversized_fringe_trees().is_empty() {
            return Some(g);
        }
    }
    None
}

/// Whether an automorphism of `g` maps one leaf 2-branch onto another, so
/// that the search meets `g` through fewer distinct pairings.
pub fn has_branch_symmetry(g: &ChemicalGraph) -> bool {
    let Ok(bd) = branch_decomposition(g, 2) else {
        return false;
    };
    let forms: Vec<String> = bd
        .leaf_branches
        .iter()
        .map(|&v| crate::chemgraph::canon::rooted_canon(g, v, None))
        .collect();
    (0..forms.len()).any(|i| (i + 1..forms.len()).any(|j| forms[i] == forms[j]))
}

/// All pairwise non-isomorphic acyclic chemical graphs of the target, at
/// most `cap` of them.
pub fn brute_force_enumerate(target: &BruteTarget, cap: usize) -> Result<Vec<ChemicalGraph>, SearchError> {
    let (n, alphabet, dmax) = match target {
        BruteTarget::Vector(p) => (p.n, p.alphabet(), p.dmax as usize),
        BruteTarget::Budget { n, alphabet, dmax, .. } => (*n, *alphabet, *dmax),
    };
    if n > MAX_BRUTE_N {
        return Err(SearchError::TooLarge {
            got: n,
            max: MAX_BRUTE_N,
        });
    }
    let layout = FreqLayout::new(alphabet);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for shape in free_trees(n, dmax) {
        let Ok(bd) = branch_decomposition(&shape, 2) else {
            continue;
        };
        let spec = match target {
            BruteTarget::Vector(p) => {
                if !degrees_match(&shape, &bd.in_vertex, &p.x, &layout) {
                    continue;
                }
                Labeling::Vector { x: &p.x }
            }
            BruteTarget::Budget { max_mult, .. } => Labeling::Budget { max_mult: *max_mult },
        };
        let mut found = Vec::new();
        label_shape(&shape, &bd.in_vertex, alphabet, &layout, &spec, &mut found);
        for g in found {
            if seen.insert(canonical_form(&g)) {
                if out.len() >= cap {
                    return Err(SearchError::CapExceeded(cap));
                }
                out.push(g);
            }
        }
    }
    Ok(out)
}

enum Labeling<'a> {
    Vector { x: &'a FrequencyVector },
    Budget { max_mult: u8 },
}

fn side(b: bool) -> Side {
    if b {
        Side::In
    } else {
        Side::Ex
    }
}

/// Degree counts of the shape equal those of the target on both sides.
fn degrees_match(shape: &ChemicalGraph, in_vertex: &[bool], x: &FrequencyVector, layout: &FreqLayout) -> bool {
    let mut w = FrequencyVector::zeros(layout);
    for (v, &is_in) in in_vertex.iter().enumerate().take(shape.n()) {
        let d = shape.degree(v) as u8;
        if d >= 1 && w.add(layout, side(is_in), FreqKey::Dg(d), 1).is_err() {
            return false;
        }
    }
    (1..=4u8).all(|d| {
        [Side::In, Side::Ex]
            .iter()
            .all(|&s| w.get(layout, s, FreqKey::Dg(d)) == x.get(layout, s, FreqKey::Dg(d)))
    })
}

/// Assigns labels in BFS order from vertex 0, each non-root vertex together
/// with the multiplicity of its parent edge, pruning on valence and on the
/// target counts.
fn label_shape(
    shape: &ChemicalGraph,
    in_vertex: &[bool],
    alphabet: &ChemicalAlphabet,
    layout: &FreqLayout,
    spec: &Labeling,
    out: &mut Vec<ChemicalGraph>,
) {
    let n = shape.n();
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &(y, e) in shape.neighbors(x) {
            if y != 0 && parent[y] == usize::MAX {
                parent[y] = x;
                parent_edge[y] = e;
                order.push(y);
            }
        }
        i += 1;
    }
    let mut g = shape.clone();
    let mut st = BondState {
        bond: vec![0; n],
        assigned: vec![0; n],
    };
    let w = FrequencyVector::zeros(layout);
    let ctx = LabelCtx {
        shape,
        in_vertex,
        alphabet,
        layout,
        spec,
        order: &order,
        parent: &parent,
        parent_edge: &parent_edge,
    };
    ctx.recurse(0, &mut g, &mut st, w, out);
}

struct LabelCtx<'a> {
    shape: &'a ChemicalGraph,
    in_vertex: &'a [bool],
    alphabet: &'a ChemicalAlphabet,
    layout: &'a FreqLayout,
    spec: &'a Labeling<'a>,
    order: &'a [usize],
    parent: &'a [usize],
    parent_edge: &'a [usize],
}

impl LabelCtx<'_> {
    fn fits(&self, w: &FrequencyVector) -> bool {
        match self.spec {
            Labeling::Vector { x } => w.le(x),
            Labeling::Budget { .. } => true,
        }
    }

    fn max_mult(&self) -> u8 {
        match self.spec {
            Labeling::Vector { .. } => 3,
            Labeling::Budget { max_mult } => *max_mult,
        }
    }

    fn recurse(
        &self,
        i: usize,
        g: &mut ChemicalGraph,
        st: &mut BondState,
        w: FrequencyVector,
        out: &mut Vec<ChemicalGraph>,
    ) {
        if i == self.order.len() {
            if let Labeling::Vector { x } = self.spec {
                if &w != *x {
                    return;
                }
            }
            out.push(g.clone());
            return;
        }
        let v = self.order[i];
        let al = self.alphabet;
        let deg = self.shape.degree(v) as u8;
        let s = side(self.in_vertex[v]);
        for a in 0..al.len() {
            if al.val(a) < deg {
                continue;
            }
            let mut wa = w.clone();
            if wa.add(self.layout, s, FreqKey::Elem(a), 1).is_err() {
                continue;
            }
            if deg >= 1 && wa.add(self.layout, s, FreqKey::Dg(deg), 1).is_err() {
                continue;
            }
            if !self.fits(&wa) {
                continue;
            }
            g.set_label(v, a);
            if i == 0 {
                self.recurse(i + 1, g, st, wa, out);
                continue;
            }
            let p = self.parent[v];
            let pa = g.label(p);
            let e = self.parent_edge[v];
            let es = side(self.in_vertex[v] && self.in_vertex[p]);
            let pdeg = self.shape.degree(p) as u8;
            // edges of p still unassigned after this one need a bond unit each
            let later = pdeg - st.assigned[p] - 1;
            for q in 1..=self.max_mult() {
                if st.bond[p] + q + later > al.val(pa) {
                    break;
                }
                if q + deg - 1 > al.val(a) || !al.is_proper(pa, a, q) {
                    continue;
                }
                let mut we = wa.clone();
                if we
                    .add(self.layout, es, FreqKey::Gamma(Gamma::new(pa, a, q)), 1)
                    .is_err()
                    || we
                        .add(self.layout, es, FreqKey::Bc(BondConfig::new(pdeg, deg, q)), 1)
                        .is_err()
                    || !self.fits(&we)
                {
                    continue;
                }
                g.set_multiplicity(e, q);
                st.bond[p] += q;
                st.assigned[p] += 1;
                st.bond[v] = q;
                st.assigned[v] = 1;
                self.recurse(i + 1, g, st, we, out);
                st.bond[p] -= q;
                st.assigned[p] -= 1;
                st.bond[v] = 0;
                st.assigned[v] = 0;
            }
        }
    }
}

/// Bond sums and assigned edge counts of the partial labeling.
struct BondState {
    bond: Vec<u8>,
    assigned: Vec<u8>,
}
