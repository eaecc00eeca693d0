//! AHU-style canonical strings for labeled trees.

use super::{diameter_and_center, Center, ChemicalGraph};

/// Canonical string of the subtree of `v` when `g` is rooted so that `parent`
/// (if any) is above `v`.
///
/// Shape: `(label,` followed by the sorted child entries `m(child...)`, then `)`.
pub fn rooted_canon(g: &ChemicalGraph, v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<String> = g
        .neighbors(v)
        .iter()
        .filter(|&&(w, _)| Some(w) != parent)
        .map(|&(w, e)| format!("{}{}", g.edge(e).m, rooted_canon(g, w, Some(v))))
        .collect();
    kids.sort_unstable();
    let mut s = format!("({},", g.label(v));
    for k in kids {
        s.push_str(&k);
    }
    s.push(')');
    s
}

/// Canonical string of a free tree, computed at its center.
///
/// Two trees get the same string iff they are isomorphic as labeled trees.
pub fn canonical_form(g: &ChemicalGraph) -> String {
    let (_, center) = diameter_and_center(g).expect("canonical_form needs a tree");
    match center {
        Center::Vertex(c) => rooted_canon(g, c, None),
        Center::Pair(a, b) => {
            let m = g.multiplicity(a, b).expect("center pair is adjacent");
            let mut s = [rooted_canon(g, a, Some(b)), rooted_canon(g, b, Some(a))];
            s.sort_unstable();
            format!("[{}{}{}]", m, s[0], s[1])
        }
    }
}

/// Alternative canonical string: the least rooted string over all roots.
///
/// Independent of center computation; used to cross-check [`canonical_form`].
pub fn canonical_form_min_root(g: &ChemicalGraph) -> String {
    (0..g.n()).map(|v| rooted_canon(g, v, None)).min().unwrap_or_default()
}
