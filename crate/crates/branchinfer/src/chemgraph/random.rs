//! Small graph builders and seeded random generators.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ChemicalAlphabet, ChemicalGraph};

/// Path on `n` carbon-labeled vertices (element id 0) with single bonds.
pub fn path(n: usize) -> ChemicalGraph {
    let mut g = ChemicalGraph::with_labels(vec![0; n]);
    for i in 1..n {
        g.add_edge(i - 1, i, 1).expect("valid path edge");
    }
    g
}

/// Hub vertex 0 with legs of the given lengths, single bonds, element id 0.
///
/// Leg vertices are numbered consecutively leg by leg.
pub fn spider(legs: &[usize]) -> ChemicalGraph {
    let mut g = ChemicalGraph::with_labels(vec![0]);
    for &len in legs {
        let mut prev = 0;
        for _ in 0..len {
            let v = g.add_vertex(0);
            g.add_edge(prev, v, 1).expect("valid leg edge");
            prev = v;
        }
    }
    g
}

/// Uniform random attachment tree on `n` vertices with maximum degree `dmax`,
/// all labels 0 and single bonds.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, dmax: usize) -> ChemicalGraph {
    let mut g = ChemicalGraph::with_labels(vec![0; n]);
    let mut deg = vec![0usize; n];
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < dmax).collect();
        let u = *open.choose(rng).expect("dmax >= 2 leaves an open vertex");
        g.add_edge(u, v, 1).expect("valid tree edge");
        deg[u] += 1;
        deg[v] += 1;
    }
    g
}

/// Random valid acyclic chemical graph over `alphabet` with maximum degree
/// `dmax`: a random tree shape, random labels respecting valence, then random
/// multiplicity upgrades that keep every tuple proper.
pub fn random_chemical_tree<R: Rng>(
    rng: &mut R,
    alphabet: &ChemicalAlphabet,
    n: usize,
    dmax: usize,
    upgrade_prob: f64,
) -> ChemicalGraph {
    let maxv = alphabet.max_val() as usize;
    let mut g = random_tree(rng, n, dmax.min(maxv));
    for v in 0..n {
        let d = g.degree(v);
        let opts: Vec<usize> = (0..alphabet.len()).filter(|&a| alphabet.val(a) as usize >= d).collect();
        g.set_label(v, *opts.choose(rng).expect("some element has valence >= degree"));
    }
    // fix labels that only appear in improper single-bond tuples
    for _ in 0..4 {
        let mut changed = false;
        for i in 0..g.edges().len() {
            let e = g.edge(i);
            if !alphabet.is_proper(g.label(e.u), g.label(e.v), 1) {
                let x = if rng.gen_bool(0.5) { e.u } else { e.v };
                let d = g.degree(x);
                let opts: Vec<usize> = (0..alphabet.len()).filter(|&a| alphabet.val(a) as usize >= d).collect();
                g.set_label(x, *opts.choose(rng).unwrap());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<usize> = (0..g.edges().len()).collect();
    order.shuffle(rng);
    for i in order {
        if !rng.gen_bool(upgrade_prob) {
            continue;
        }
        let e = g.edge(i);
        let m = e.m + 1;
        let (a, b) = (g.label(e.u), g.label(e.v));
        if m <= 3
            && alphabet.is_proper(a, b, m)
            && g.bond_sum(e.u) < alphabet.val(a) as u32
            && g.bond_sum(e.v) < alphabet.val(b) as u32
        {
            g.set_multiplicity(i, m);
        }
    }
    g
}
