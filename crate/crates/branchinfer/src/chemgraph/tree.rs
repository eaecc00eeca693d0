//! Diameter, center and k-branch decomposition of trees.

use std::collections::VecDeque;

use super::{ChemError, ChemicalGraph};

/// Center of a tree: a vertex (even diameter) or an adjacent pair (odd diameter).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Center {
    Vertex(usize),
    /// Ordered by vertex index.
    Pair(usize, usize),
}

impl Center {
    pub fn vertices(&self) -> Vec<usize> {
        match *self {
            Center::Vertex(c) => vec![c],
            Center::Pair(a, b) => vec![a, b],
        }
    }
}

fn bfs_parents(g: &ChemicalGraph, s: usize) -> (Vec<usize>, Vec<usize>) {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut par = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    dist[s] = 0;
    q.push_back(s);
    while let Some(x) = q.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                par[y] = x;
                q.push_back(y);
            }
        }
    }
    (dist, par)
}

fn farthest(dist: &[usize]) -> usize {
    let mut best = 0;
    for (v, &d) in dist.iter().enumerate() {
        if d > dist[best] {
            best = v;
        }
    }
    best
}

/// Diameter (edge count) and center of a tree.
pub fn diameter_and_center(g: &ChemicalGraph) -> Result<(usize, Center), ChemError> {
    if !g.is_tree() {
        return Err(ChemError::NotATree);
    }
    let (d0, _) = bfs_parents(g, 0);
    let u = farthest(&d0);
    let (du, par) = bfs_parents(g, u);
    let v = farthest(&du);
    let dia = du[v];
    let mut path = vec![v];
    let mut x = v;
    while x != u {
        x = par[x];
        path.push(x);
    }
    let center = if dia % 2 == 0 {
        Center::Vertex(path[dia / 2])
    } else {
        let (a, b) = (path[dia / 2], path[dia / 2 + 1]);
        Center::Pair(a.min(b), a.max(b))
    };
    Ok((dia, center))
}

/// A tree rooted at one vertex or at an adjacent pair of vertices.
///
/// With a pair root both endpoints have depth 0 and neither is a descendant
/// of the other.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub roots: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Children in increasing vertex order.
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    pub height: Vec<usize>,
    /// Breadth-first order starting from the roots.
    pub order: Vec<usize>,
}

impl RootedTree {
    /// Roots `g` at one vertex or at two adjacent vertices.
    pub fn new(g: &ChemicalGraph, roots: &[usize]) -> Result<Self, ChemError> {
        if !g.is_tree() {
            return Err(ChemError::NotATree);
        }
        let n = g.n();
        match roots.len() {
            1 => {}
            2 if g.multiplicity(roots[0], roots[1]).is_some() => {}
            _ => return Err(ChemError::BadRoot),
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut q = VecDeque::new();
        for &r in roots {
            seen[r] = true;
            q.push_back(r);
        }
        while let Some(x) = q.pop_front() {
            order.push(x);
            let mut nb: Vec<usize> = g.neighbors(x).iter().map(|&(y, _)| y).collect();
            nb.sort_unstable();
            for y in nb {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    q.push_back(y);
                }
            }
        }
        let mut children = vec![Vec::new(); n];
        for &v in &order {
            if let Some(p) = parent[v] {
                children[p].push(v);
            }
        }
        let mut height = vec![0; n];
        for &v in order.iter().rev() {
            if let Some(p) = parent[v] {
                height[p] = height[p].max(height[v] + 1);
            }
        }
        Ok(RootedTree {
            roots: roots.to_vec(),
            parent,
            children,
            depth,
            height,
            order,
        })
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.parent[v].is_none()
    }

    /// The root whose side contains `v`.
    pub fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    /// Vertices of the subtree below `v`, `v` first, in breadth-first order.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            out.extend(self.children[x].iter().copied());
            i += 1;
        }
        out
    }
}

/// A k-fringe-tree hanging from a vertex of the branch subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FringeTree {
    pub root: usize,
    /// Vertices of the fringe tree, root first.
    pub vertices: Vec<usize>,
    /// Number of children of the root inside the fringe tree.
    pub root_children: usize,
    pub height: usize,
}

impl FringeTree {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// The size condition `n <= 2d + 2`.
    pub fn satisfies_size_bound(&self) -> bool {
        self.n() <= 2 * self.root_children + 2
    }
}

/// The contracted tree on roots and k-branches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchTree {
    /// Graph vertices of the nodes; roots first.
    pub nodes: Vec<usize>,
    /// Parent node index of each node (`None` for roots).
    pub parent: Vec<Option<usize>>,
    /// Number of non-root branches on the path from the root, inclusive.
    pub depth: Vec<usize>,
}

/// k-branch decomposition of a center-rooted tree.
#[derive(Clone, Debug)]
pub struct BranchDecomposition {
    pub k: usize,
    pub dia: usize,
    pub center: Center,
    pub rooted: RootedTree,
    pub leaf_branches: Vec<usize>,
    pub nonleaf_branches: Vec<usize>,
    /// `in_vertex[v]` iff `v` lies on the branch subtree.
    pub in_vertex: Vec<bool>,
    pub v_in: Vec<usize>,
    pub v_ex: Vec<usize>,
    pub e_in: Vec<usize>,
    pub e_ex: Vec<usize>,
    pub fringe_trees: Vec<FringeTree>,
    pub bl: usize,
    pub bh: usize,
    pub branch_tree: BranchTree,
}

impl BranchDecomposition {
    pub fn is_branch(&self, v: usize) -> bool {
        self.leaf_branches.contains(&v) || self.nonleaf_branches.contains(&v)
    }

    /// Indices of fringe trees violating `n <= 2d + 2`.
    pub fn oversized_fringe_trees(&self) -> Vec<usize> {
        (0..self.fringe_trees.len())
            .filter(|&i| !self.fringe_trees[i].satisfies_size_bound())
            .collect()
    }
}

/// Decomposes `g` with respect to `k`, rooting at the center (both vertices of
/// a center pair are roots).
pub fn branch_decomposition(g: &ChemicalGraph, k: usize) -> Result<BranchDecomposition, ChemError> {
    let (dia, center) = diameter_and_center(g)?;
    decompose(g, k, dia, center, &center.vertices())
}

/// Decomposes `g` rooted at the given roots (one vertex or an adjacent pair).
pub fn branch_decomposition_rooted(
    g: &ChemicalGraph,
    k: usize,
    roots: &[usize],
) -> Result<BranchDecomposition, ChemError> {
    let (dia, center) = diameter_and_center(g)?;
    decompose(g, k, dia, center, roots)
}

fn decompose(
    g: &ChemicalGraph,
    k: usize,
    dia: usize,
    center: Center,
    roots: &[usize],
) -> Result<BranchDecomposition, ChemError> {
    let rt = RootedTree::new(g, roots)?;
    let n = g.n();
    let mut leaf_branches = Vec::new();
    let mut nonleaf_branches = Vec::new();
    for v in 0..n {
        if rt.is_root(v) {
            continue;
        }
        if rt.height[v] == k {
            leaf_branches.push(v);
        } else if rt.children[v].iter().filter(|&&c| rt.height[c] >= k).count() >= 2 {
            nonleaf_branches.push(v);
        }
    }
    let mut in_vertex = vec![false; n];
    if !leaf_branches.is_empty() {
        for &l in &leaf_branches {
            let mut x = l;
            loop {
                if in_vertex[x] {
                    break;
                }
                in_vertex[x] = true;
                match rt.parent[x] {
                    Some(p) => x = p,
                    None => break,
                }
            }
        }
        for &r in &rt.roots {
            in_vertex[r] = true;
        }
    }
    let v_in: Vec<usize> = (0..n).filter(|&v| in_vertex[v]).collect();
    let v_ex: Vec<usize> = (0..n).filter(|&v| !in_vertex[v]).collect();
    let mut e_in = Vec::new();
    let mut e_ex = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if in_vertex[e.u] && in_vertex[e.v] {
            e_in.push(i);
        } else {
            e_ex.push(i);
        }
    }
    let fringe_roots: Vec<usize> = if v_in.is_empty() {
        rt.roots.clone()
    } else {
        v_in.clone()
    };
    let mut fringe_trees = Vec::with_capacity(fringe_roots.len());
    for &r in &fringe_roots {
        let mut vertices = vec![r];
        let mut height = 0;
        let mut root_children = 0;
        for &c in &rt.children[r] {
            if in_vertex[c] {
                continue;
            }
            root_children += 1;
            height = height.max(rt.height[c] + 1);
            vertices.extend(rt.subtree(c));
        }
        fringe_trees.push(FringeTree {
            root: r,
            vertices,
            root_children,
            height,
        });
    }
    let mut is_branch = vec![false; n];
    for &v in leaf_branches.iter().chain(nonleaf_branches.iter()) {
        is_branch[v] = true;
    }
    let mut bt = BranchTree::default();
    let mut node_of = vec![usize::MAX; n];
    for &v in &rt.order {
        if !(rt.is_root(v) || is_branch[v]) {
            continue;
        }
        let idx = bt.nodes.len();
        node_of[v] = idx;
        bt.nodes.push(v);
        let mut p = rt.parent[v];
        let mut parent_node = None;
        while let Some(x) = p {
            if node_of[x] != usize::MAX {
                parent_node = Some(node_of[x]);
                break;
            }
            p = rt.parent[x];
        }
        bt.parent.push(parent_node);
        bt.depth.push(parent_node.map_or(0, |q| bt.depth[q] + 1));
    }
    let bh = bt.depth.iter().copied().max().unwrap_or(0);
    let bl = leaf_branches.len();
    Ok(BranchDecomposition {
        k,
        dia,
        center,
        rooted: rt,
        leaf_branches,
        nonleaf_branches,
        in_vertex,
        v_in,
        v_ex,
        e_in,
        e_ex,
        fringe_trees,
        bl,
        bh,
        branch_tree: bt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::random::{path, random_tree, spider};
    use proptest::prelude::*;
    use rand::SeedableRng;

    /// All-pairs distance matrix by repeated BFS.
    fn all_pairs(g: &ChemicalGraph) -> Vec<Vec<usize>> {
        (0..g.n())
            .map(|s| g.bfs_dist(s).into_iter().map(|d| d.unwrap()).collect())
            .collect()
    }

    /// Definitional branch oracle built from the distance matrix only.
    struct Oracle {
        leaf: Vec<usize>,
        nonleaf: Vec<usize>,
        v_in: Vec<usize>,
        bh: usize,
    }

    fn oracle(g: &ChemicalGraph, k: usize) -> Oracle {
        let d = all_pairs(g);
        let n = g.n();
        let dia = d.iter().flatten().copied().max().unwrap();
        // center: vertices minimizing eccentricity
        let ecc: Vec<usize> = (0..n).map(|v| *d[v].iter().max().unwrap()).collect();
        let r = *ecc.iter().min().unwrap();
        let roots: Vec<usize> = (0..n).filter(|&v| ecc[v] == r).collect();
        assert_eq!(roots.len(), if dia % 2 == 0 { 1 } else { 2 });
        let droot = |v: usize| roots.iter().map(|&c| d[c][v]).min().unwrap();
        // x is below v iff v lies on the path from the root side to x
        let below = |v: usize, x: usize| {
            let c = *roots.iter().min_by_key(|&&c| d[c][v]).unwrap();
            d[c][x] == d[c][v] + d[v][x] && droot(x) == d[c][x]
        };
        let height = |v: usize| (0..n).filter(|&x| below(v, x)).map(|x| d[v][x]).max().unwrap();
        let is_root = |v: usize| roots.contains(&v);
        let child = |v: usize, c: usize| d[v][c] == 1 && below(v, c) && c != v;
        let mut leaf = Vec::new();
        let mut nonleaf = Vec::new();
        for v in 0..n {
            if is_root(v) {
                continue;
            }
            if height(v) == k {
                leaf.push(v);
            } else if (0..n).filter(|&c| child(v, c) && height(c) >= k).count() >= 2 {
                nonleaf.push(v);
            }
        }
        let mut v_in = Vec::new();
        if !leaf.is_empty() {
            for v in 0..n {
                if is_root(v) || leaf.iter().any(|&l| below(v, l)) {
                    v_in.push(v);
                }
            }
        }
        let branches: Vec<usize> = leaf.iter().chain(nonleaf.iter()).copied().collect();
        let mut bh = 0;
        for &l in &leaf {
            bh = bh.max(branches.iter().filter(|&&b| below(b, l)).count());
        }
        Oracle {
            leaf,
            nonleaf,
            v_in,
            bh,
        }
    }

    #[test]
    fn path_three_center_middle() {
        let g = path(3);
        assert_eq!(diameter_and_center(&g).unwrap(), (2, Center::Vertex(1)));
        let bd = branch_decomposition(&g, 2).unwrap();
        assert_eq!((bd.bl, bd.bh), (0, 0));
        assert!(bd.v_in.is_empty());
        assert_eq!(bd.v_ex.len(), 3);
    }

    #[test]
    fn single_edge_center_pair() {
        let g = path(2);
        assert_eq!(diameter_and_center(&g).unwrap(), (1, Center::Pair(0, 1)));
    }

    #[test]
    fn spider_three_legs() {
        let g = spider(&[3, 3, 3]);
        let (dia, c) = diameter_and_center(&g).unwrap();
        assert_eq!((dia, c), (6, Center::Vertex(0)));
        let bd = branch_decomposition(&g, 2).unwrap();
        assert_eq!((bd.bl, bd.bh), (3, 1));
        let mut leafs = bd.leaf_branches.clone();
        leafs.sort();
        assert_eq!(leafs, vec![1, 4, 7]);
        let bd3 = branch_decomposition(&g, 3).unwrap();
        assert_eq!((bd3.bl, bd3.bh), (0, 0));
    }

    #[test]
    fn not_a_tree_rejected() {
        let mut g = ChemicalGraph::with_labels(vec![0; 3]);
        g.add_edge(0, 1, 1).unwrap();
        assert!(matches!(diameter_and_center(&g), Err(ChemError::NotATree)));
    }

    #[test]
    fn fringe_trees_have_bounded_height_and_partition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 1 + rand::Rng::gen_range(&mut rng, 0..20);
            let g = random_tree(&mut rng, n, 4);
            for k in 0..4 {
                let bd = branch_decomposition(&g, k).unwrap();
                let mut all: Vec<usize> = bd.fringe_trees.iter().flat_map(|f| f.vertices.clone()).collect();
                all.sort();
                assert_eq!(all, (0..g.n()).collect::<Vec<_>>());
                if !bd.v_in.is_empty() {
                    for f in &bd.fringe_trees {
                        assert!(f.height <= k);
                    }
                }
                assert_eq!(bd.e_in.len() + bd.e_ex.len(), g.edges().len());
            }
        }
    }

    #[test]
    fn agrees_with_definitional_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rand::Rng::gen_range(&mut rng, 1..=20);
            let g = random_tree(&mut rng, n, 4);
            for k in 1..=3 {
                let bd = branch_decomposition(&g, k).unwrap();
                let o = oracle(&g, k);
                let mut lb = bd.leaf_branches.clone();
                lb.sort();
                let mut nb = bd.nonleaf_branches.clone();
                nb.sort();
                assert_eq!(lb, o.leaf);
                assert_eq!(nb, o.nonleaf);
                assert_eq!(bd.v_in, o.v_in);
                assert_eq!(bd.bh, o.bh);
                assert_eq!(bd.bl, o.leaf.len());
            }
        }
    }

    #[test]
    fn diameter_matches_all_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rand::Rng::gen_range(&mut rng, 1..=50);
            let g = random_tree(&mut rng, n, 4);
            let d = all_pairs(&g);
            let dia = d.iter().flatten().copied().max().unwrap();
            assert_eq!(diameter_and_center(&g).unwrap().0, dia);
        }
    }

    proptest! {
        #[test]
        fn bl_bh_monotone_in_k(seed in 0u64..5000, n in 1usize..25) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = random_tree(&mut rng, n, 4);
            let mut prev = (usize::MAX, usize::MAX);
            for k in 0..5 {
                let bd = branch_decomposition(&g, k).unwrap();
                prop_assert!(bd.bl <= prev.0);
                prop_assert!(bd.bh <= prev.1);
                prev = (bd.bl, bd.bh);
            }
        }

        #[test]
        fn relabeling_invariance(seed in 0u64..5000, n in 2usize..20) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = random_tree(&mut rng, n, 4);
            let mut perm: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
            let h = g.permuted(&perm);
            for k in 0..4 {
                let a = branch_decomposition(&g, k).unwrap();
                let b = branch_decomposition(&h, k).unwrap();
                prop_assert_eq!((a.bl, a.bh, a.v_in.len()), (b.bl, b.bh, b.v_in.len()));
            }
        }
    }
}
