//! Target specification and the scheme graph SG.

use super::MilpError;
use crate::chemgraph::{template_size, ChemicalAlphabet, RootedTreeTemplate};

/// Structural targets of the inferred graph plus the property window.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    pub alphabet: ChemicalAlphabet,
    pub n_star: usize,
    pub d_max: usize,
    pub dia_star: usize,
    pub k_star: usize,
    pub bh_star: usize,
    pub bl_star: usize,
    pub y_star: f64,
    pub epsilon: f64,
    /// Overrides the default link-path length when set.
    pub t_star: Option<usize>,
}

impl TargetSpec {
    /// A spec with `y* = 0`, `ε = 0.02` and the default `t*`.
    pub fn new(
        alphabet: ChemicalAlphabet,
        n_star: usize,
        d_max: usize,
        dia_star: usize,
        k_star: usize,
        bh_star: usize,
        bl_star: usize,
    ) -> Self {
        TargetSpec {
            alphabet,
            n_star,
            d_max,
            dia_star,
            k_star,
            bh_star,
            bl_star,
            y_star: 0.0,
            epsilon: 0.02,
            t_star: None,
        }
    }

    pub fn validate(&self) -> Result<(), MilpError> {
        let bad = |m: String| Err(MilpError::InvalidSpec(m));
        if self.n_star < 3 {
            return bad(format!("n* = {} < 3", self.n_star));
        }
        if !(3..=4).contains(&self.d_max) {
            return bad(format!("d_max = {} not in {{3, 4}}", self.d_max));
        }
        if self.dia_star < 3 {
            return bad(format!("dia* = {} < 3", self.dia_star));
        }
        if self.k_star < 1 {
            return bad("k* must be at least 1".into());
        }
        if self.bh_star < 1 {
            return bad("bh* must be at least 1".into());
        }
        if self.bl_star < 2 {
            return bad(format!("bl* = {} < 2", self.bl_star));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 || !self.y_star.is_finite() {
            return bad("y* and epsilon must be finite, epsilon >= 0".into());
        }
        Ok(())
    }

    /// `n* − (bh* − 1) − (k* + 1)·bl*`, possibly non-positive.
    pub fn default_t_star(&self) -> i64 {
        self.n_star as i64 - (self.bh_star as i64 - 1) - (self.k_star as i64 + 1) * self.bl_star as i64
    }
}

/// An edge slot of the scheme graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Edge `a_i` of the base tree.
    Base(usize),
    /// Edge `e_t = v_{t−1,1} v_{t,1}` of the link path, `t ≥ 2`.
    Link(usize),
    /// Edge `u_{s,1} v_{t,1}`.
    Cross(usize, usize),
    /// Edge of fringe template `p` into vertex `i ≥ 2`.
    Fringe(usize, usize),
}

impl Slot {
    /// Index part shared by all per-slot variable names.
    pub fn key(&self) -> String {
        match *self {
            Slot::Base(i) => format!("A_{i}"),
            Slot::Link(t) => format!("E_{t}"),
            Slot::Cross(s, t) => format!("H_{s}_{t}"),
            Slot::Fringe(p, i) => format!("F_{p}_{i}"),
        }
    }

    pub fn internal(&self) -> bool {
        !matches!(self, Slot::Fringe(..))
    }
}

/// Variable names; the solution format relies on them.
pub mod names {
    use super::Slot;

    pub fn a(i: usize) -> String {
        format!("a_{i}")
    }
    pub fn est(s: usize, t: usize) -> String {
        format!("est_{s}_{t}")
    }
    pub fn ets(t: usize, s: usize) -> String {
        format!("ets_{t}_{s}")
    }
    pub fn chi(t: usize) -> String {
        format!("chi_{t}")
    }
    pub fn dclr(t: usize, c: usize) -> String {
        format!("dclr_{t}_{c}")
    }
    pub fn clr(c: usize) -> String {
        format!("clr_{c}")
    }
    pub fn degbp(s: usize) -> String {
        format!("degbp_{s}")
    }
    pub fn degbm(s: usize) -> String {
        format!("degbm_{s}")
    }
    pub fn sigma(s: usize) -> String {
        format!("sigma_{s}")
    }
    pub fn u(s: usize, i: usize) -> String {
        format!("u_{s}_{i}")
    }
    pub fn v(t: usize, i: usize) -> String {
        format!("v_{t}_{i}")
    }
    pub fn e(t: usize) -> String {
        format!("e_{t}")
    }
    pub fn alpha(p: usize, i: usize) -> String {
        format!("alpha_{p}_{i}")
    }
    pub fn dalpha(p: usize, i: usize, code: u32) -> String {
        format!("dalpha_{p}_{i}_{code}")
    }
    pub fn deg(p: usize, i: usize) -> String {
        format!("deg_{p}_{i}")
    }
    pub fn ddeg(p: usize, i: usize, d: usize) -> String {
        format!("ddeg_{p}_{i}_{d}")
    }
    pub fn beta(sl: &Slot) -> String {
        format!("bt_{}", sl.key())
    }
    pub fn dbeta(sl: &Slot, m: u8) -> String {
        format!("dbt_{}_{m}", sl.key())
    }
    pub fn tau(sl: &Slot, ca: u32, cb: u32, m: u8) -> String {
        format!("tau_{}_{ca}_{cb}_{m}", sl.key())
    }
    pub fn dc(sl: &Slot, d: u8, d2: u8, m: u8) -> String {
        format!("dc_{}_{d}_{d2}_{m}", sl.key())
    }
    pub const MASS: &str = "mass";
    pub const NH: &str = "nh";
    pub fn bd(side: &str, m: u8) -> String {
        format!("bd{side}_{m}")
    }
    pub fn dg(side: &str, d: usize) -> String {
        format!("dg{side}_{d}")
    }
    pub fn ce(side: &str, sym: &str) -> String {
        format!("ce{side}_{sym}")
    }
    pub fn ac(side: &str, a: &str, b: &str, m: u8) -> String {
        format!("ac{side}_{a}_{b}_{m}")
    }
    pub fn bc(side: &str, d: u8, d2: u8, m: u8) -> String {
        format!("bc{side}_{d}_{d2}_{m}")
    }
    pub fn hid(l: usize, j: usize) -> String {
        format!("h_{l}_{j}")
    }
    pub fn act(l: usize, j: usize) -> String {
        format!("r_{l}_{j}")
    }
    pub const Y: &str = "y";
}

/// The scheme graph: base tree `T_B`, link path `P_{t*}` and the fringe
/// templates `S_s`, `T_t` hanging from their vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeGraph {
    pub d_max: usize,
    pub k_star: usize,
    pub bh_star: usize,
    pub s_star: usize,
    pub c_star: usize,
    pub t_star: usize,
    /// `T(d_max, d_max − 1, bh*)`; vertex `s` is `u_s`.
    pub base: RootedTreeTemplate,
    /// `T(d_max − 1, d_max − 1, k*)`, shared by every `S_s`.
    pub s_tree: RootedTreeTemplate,
    /// `T(d_max − 2, d_max − 1, k*)`, shared by every `T_t`.
    pub t_tree: RootedTreeTemplate,
    pub n_tree_s: usize,
    pub n_tree_t: usize,
    /// `head[i] = i + 1`, index 0 unused.
    pub head: Vec<usize>,
    /// `tail[i]` is the parent of `u_{i+1}`, index 0 unused.
    pub tail: Vec<usize>,
    /// Edges entering `u_s`.
    pub e_minus: Vec<Vec<usize>>,
    /// Edges leaving `u_s`.
    pub e_plus: Vec<Vec<usize>>,
    /// Leaves of `T_B`.
    pub leaves: Vec<usize>,
    pub s_left: usize,
    pub s_right: usize,
    /// Vertices of `T_B` at depth `d`.
    pub v_depth: Vec<Vec<usize>>,
    /// Non-root vertices on the path from the root to `u_s`.
    pub path_vertices: Vec<Vec<usize>>,
    /// Edges on the path from the root to `u_s`.
    pub path_edges: Vec<Vec<usize>>,
}

impl SchemeGraph {
    pub fn new(spec: &TargetSpec) -> Result<Self, MilpError> {
        spec.validate()?;
        let t_star = match spec.t_star {
            Some(t) => t as i64,
            None => spec.default_t_star(),
        };
        if t_star <= 0 {
            return Err(MilpError::Infeasible(format!("t* = {t_star} is not positive")));
        }
        let (d, k, bh) = (spec.d_max, spec.k_star, spec.bh_star);
        let base = RootedTreeTemplate::new(d, d - 1, bh);
        let s_tree = RootedTreeTemplate::new(d - 1, d - 1, k);
        let t_tree = RootedTreeTemplate::new(d - 2, d - 1, k);
        let s_star = base.n;
        let c_star = s_star - 1;
        let mut head = vec![0; c_star + 1];
        let mut tail = vec![0; c_star + 1];
        let mut e_minus = vec![Vec::new(); s_star + 1];
        let mut e_plus = vec![Vec::new(); s_star + 1];
        for i in 1..=c_star {
            head[i] = i + 1;
            tail[i] = base.prt[i + 1];
            e_minus[head[i]].push(i);
            e_plus[tail[i]].push(i);
        }
        let leaves = base.leaves();
        let s_left = leaves[0];
        let s_right = *leaves.last().unwrap();
        let v_depth = (0..=bh).map(|x| base.at_depth(x)).collect();
        let mut path_vertices = vec![Vec::new(); s_star + 1];
        let mut path_edges = vec![Vec::new(); s_star + 1];
        for s in 1..=s_star {
            path_vertices[s] = base.path_to(s);
            path_edges[s] = path_vertices[s].iter().map(|&x| x - 1).collect();
        }
        Ok(SchemeGraph {
            d_max: d,
            k_star: k,
            bh_star: bh,
            s_star,
            c_star,
            t_star: t_star as usize,
            n_tree_s: s_tree.n,
            n_tree_t: t_tree.n,
            base,
            s_tree,
            t_tree,
            head,
            tail,
            e_minus,
            e_plus,
            leaves,
            s_left,
            s_right,
            v_depth,
            path_vertices,
            path_edges,
        })
    }

    /// Number of fringe-template positions `s* + t*`.
    pub fn n_positions(&self) -> usize {
        self.s_star + self.t_star
    }

    pub fn is_s(&self, p: usize) -> bool {
        p <= self.s_star
    }

    /// Fringe template at position `p`.
    pub fn template(&self, p: usize) -> &RootedTreeTemplate {
        if self.is_s(p) {
            &self.s_tree
        } else {
            &self.t_tree
        }
    }

    /// Number of template vertices at position `p`.
    pub fn size_at(&self, p: usize) -> usize {
        self.template(p).n
    }

    /// Name of the existence variable of vertex `(p, i)`.
    pub fn vert(&self, p: usize, i: usize) -> String {
        if self.is_s(p) {
            names::u(p, i)
        } else {
            names::v(p - self.s_star, i)
        }
    }

    /// All positions `(p, i)` in order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 1..=self.n_positions() {
            for i in 1..=self.size_at(p) {
                out.push((p, i));
            }
        }
        out
    }

    /// All edge slots in order: base, link, cross, fringe.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        out.extend((1..=self.c_star).map(Slot::Base));
        out.extend((2..=self.t_star).map(Slot::Link));
        for s in 1..=self.s_star {
            for t in 1..=self.t_star {
                out.push(Slot::Cross(s, t));
            }
        }
        for p in 1..=self.n_positions() {
            for i in 2..=self.size_at(p) {
                out.push(Slot::Fringe(p, i));
            }
        }
        out
    }

    /// Tail and head positions of a slot.
    pub fn endpoints(&self, sl: &Slot) -> ((usize, usize), (usize, usize)) {
        match *sl {
            Slot::Base(i) => ((self.tail[i], 1), (self.head[i], 1)),
            Slot::Link(t) => ((self.s_star + t - 1, 1), (self.s_star + t, 1)),
            Slot::Cross(s, t) => ((s, 1), (self.s_star + t, 1)),
            Slot::Fringe(p, i) => ((p, self.template(p).prt[i]), (p, i)),
        }
    }

    /// Names of the 0/1 variables whose sum says whether the slot is used.
    pub fn slot_used(&self, sl: &Slot) -> Vec<String> {
        match *sl {
            Slot::Base(i) => vec![names::a(i)],
            Slot::Link(t) => vec![names::e(t)],
            Slot::Cross(s, t) => vec![names::est(s, t), names::ets(t, s)],
            Slot::Fringe(p, i) => vec![self.vert(p, i)],
        }
    }

    /// Whether `u_s` lies in the subtree of `u_2` (the left child of the root).
    pub fn in_left_subtree(&self, s: usize) -> bool {
        s >= 2 && self.base.is_descendant(s, 2)
    }

    /// Distance bound for leaf `s` of `T_B`: `⌈dia/2⌉ − k` on the left
    /// subtree, `⌊dia/2⌋ − k` elsewhere.
    pub fn leaf_distance_bound(&self, s: usize, dia: usize) -> i64 {
        let half = if self.in_left_subtree(s) {
            dia.div_ceil(2)
        } else {
            dia / 2
        };
        half as i64 - self.k_star as i64
    }
}

/// `s*` for the given parameters.
pub fn s_star(d_max: usize, bh: usize) -> usize {
    template_size(d_max, d_max - 1, bh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, d: usize, dia: usize, k: usize, bh: usize, bl: usize) -> TargetSpec {
        TargetSpec::new(ChemicalAlphabet::cno(), n, d, dia, k, bh, bl)
    }

    /// `d((d−1)^bh − 1)/(d − 2) + 1` evaluated directly.
    fn s_star_formula(d: usize, bh: u32) -> usize {
        d * ((d - 1).pow(bh) - 1) / (d - 2) + 1
    }

    #[test]
    fn formula_fixtures() {
        let sg = SchemeGraph::new(&spec(20, 3, 8, 2, 2, 3)).unwrap();
        assert_eq!((sg.s_star, sg.c_star, sg.n_tree_s, sg.n_tree_t), (10, 9, 7, 4));
        assert_eq!(sg.leaves, vec![5, 6, 7, 8, 9, 10]);
        assert_eq!((sg.s_left, sg.s_right), (5, 10));
        let sg = SchemeGraph::new(&spec(37, 3, 12, 2, 2, 3)).unwrap();
        assert_eq!(sg.t_star, 27);
        let sg = SchemeGraph::new(&spec(20, 4, 8, 2, 1, 2)).unwrap();
        assert_eq!((sg.s_star, sg.c_star), (5, 4));
        for d in 3..=4 {
            for bh in 1..=4 {
                assert_eq!(s_star(d, bh as usize), s_star_formula(d, bh));
            }
        }
    }

    #[test]
    fn head_tail_and_paths() {
        let sg = SchemeGraph::new(&spec(20, 3, 8, 2, 2, 3)).unwrap();
        assert_eq!(sg.tail[1..].to_vec(), vec![1, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(sg.e_plus[1], vec![1, 2, 3]);
        assert_eq!(sg.e_minus[6], vec![5]);
        assert_eq!(sg.path_vertices[6], vec![2, 6]);
        assert_eq!(sg.path_edges[6], vec![1, 5]);
        assert!(sg.in_left_subtree(6) && !sg.in_left_subtree(7));
        assert_eq!(sg.leaf_distance_bound(5, 9), 3);
        assert_eq!(sg.leaf_distance_bound(10, 9), 2);
        let slots = sg.slots();
        assert_eq!(
            slots.len(),
            9 + (sg.t_star - 1) + 10 * sg.t_star + 10 * 6 + sg.t_star * 3
        );
        assert_eq!(sg.endpoints(&Slot::Fringe(11, 2)), ((11, 1), (11, 2)));
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            SchemeGraph::new(&spec(8, 3, 5, 2, 1, 3)),
            Err(MilpError::Infeasible(_))
        ));
        assert!(SchemeGraph::new(&spec(8, 5, 6, 2, 1, 2)).is_err());
        assert!(SchemeGraph::new(&spec(8, 3, 5, 2, 1, 1)).is_err());
        assert_eq!(SchemeGraph::new(&spec(8, 3, 5, 2, 1, 2)).unwrap().t_star, 2);
        let mut s = spec(8, 3, 6, 2, 1, 2);
        s.t_star = Some(3);
        assert_eq!(SchemeGraph::new(&s).unwrap().t_star, 3);
    }
}
