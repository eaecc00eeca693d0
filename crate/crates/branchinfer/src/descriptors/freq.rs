//! Frequency vectors of rooted fragments and their fictitious adjustments.

use std::fmt;

use super::DescError;
use crate::chemgraph::{BondConfig, ChemicalAlphabet, ChemicalGraph, ElemId, Gamma};

/// Inside or outside the terminal paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    In,
    Ex,
}

/// One coordinate of a frequency vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FreqKey {
    Elem(ElemId),
    Gamma(Gamma),
    Bc(BondConfig),
    /// Degree in `1..=4`.
    Dg(u8),
}

/// Maps [`FreqKey`]s of an alphabet to dense positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreqLayout {
    alphabet: ChemicalAlphabet,
    n_elem: usize,
    n_gamma: usize,
    n_bc: usize,
}

impl FreqLayout {
    pub fn new(alphabet: &ChemicalAlphabet) -> Self {
        FreqLayout {
            alphabet: alphabet.clone(),
            n_elem: alphabet.len(),
            n_gamma: alphabet.gamma().len(),
            n_bc: alphabet.bc().len(),
        }
    }

    pub fn alphabet(&self) -> &ChemicalAlphabet {
        &self.alphabet
    }

    /// Length of one side.
    pub fn dim(&self) -> usize {
        self.n_elem + self.n_gamma + self.n_bc + 4
    }

    pub fn pos(&self, key: FreqKey) -> Option<usize> {
        match key {
            FreqKey::Elem(a) => (a < self.n_elem).then_some(a),
            FreqKey::Gamma(g) => self.alphabet.gamma_pos(&g).map(|p| self.n_elem + p),
            FreqKey::Bc(b) => self.alphabet.bc_pos(&b).map(|p| self.n_elem + self.n_gamma + p),
            FreqKey::Dg(d) => (1..=4)
                .contains(&d)
                .then(|| self.n_elem + self.n_gamma + self.n_bc + d as usize - 1),
        }
    }

    pub fn key(&self, pos: usize) -> FreqKey {
        let g0 = self.n_elem;
        let b0 = g0 + self.n_gamma;
        let d0 = b0 + self.n_bc;
        if pos < g0 {
            FreqKey::Elem(pos)
        } else if pos < b0 {
            FreqKey::Gamma(self.alphabet.gamma()[pos - g0])
        } else if pos < d0 {
            FreqKey::Bc(self.alphabet.bc()[pos - b0])
        } else {
            FreqKey::Dg((pos - d0 + 1) as u8)
        }
    }

    /// Positions of the element entries.
    pub fn elem_range(&self) -> std::ops::Range<usize> {
        0..self.n_elem
    }

    /// Positions of the adjacency-configuration entries.
    pub fn gamma_range(&self) -> std::ops::Range<usize> {
        self.n_elem..self.n_elem + self.n_gamma
    }

    /// Stable text name of a key, e.g. `C`, `ac:C:N:1`, `bc:1:2:1`, `dg:3`.
    pub fn key_name(&self, key: FreqKey) -> String {
        let al = &self.alphabet;
        match key {
            FreqKey::Elem(a) => al.symbol(a).to_string(),
            FreqKey::Gamma(g) => format!("ac:{}:{}:{}", al.symbol(g.a), al.symbol(g.b), g.m),
            FreqKey::Bc(b) => format!("bc:{}:{}:{}", b.d1, b.d2, b.m),
            FreqKey::Dg(d) => format!("dg:{d}"),
        }
    }

    /// Inverse of [`FreqLayout::key_name`].
    pub fn parse_key(&self, s: &str) -> Option<FreqKey> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<u8>().ok();
        match parts.as_slice() {
            [sym] => self.alphabet.id(sym).map(FreqKey::Elem),
            ["ac", a, b, m] => Some(FreqKey::Gamma(Gamma::new(
                self.alphabet.id(a)?,
                self.alphabet.id(b)?,
                num(m)?,
            ))),
            ["bc", d1, d2, m] => Some(FreqKey::Bc(BondConfig::new(num(d1)?, num(d2)?, num(m)?))),
            ["dg", d] => Some(FreqKey::Dg(num(d)?)),
            _ => None,
        }
    }
}

/// Pair `(w_in, w_ex)` stored as one array: in-part first, then ex-part.
///
/// The derived ordering is lexicographic on `(w_in, w_ex)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyVector {
    data: Vec<u16>,
}

impl fmt::Debug for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.data.len() / 2;
        write!(f, "FV(in={:?}, ex={:?})", &self.data[..d], &self.data[d..])
    }
}

impl FrequencyVector {
    pub fn zeros(layout: &FreqLayout) -> Self {
        FrequencyVector {
            data: vec![0; 2 * layout.dim()],
        }
    }

    pub fn from_raw(data: Vec<u16>) -> Self {
        FrequencyVector { data }
    }

    pub fn raw(&self) -> &[u16] {
        &self.data
    }

    fn dim(&self) -> usize {
        self.data.len() / 2
    }

    pub fn w_in(&self) -> &[u16] {
        &self.data[..self.dim()]
    }

    pub fn w_ex(&self) -> &[u16] {
        &self.data[self.dim()..]
    }

    fn idx(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::In => pos,
            Side::Ex => self.dim() + pos,
        }
    }

    pub fn get_pos(&self, side: Side, pos: usize) -> u16 {
        self.data[self.idx(side, pos)]
    }

    pub fn get(&self, layout: &FreqLayout, side: Side, key: FreqKey) -> u16 {
        layout.pos(key).map_or(0, |p| self.get_pos(side, p))
    }

    pub fn add_pos(&mut self, side: Side, pos: usize, delta: i32) -> Result<(), DescError> {
        let i = self.idx(side, pos);
        let v = self.data[i] as i32 + delta;
        if !(0..=u16::MAX as i32).contains(&v) {
            return Err(DescError::NegativeEntry);
        }
        self.data[i] = v as u16;
        Ok(())
    }

    /// Adds `delta` to one coordinate; keys outside the layout are rejected.
    pub fn add(&mut self, layout: &FreqLayout, side: Side, key: FreqKey, delta: i32) -> Result<(), DescError> {
        let p = layout.pos(key).ok_or(DescError::KeyOutsideLayout)?;
        self.add_pos(side, p, delta)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &FrequencyVector) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a <= b)
    }

    /// Componentwise sum.
    pub fn plus(&self, other: &FrequencyVector) -> FrequencyVector {
        FrequencyVector {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Componentwise difference, `None` if any entry would be negative.
    pub fn minus(&self, other: &FrequencyVector) -> Option<FrequencyVector> {
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(&other.data) {
            data.push(a.checked_sub(*b)?);
        }
        Some(FrequencyVector { data })
    }

    /// Restriction to the positions in `keep` (other entries zeroed).
    pub fn project(&self, keep: &[usize]) -> FrequencyVector {
        let d = self.dim();
        let mut out = vec![0; self.data.len()];
        for &p in keep {
            out[p] = self.data[p];
            out[d + p] = self.data[d + p];
        }
        FrequencyVector { data: out }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Total of the element entries on both sides (vertex count).
    pub fn vertex_count(&self, layout: &FreqLayout) -> u32 {
        layout
            .elem_range()
            .map(|p| self.get_pos(Side::In, p) as u32 + self.get_pos(Side::Ex, p) as u32)
            .sum()
    }

    /// Text rendering: one `in|ex key count` line per nonzero entry.
    pub fn to_text(&self, layout: &FreqLayout) -> String {
        let mut s = String::new();
        for (side, tag) in [(Side::In, "in"), (Side::Ex, "ex")] {
            for p in 0..layout.dim() {
                let c = self.get_pos(side, p);
                if c > 0 {
                    s.push_str(&format!("{tag} {} {c}\n", layout.key_name(layout.key(p))));
                }
            }
        }
        s
    }
}

/// A tree with up to three designated terminals.
///
/// The in-part consists of the vertices on paths between terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedFragment {
    pub tree: ChemicalGraph,
    pub r1: usize,
    pub r2: usize,
    pub r3: Option<usize>,
}

impl RootedFragment {
    pub fn rooted(tree: ChemicalGraph, r: usize) -> Self {
        RootedFragment {
            tree,
            r1: r,
            r2: r,
            r3: None,
        }
    }

    pub fn bi_rooted(tree: ChemicalGraph, r1: usize, r2: usize) -> Self {
        RootedFragment { tree, r1, r2, r3: None }
    }

    /// Vertices of the path from `a` to `b`.
    fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let g = &self.tree;
        let mut par = vec![usize::MAX; g.n()];
        let mut stack = vec![a];
        par[a] = a;
        while let Some(x) = stack.pop() {
            for &(y, _) in g.neighbors(x) {
                if par[y] == usize::MAX {
                    par[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut p = vec![b];
        let mut x = b;
        while x != a {
            x = par[x];
            p.push(x);
        }
        p.reverse();
        p
    }

    /// The backbone path from `r1` to `r2`.
    pub fn backbone(&self) -> Vec<usize> {
        self.path(self.r1, self.r2)
    }

    /// Number of backbone edges.
    pub fn backbone_len(&self) -> usize {
        self.backbone().len() - 1
    }

    /// Membership flags of the in-part.
    pub fn in_vertices(&self) -> Vec<bool> {
        let mut inside = vec![false; self.tree.n()];
        for v in self.backbone() {
            inside[v] = true;
        }
        if let Some(r3) = self.r3 {
            for v in self.path(self.r1, r3) {
                inside[v] = true;
            }
            for v in self.path(self.r2, r3) {
                inside[v] = true;
            }
        }
        inside
    }

    fn check(&self) -> Result<(), DescError> {
        let n = self.tree.n();
        let ok = self.tree.is_tree() && self.r1 < n && self.r2 < n && self.r3.is_none_or(|r| r < n);
        if ok {
            Ok(())
        } else {
            Err(DescError::InvalidFragment)
        }
    }
}

/// Counts over a tree with per-vertex degree offsets (fictitious degrees).
fn count_with_offsets(
    g: &ChemicalGraph,
    inside: &[bool],
    offsets: &[u8],
    layout: &FreqLayout,
) -> Result<FrequencyVector, DescError> {
    let side = |b: bool| if b { Side::In } else { Side::Ex };
    let deg = |v: usize| g.degree(v) + offsets[v] as usize;
    let mut w = FrequencyVector::zeros(layout);
    for (v, &is_in) in inside.iter().enumerate().take(g.n()) {
        let s = side(is_in);
        w.add(layout, s, FreqKey::Elem(g.label(v)), 1)?;
        let d = deg(v);
        if d > 4 {
            return Err(DescError::DegreeTooLarge { vertex: v, degree: d });
        }
        if d >= 1 {
            w.add(layout, s, FreqKey::Dg(d as u8), 1)?;
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        let s = side(inside[e.u] && inside[e.v]);
        w.add(layout, s, FreqKey::Gamma(g.gamma_of(i)), 1)
            .map_err(|_| DescError::TupleNotInGamma { edge: i })?;
        let bc = BondConfig::new(deg(e.u) as u8, deg(e.v) as u8, e.m);
        w.add(layout, s, FreqKey::Bc(bc), 1)
            .map_err(|_| DescError::BondConfigOutside { edge: i })?;
    }
    Ok(w)
}

/// f(T) = (f_in(T), f_ex(T)) with degrees measured in the fragment.
pub fn frequency_vector(frag: &RootedFragment, layout: &FreqLayout) -> Result<FrequencyVector, DescError> {
    frag.check()?;
    let offsets = vec![0u8; frag.tree.n()];
    count_with_offsets(&frag.tree, &frag.in_vertices(), &offsets, layout)
}

/// f(T) with the degree of each listed vertex raised by the given amount.
pub fn frequency_vector_with_offsets(
    frag: &RootedFragment,
    raise: &[(usize, u8)],
    layout: &FreqLayout,
) -> Result<FrequencyVector, DescError> {
    frag.check()?;
    let mut offsets = vec![0u8; frag.tree.n()];
    for &(v, p) in raise {
        offsets[v] += p;
    }
    count_with_offsets(&frag.tree, &frag.in_vertices(), &offsets, layout)
}

/// f(G) of a whole tree with a given in-part (vertex flags), degrees taken in G.
pub fn graph_frequency_vector(
    g: &ChemicalGraph,
    in_vertex: &[bool],
    layout: &FreqLayout,
) -> Result<FrequencyVector, DescError> {
    if !g.is_tree() || in_vertex.len() != g.n() {
        return Err(DescError::NotATree);
    }
    let offsets = vec![0u8; g.n()];
    count_with_offsets(g, in_vertex, &offsets, layout)
}

/// Fictitious degree raise at a terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fictitious {
    /// T[+p]: the degree of r1 is raised by p.
    R1(u8),
    /// T⟨+1⟩: the degree of r3 is raised by one.
    R3,
}

/// Moves the degree of terminal `v` from `from` to `to` inside `w`: the dg
/// entry shifts and every bond configuration on an edge at `v` is re-keyed,
/// each on the side where that edge is counted.
pub fn shift_terminal_degree(
    w: &FrequencyVector,
    frag: &RootedFragment,
    v: usize,
    from: u8,
    to: u8,
    layout: &FreqLayout,
) -> Result<FrequencyVector, DescError> {
    if to > 4 || from > 4 {
        return Err(DescError::DegreeTooLarge {
            vertex: v,
            degree: from.max(to) as usize,
        });
    }
    let g = &frag.tree;
    let inside = frag.in_vertices();
    let side = |b: bool| if b { Side::In } else { Side::Ex };
    let mut out = w.clone();
    let sv = side(inside[v]);
    if from >= 1 {
        out.add(layout, sv, FreqKey::Dg(from), -1)?;
    }
    if to >= 1 {
        out.add(layout, sv, FreqKey::Dg(to), 1)?;
    }
    for &(x, e) in g.neighbors(v) {
        let m = g.edge(e).m;
        let s = side(inside[v] && inside[x]);
        let dx = g.degree(x) as u8;
        out.add(layout, s, FreqKey::Bc(BondConfig::new(from, dx, m)), -1)?;
        out.add(layout, s, FreqKey::Bc(BondConfig::new(to, dx, m)), 1)?;
    }
    Ok(out)
}

/// f(T[+p]) or f(T⟨+1⟩) obtained from f(T) by the update rules.
pub fn fictitious_adjust(
    frag: &RootedFragment,
    mode: Fictitious,
    layout: &FreqLayout,
) -> Result<FrequencyVector, DescError> {
    let base = frequency_vector(frag, layout)?;
    let (v, p) = match mode {
        Fictitious::R1(p) => (frag.r1, p),
        Fictitious::R3 => (frag.r3.ok_or(DescError::InvalidFragment)?, 1),
    };
    let d = frag.tree.degree(v) as u8;
    shift_terminal_degree(&base, frag, v, d, d + p, layout)
}
