//! Labeled multi-bond graphs, their text format and validity checks.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::{ChemError, ChemicalAlphabet, ElemId, Gamma};

/// An edge `{u, v}` with bond multiplicity `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub m: u8,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A hydrogen-suppressed chemical graph `G = (H, α, β)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChemicalGraph {
    labels: Vec<ElemId>,
    edges: Vec<Edge>,
    /// Per vertex: (neighbor, edge index).
    adj: Vec<Vec<(usize, usize)>>,
}

impl ChemicalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates an edgeless graph with the given vertex labels.
    pub fn with_labels(labels: Vec<ElemId>) -> Self {
        let adj = vec![Vec::new(); labels.len()];
        ChemicalGraph {
            labels,
            edges: Vec::new(),
            adj,
        }
    }

    pub fn add_vertex(&mut self, label: ElemId) -> usize {
        self.labels.push(label);
        self.adj.push(Vec::new());
        self.labels.len() - 1
    }

    /// Adds edge `{u, v}` with multiplicity `m`; returns its index.
    pub fn add_edge(&mut self, u: usize, v: usize, m: u8) -> Result<usize, ChemError> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(ChemError::VertexOutOfRange { u, v, n });
        }
        if u == v {
            return Err(ChemError::SelfLoop(u));
        }
        if !(1..=3).contains(&m) {
            return Err(ChemError::Multiplicity(m as i64));
        }
        let idx = self.edges.len();
        self.edges.push(Edge { u, v, m });
        self.adj[u].push((v, idx));
        self.adj[v].push((u, idx));
        Ok(idx)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ElemId] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> ElemId {
        self.labels[v]
    }

    pub fn set_label(&mut self, v: usize, a: ElemId) {
        self.labels[v] = a;
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn set_multiplicity(&mut self, i: usize, m: u8) {
        self.edges[i].m = m;
    }

    /// Neighbors of `v` as `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// β(v): sum of multiplicities of edges incident to `v`.
    pub fn bond_sum(&self, v: usize) -> u32 {
        self.adj[v].iter().map(|&(_, e)| self.edges[e].m as u32).sum()
    }

    /// Multiplicity of edge `{u, v}` if present.
    pub fn multiplicity(&self, u: usize, v: usize) -> Option<u8> {
        self.adj[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| self.edges[e].m)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return false;
        }
        self.bfs_dist(0).iter().all(|d| d.is_some())
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.edges.len() + 1 == self.n() && self.is_connected()
    }

    /// Breadth-first distances from `s`.
    pub fn bfs_dist(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut q = VecDeque::new();
        dist[s] = Some(0);
        q.push_back(s);
        while let Some(x) = q.pop_front() {
            let dx = dist[x].unwrap();
            for &(y, _) in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Returns the graph with vertices renumbered so that old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> ChemicalGraph {
        let mut labels = vec![0; self.n()];
        for v in 0..self.n() {
            labels[perm[v]] = self.labels[v];
        }
        let mut g = ChemicalGraph::with_labels(labels);
        for e in &self.edges {
            g.add_edge(perm[e.u], perm[e.v], e.m)
                .expect("permutation keeps edges valid");
        }
        g
    }

    /// Canonical adjacency configuration of edge `i`.
    pub fn gamma_of(&self, i: usize) -> Gamma {
        let e = self.edges[i];
        Gamma::new(self.labels[e.u], self.labels[e.v], e.m)
    }
}

/// One violated validity condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    Disconnected,
    Cyclic,
    ValenceOverflow { vertex: usize, bond_sum: u32, val: u8 },
    TupleNotInGamma { edge: usize },
}

/// Report produced by [`validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks connectivity, acyclicity, valence and Γ membership.
pub fn validate(g: &ChemicalGraph, alphabet: &ChemicalAlphabet) -> ValidityReport {
    let mut violations = Vec::new();
    if g.n() == 0 {
        violations.push(Violation::Empty);
        return ValidityReport { violations };
    }
    let connected = g.is_connected();
    if !connected {
        violations.push(Violation::Disconnected);
    }
    if !connected || g.edges().len() + 1 != g.n() {
        // a forest with c components has n - c edges
        let comps = components(g);
        if g.edges().len() + comps > g.n() {
            violations.push(Violation::Cyclic);
        }
    }
    for v in 0..g.n() {
        let s = g.bond_sum(v);
        let val = alphabet.val(g.label(v));
        if s > val as u32 {
            violations.push(Violation::ValenceOverflow {
                vertex: v,
                bond_sum: s,
                val,
            });
        }
    }
    for i in 0..g.edges().len() {
        if alphabet.gamma_pos(&g.gamma_of(i)).is_none() {
            violations.push(Violation::TupleNotInGamma { edge: i });
        }
    }
    ValidityReport { violations }
}

fn components(g: &ChemicalGraph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut c = 0;
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        c += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &(y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    c
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses a single graph in the line-oriented text format.
pub fn parse_graph(text: &str, alphabet: &ChemicalAlphabet) -> Result<ChemicalGraph, ChemError> {
    let mut graphs = parse_graphs(text, alphabet)?;
    match graphs.len() {
        1 => Ok(graphs.pop().unwrap()),
        0 => Err(ChemError::Syntax {
            line: 1,
            msg: "no graph found".into(),
        }),
        k => Err(ChemError::Syntax {
            line: 1,
            msg: format!("expected one graph, found {k}"),
        }),
    }
}

/// Parses a file holding blank-line separated graphs.
pub fn parse_graphs(text: &str, alphabet: &ChemicalAlphabet) -> Result<Vec<ChemicalGraph>, ChemError> {
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut cur: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            if !cur.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let line = strip_comment(raw).trim();
        if !line.is_empty() {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        blocks.push(cur);
    }
    blocks.iter().map(|b| parse_block(b, alphabet)).collect()
}

fn parse_block(lines: &[(usize, &str)], alphabet: &ChemicalAlphabet) -> Result<ChemicalGraph, ChemError> {
    let syntax = |line: usize, msg: String| ChemError::Syntax { line, msg };
    let (l0, first) = lines[0];
    let n: usize = first
        .parse()
        .map_err(|_| syntax(l0, format!("expected vertex count, got '{first}'")))?;
    let mut labels = Vec::with_capacity(n);
    let mut rest = &lines[1..];
    if n > 0 {
        let (l1, syms) = *rest.first().ok_or_else(|| syntax(l0, "missing element line".into()))?;
        for s in syms.split_whitespace() {
            let id = alphabet.id(s).ok_or_else(|| ChemError::UnknownElementAt {
                line: l1,
                symbol: s.to_string(),
            })?;
            labels.push(id);
        }
        if labels.len() != n {
            return Err(syntax(
                l1,
                format!("expected {n} element symbols, got {}", labels.len()),
            ));
        }
        rest = &rest[1..];
    }
    let mut g = ChemicalGraph::with_labels(labels);
    for &(ln, line) in rest {
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 3 {
            return Err(syntax(ln, format!("expected 'u v m', got '{line}'")));
        }
        let parse_i = |s: &str| -> Result<i64, ChemError> {
            s.parse::<i64>()
                .map_err(|_| syntax(ln, format!("not an integer: '{s}'")))
        };
        let (u, v, m) = (parse_i(nums[0])?, parse_i(nums[1])?, parse_i(nums[2])?);
        if !(1..=3).contains(&m) {
            return Err(ChemError::MultiplicityAt { line: ln, m });
        }
        if u < 1 || v < 1 || u as usize > n || v as usize > n {
            return Err(syntax(ln, format!("vertex index out of range 1..{n}")));
        }
        g.add_edge(u as usize - 1, v as usize - 1, m as u8)
            .map_err(|e| syntax(ln, e.to_string()))?;
    }
    Ok(g)
}

/// Renders a graph in the text format.
pub fn format_graph(g: &ChemicalGraph, alphabet: &ChemicalAlphabet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", g.n());
    let syms: Vec<&str> = g.labels().iter().map(|&a| alphabet.symbol(a)).collect();
    let _ = writeln!(s, "{}", syms.join(" "));
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u + 1, e.v + 1, e.m);
    }
    s
}
