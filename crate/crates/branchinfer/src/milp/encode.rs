//! Embedding a graph into the scheme graph, and reading a graph back from
//! a solution.

use std::collections::HashMap;

use super::model::{Assignment, MilpModel};
use super::relu::{relu_values, ReluVars};
use super::scheme::{names, SchemeGraph, Slot, TargetSpec};
use super::MilpError;
use crate::ann::NeuralNet;
use crate::chemgraph::{
    branch_decomposition, diameter_and_center, validate, BondConfig, Center, ChemicalGraph, RootedTree,
};
use crate::descriptors::feature_vector;

/// Placement of the graph's vertices at scheme-graph positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    /// `pos[v] = (p, i)`: vertex `v` sits at vertex `i` of fringe template `p`.
    pub pos: Vec<(usize, usize)>,
    /// Color of each used link-path vertex `v_t`, index `t − 1`.
    pub link_color: Vec<usize>,
}

fn outside(msg: impl Into<String>) -> MilpError {
    MilpError::OutsideClass(msg.into())
}

/// Checks that `g` belongs to the class described by `spec` and places it
/// into the scheme graph.
pub fn embed(g: &ChemicalGraph, sg: &SchemeGraph, spec: &TargetSpec) -> Result<Embedding, MilpError> {
    let al = &spec.alphabet;
    let k = spec.k_star;
    if !validate(g, al).is_valid() {
        return Err(outside("graph is not a valid chemical tree over the alphabet"));
    }
    if g.n() != spec.n_star {
        return Err(outside(format!("n = {} but n* = {}", g.n(), spec.n_star)));
    }
    let dmax = g.max_degree();
    if dmax > spec.d_max || (spec.d_max == 4 && dmax < 4) {
        return Err(outside(format!(
            "maximum degree {dmax} does not match d_max = {}",
            spec.d_max
        )));
    }
    let fv = feature_vector(g, k, al)?;
    if fv.dia != spec.dia_star || fv.bl != spec.bl_star || fv.bh != spec.bh_star {
        return Err(outside(format!(
            "(dia, bl, bh) = ({}, {}, {}) differs from the target ({}, {}, {})",
            fv.dia, fv.bl, fv.bh, spec.dia_star, spec.bl_star, spec.bh_star
        )));
    }
    if fv.dia < 2 * k + 2 {
        return Err(outside(format!("diameter {} below 2k* + 2", fv.dia)));
    }
    let dec = branch_decomposition(g, k)?;
    if let Some(&i) = dec.oversized_fringe_trees().first() {
        return Err(MilpError::FringeTooLarge {
            fringe: dec.fringe_trees[i].n(),
            root: dec.fringe_trees[i].root,
        });
    }
    let (dia, center) = diameter_and_center(g)?;
    let is_branching = |rt: &RootedTree, v: usize| rt.children[v].iter().filter(|&&c| rt.height[c] >= k).count() >= 2;
    let (root, rt) = match center {
        Center::Vertex(c) => (c, RootedTree::new(g, &[c])?),
        Center::Pair(a, b) => {
            let ra = RootedTree::new(g, &[a])?;
            if !is_branching(&ra, b) {
                (a, ra)
            } else {
                let rb = RootedTree::new(g, &[b])?;
                if is_branching(&rb, a) {
                    return Err(outside("both center vertices are branching"));
                }
                (b, rb)
            }
        }
    };
    let n = g.n();
    let branch: Vec<bool> = (0..n)
        .map(|v| !rt.is_root(v) && (rt.height[v] == k || is_branching(&rt, v)))
        .collect();
    let mut inner = vec![false; n];
    for v in 0..n {
        if !rt.is_root(v) && rt.height[v] == k {
            let mut x = v;
            while !inner[x] {
                inner[x] = true;
                match rt.parent[x] {
                    Some(p) => x = p,
                    None => break,
                }
            }
        }
    }
    inner[root] = true;
    // branch parent and link vertices (parent side first) of every branch
    let mut bparent = vec![usize::MAX; n];
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut bchildren: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if !branch[v] {
            continue;
        }
        let mut x = rt.parent[v].unwrap();
        let mut path = Vec::new();
        while x != root && !branch[x] {
            path.push(x);
            x = rt.parent[x].unwrap();
        }
        path.reverse();
        bparent[v] = x;
        links[v] = path;
        bchildren[x].push(v);
    }
    let reach = |v: usize| rt.depth[v] + rt.height[v];
    let left_target = dia.div_ceil(2);
    let right_target = dia / 2;
    let mut bpos = vec![0usize; n];
    bpos[root] = 1;
    // (branch vertex, template index, side: 0 free, 1 left path, 2 right path)
    let mut stack = vec![(root, 1usize, 0u8)];
    while let Some((b, s, side)) = stack.pop() {
        let slots = &sg.base.cld[s];
        let mut kids = bchildren[b].clone();
        if kids.len() > slots.len() {
            return Err(outside(format!("branch vertex {b} has {} branch children", kids.len())));
        }
        if !kids.is_empty() && sg.base.depth[s] == sg.bh_star {
            return Err(outside("branch tree deeper than bh*"));
        }
        let mut placed: Vec<(usize, usize, u8)> = Vec::new();
        let take = |kids: &mut Vec<usize>, want: Option<usize>| -> Option<usize> {
            let i = match want {
                Some(r) => kids.iter().position(|&c| reach(c) == r)?,
                None => (0..kids.len()).max_by_key(|&i| (reach(kids[i]), std::cmp::Reverse(i)))?,
            };
            Some(kids.remove(i))
        };
        let mut free_slots: Vec<usize> = slots.clone();
        if s == 1 {
            let l = take(&mut kids, Some(left_target)).ok_or_else(|| outside("no branch reaches the left end"))?;
            let r = take(&mut kids, Some(right_target)).ok_or_else(|| outside("no branch reaches the right end"))?;
            placed.push((l, free_slots.remove(0), 1));
            placed.push((r, free_slots.pop().unwrap(), 2));
        } else if side == 1 && !kids.is_empty() {
            let c = take(&mut kids, None).unwrap();
            placed.push((c, free_slots.remove(0), 1));
        } else if side == 2 && !kids.is_empty() {
            let c = take(&mut kids, None).unwrap();
            placed.push((c, free_slots.pop().unwrap(), 2));
        }
        for (c, slot) in kids.into_iter().zip(free_slots) {
            placed.push((c, slot, 0));
        }
        for (c, slot, sd) in placed {
            bpos[c] = slot;
            stack.push((c, slot, sd));
        }
    }
    if dia % 2 == 1 && links[rt_first_on(&bchildren[root], &bpos, 2)].is_empty() {
        return Err(outside("center partner is a branch vertex"));
    }
    // link path: segments ordered by decreasing color
    let mut segs: Vec<(usize, Vec<usize>)> = (0..n)
        .filter(|&v| branch[v] && !links[v].is_empty())
        .map(|v| (bpos[v] - 1, links[v].clone()))
        .collect();
    segs.sort_by_key(|s| std::cmp::Reverse(s.0));
    let total: usize = segs.iter().map(|s| s.1.len()).sum();
    if total > sg.t_star {
        return Err(outside(format!("{total} link vertices exceed t* = {}", sg.t_star)));
    }
    let mut pos = vec![(0usize, 0usize); n];
    let mut link_color = Vec::new();
    for v in 0..n {
        if v == root || branch[v] {
            pos[v] = (bpos[v], 1);
        }
    }
    for (c, path) in &segs {
        for &x in path {
            link_color.push(*c);
            pos[x] = (sg.s_star + link_color.len(), 1);
        }
    }
    // fringe trees, children filling template children in order
    for v in 0..n {
        if !inner[v] {
            continue;
        }
        let p = pos[v].0;
        let tpl = sg.template(p);
        let mut stack = vec![(v, 1usize)];
        while let Some((x, j)) = stack.pop() {
            let kids: Vec<usize> = rt.children[x].iter().copied().filter(|&c| !inner[c]).collect();
            if kids.len() > tpl.cld[j].len() {
                return Err(outside(format!("vertex {x} has too many fringe children")));
            }
            for (c, &slot) in kids.into_iter().zip(&tpl.cld[j]) {
                pos[c] = (p, slot);
                stack.push((c, slot));
            }
        }
    }
    Ok(Embedding { pos, link_color })
}

/// The branch child of the root placed at the first template child.
fn rt_first_on(kids: &[usize], bpos: &[usize], slot: usize) -> usize {
    *kids.iter().find(|&&c| bpos[c] == slot).expect("left child placed")
}

/// Assignment of every structural variable for `g`, including descriptor
/// variables summed over the slots.
pub fn encode_graph(g: &ChemicalGraph, sg: &SchemeGraph, spec: &TargetSpec) -> Result<Assignment, MilpError> {
    let emb = embed(g, sg, spec)?;
    Ok(structure_values(g, sg, spec, &emb))
}

/// Structural assignment plus the network block evaluated on `f(g)`.
pub fn encode_full(
    g: &ChemicalGraph,
    spec: &TargetSpec,
    model: &MilpModel,
    sg: &SchemeGraph,
    relu: &ReluVars,
    net: &NeuralNet,
) -> Result<Assignment, MilpError> {
    let mut asg = encode_graph(g, sg, spec)?;
    let x = feature_vector(g, spec.k_star, &spec.alphabet)?.to_f64();
    for (name, v) in relu_values(model, relu, net, &x)? {
        asg.set(name, v);
    }
    Ok(asg)
}

fn structure_values(g: &ChemicalGraph, sg: &SchemeGraph, spec: &TargetSpec, emb: &Embedding) -> Assignment {
    let al = &spec.alphabet;
    let mut asg = Assignment::new();
    let at: HashMap<(usize, usize), usize> = emb.pos.iter().enumerate().map(|(v, &p)| (p, v)).collect();
    let set = |asg: &mut Assignment, name: String, v: i64| {
        if v != 0 {
            asg.set(name, v);
        }
    };
    let code = |p: (usize, usize)| at.get(&p).map_or(0, |&v| al.code(g.label(v)));
    let deg = |p: (usize, usize)| at.get(&p).map_or(0, |&v| g.degree(v));
    for (p, i) in sg.positions() {
        let occ = at.contains_key(&(p, i));
        set(&mut asg, sg.vert(p, i), occ as i64);
        let c = code((p, i));
        set(&mut asg, names::alpha(p, i), c as i64);
        set(&mut asg, names::dalpha(p, i, c), 1);
        let d = deg((p, i));
        set(&mut asg, names::deg(p, i), d as i64);
        set(&mut asg, names::ddeg(p, i, d), 1);
    }
    for (t, &c) in emb.link_color.iter().enumerate() {
        let t = t + 1;
        set(&mut asg, names::chi(t), c as i64);
        set(&mut asg, names::dclr(t, c), 1);
    }
    for t in emb.link_color.len() + 1..=sg.t_star {
        set(&mut asg, names::dclr(t, 0), 1);
    }
    for c in 0..=sg.c_star {
        let cnt = emb.link_color.iter().filter(|&&x| x == c).count()
            + if c == 0 { sg.t_star - emb.link_color.len() } else { 0 };
        set(&mut asg, names::clr(c), cnt as i64);
    }
    let side = |internal: bool| if internal { "in" } else { "ex" };
    let mut counts: HashMap<String, i64> = HashMap::new();
    let mut bump = |name: String| *counts.entry(name).or_insert(0) += 1;
    for sl in sg.slots() {
        let (a, b) = sg.endpoints(&sl);
        let m = match (at.get(&a), at.get(&b)) {
            (Some(&x), Some(&y)) => g.multiplicity(x, y).unwrap_or(0),
            _ => 0,
        };
        if m > 0 {
            match sl {
                Slot::Cross(s, t) => {
                    let c = emb.link_color[t - 1];
                    if sg.tail[c] == s {
                        set(&mut asg, names::est(s, t), 1);
                    } else {
                        set(&mut asg, names::ets(t, s), 1);
                    }
                }
                _ => {
                    for n in sg.slot_used(&sl) {
                        set(&mut asg, n, 1);
                    }
                }
            }
        }
        set(&mut asg, names::beta(&sl), m as i64);
        set(&mut asg, names::dbeta(&sl, m), 1);
        let (ca, cb) = (code(a), code(b));
        set(&mut asg, names::tau(&sl, ca, cb, m), 1);
        let (da, db) = (deg(a) as u8, deg(b) as u8);
        set(&mut asg, names::dc(&sl, da, db, m), 1);
        if m > 0 {
            let sd = side(sl.internal());
            bump(names::bd(sd, m));
            let (x, y) = (at[&a], at[&b]);
            let (la, lb) = (g.label(x).min(g.label(y)), g.label(x).max(g.label(y)));
            bump(names::ac(sd, al.symbol(la), al.symbol(lb), m));
            let bc = BondConfig::new(da, db, m);
            bump(names::bc(sd, bc.d1, bc.d2, bc.m));
        }
    }
    for (&(_, i), &v) in &at {
        let sd = side(i == 1);
        bump(names::ce(sd, al.symbol(g.label(v))));
        bump(names::dg(sd, g.degree(v)));
    }
    let mut mass = 0i64;
    let mut val = 0i64;
    for &a in g.labels() {
        mass += al.mass10(a) as i64;
        val += al.val(a) as i64;
    }
    let beta: i64 = g.edges().iter().map(|e| e.m as i64).sum();
    for (name, c) in counts {
        set(&mut asg, name, c);
    }
    set(&mut asg, names::MASS.to_string(), mass);
    set(&mut asg, names::NH.to_string(), val - 2 * beta);
    // branch degrees and flags
    for s in 1..=sg.s_star {
        let get = |n: String| asg.get_i64(&n);
        let minus: i64 = sg.e_minus[s].iter().map(|&i| get(names::a(i))).sum::<i64>()
            + (1..=sg.t_star).map(|t| get(names::ets(t, s))).sum::<i64>();
        let plus: i64 = sg.e_plus[s].iter().map(|&i| get(names::a(i))).sum::<i64>()
            + (1..=sg.t_star).map(|t| get(names::est(s, t))).sum::<i64>();
        let kids = sg.base.cld[s].iter().map(|&c| get(names::u(c, 1))).sum::<i64>();
        let sigma = s == 1 || kids > 0;
        set(&mut asg, names::degbm(s), minus);
        set(&mut asg, names::degbp(s), plus);
        set(&mut asg, names::sigma(s), sigma as i64);
    }
    asg
}

/// Reads the graph encoded by a solution: used positions become vertices,
/// used slots become edges with multiplicity `β`.
pub fn decode_graph(asg: &Assignment, sg: &SchemeGraph, spec: &TargetSpec) -> Result<ChemicalGraph, MilpError> {
    let al = &spec.alphabet;
    let on = |n: &str| asg.get(n).to_f64() > 0.5;
    let mut g = ChemicalGraph::new();
    let mut id: HashMap<(usize, usize), usize> = HashMap::new();
    for (p, i) in sg.positions() {
        if !on(&sg.vert(p, i)) {
            continue;
        }
        let c = asg.get(&names::alpha(p, i)).round().as_i64().unwrap_or(0);
        if c < 1 || c as usize > al.len() {
            return Err(MilpError::Decode(format!(
                "vertex {} has element code {c}",
                sg.vert(p, i)
            )));
        }
        id.insert((p, i), g.add_vertex(c as usize - 1));
    }
    for sl in sg.slots() {
        let m = asg.get(&names::beta(&sl)).round().as_i64().unwrap_or(0);
        if m == 0 {
            continue;
        }
        let (a, b) = sg.endpoints(&sl);
        match (id.get(&a), id.get(&b)) {
            (Some(&x), Some(&y)) => {
                g.add_edge(x, y, m as u8)
                    .map_err(|e| MilpError::Decode(format!("slot {}: {e}", sl.key())))?;
            }
            _ => return Err(MilpError::Decode(format!("slot {} joins an unused vertex", sl.key()))),
        }
    }
    if !g.is_tree() {
        return Err(MilpError::Decode("decoded graph is not a tree".into()));
    }
    Ok(g)
}
