//! Variables and constraints of the structural model and the network block.

use std::collections::HashMap;

use super::bounds::{DescriptorBounds, Range};
use super::model::{Group, Lin, MilpModel, VarKind};
use super::num::Num;
use super::relu::{add_relu_block, add_target_window, ReluVars};
use super::scheme::{names, SchemeGraph, Slot, TargetSpec};
use super::MilpError;
use crate::ann::NeuralNet;
use crate::chemgraph::{BondConfig, ChemicalAlphabet};
use crate::descriptors::descriptor_names;

/// Tuples `(code a, code b, m)` an edge slot can take: every fictitious
/// tuple with `m = 0` and both orientations of each proper tuple.
pub fn tuple_domain(al: &ChemicalAlphabet) -> Vec<(u32, u32, u8)> {
    let na = al.len() as u32;
    let mut out = Vec::new();
    for ca in 0..=na {
        for cb in 0..=na {
            out.push((ca, cb, 0));
        }
    }
    for g in al.gamma() {
        let (ca, cb) = (al.code(g.a), al.code(g.b));
        out.push((ca, cb, g.m));
        if ca != cb {
            out.push((cb, ca, g.m));
        }
    }
    out
}

/// Degree configurations `(d, d′, m)` an edge slot can take: any degrees
/// with `m = 0`, otherwise positive degrees whose bond configuration is in Bc.
pub fn dc_domain(al: &ChemicalAlphabet, d_max: usize) -> Vec<(u8, u8, u8)> {
    let dm = d_max as u8;
    let mut out = Vec::new();
    for d in 0..=dm {
        for d2 in 0..=dm {
            out.push((d, d2, 0));
        }
    }
    for m in 1..=3u8 {
        for d in 1..=dm {
            for d2 in 1..=dm {
                if al.bc_pos(&BondConfig::new(d, d2, m)).is_some() {
                    out.push((d, d2, m));
                }
            }
        }
    }
    out
}

/// Descriptor-variable names in network-input order; `None` marks inputs
/// fixed by the spec (`n`, `dia_bar`, `bl`, `bh`) and `ms_bar`.
fn descriptor_var_names(al: &ChemicalAlphabet) -> Vec<Option<String>> {
    let mut v: Vec<Option<String>> = vec![None];
    for side in ["in", "ex"] {
        for d in 1..=4 {
            v.push(Some(names::dg(side, d)));
        }
    }
    v.extend([None, None, None]);
    for side in ["in", "ex"] {
        for e in al.elements() {
            v.push(Some(names::ce(side, &e.symbol)));
        }
    }
    v.push(None);
    for side in ["in", "ex"] {
        for m in 2..=3 {
            v.push(Some(names::bd(side, m)));
        }
    }
    for side in ["in", "ex"] {
        for g in al.gamma() {
            v.push(Some(names::ac(side, al.symbol(g.a), al.symbol(g.b), g.m)));
        }
    }
    for side in ["in", "ex"] {
        for b in al.bc() {
            v.push(Some(names::bc(side, b.d1, b.d2, b.m)));
        }
    }
    v.push(Some(names::NH.to_string()));
    v
}

/// Network inputs as linear expressions over the model's descriptor
/// variables, in descriptor-column order.
pub fn network_inputs(model: &MilpModel, spec: &TargetSpec) -> Vec<Lin> {
    let al = &spec.alphabet;
    let cols = descriptor_names(al);
    let vars = descriptor_var_names(al);
    debug_assert_eq!(cols.len(), vars.len());
    let n = spec.n_star as i64;
    cols.iter()
        .zip(vars)
        .map(|(col, var)| match (col.as_str(), var) {
            (_, Some(name)) => Lin::var(model.v(&name)),
            ("n", None) => Lin::constant(n),
            ("dia_bar", None) => Lin::constant(Num::from_rational(num_rational::BigRational::new(
                (spec.dia_star as i64).into(),
                n.into(),
            ))),
            ("bl", None) => Lin::constant(spec.bl_star as i64),
            ("bh", None) => Lin::constant(spec.bh_star as i64),
            ("ms_bar", None) => {
                let mut l = Lin::new();
                l.add_num(
                    model.v(names::MASS),
                    Num::from_rational(num_rational::BigRational::new(1.into(), n.into())),
                );
                l
            }
            (c, None) => unreachable!("column {c} without a variable"),
        })
        .collect()
}

/// Interval of each network input over the variable bounds tightened by the
/// descriptor box.
fn input_boxes(model: &MilpModel, inputs: &[Lin], ad: &HashMap<usize, Range>) -> Vec<(f64, f64)> {
    inputs
        .iter()
        .map(|l| {
            let c = l.constant.to_f64();
            let (mut lo, mut hi) = (c, c);
            for (v, k) in &l.terms {
                let var = model.var(*v);
                let (mut a, mut b) = (var.lb.to_f64(), var.ub.to_f64());
                if let Some(&(l2, u2)) = ad.get(v) {
                    a = a.max(l2 as f64);
                    b = b.min(u2 as f64);
                }
                let k = k.to_f64();
                if k >= 0.0 {
                    lo += k * a;
                    hi += k * b;
                } else {
                    lo += k * b;
                    hi += k * a;
                }
            }
            (lo, hi)
        })
        .collect()
}

struct Builder<'a> {
    m: MilpModel,
    sg: &'a SchemeGraph,
    spec: &'a TargetSpec,
    tuples: Vec<(u32, u32, u8)>,
    dcs: Vec<(u8, u8, u8)>,
    slots: Vec<Slot>,
    /// Descriptor box per descriptor variable.
    ad: HashMap<usize, Range>,
}

impl<'a> Builder<'a> {
    fn x(&self, name: &str) -> usize {
        self.m.v(name)
    }

    fn lx(&self, name: &str) -> Lin {
        Lin::var(self.x(name))
    }

    fn sum(&self, names: impl IntoIterator<Item = String>) -> Lin {
        Lin::sum(names.into_iter().map(|n| self.x(&n)))
    }

    fn declare(&mut self) {
        let sg = self.sg;
        let (ss, ts, cs) = (sg.s_star, sg.t_star, sg.c_star);
        let na = self.spec.alphabet.len() as i64;
        let dmax = sg.d_max as i64;
        let n = self.spec.n_star as i64;
        let m = &mut self.m;
        for i in 1..=cs {
            m.binary(names::a(i));
        }
        for s in 1..=ss {
            for t in 1..=ts {
                m.binary(names::est(s, t));
                m.binary(names::ets(t, s));
            }
        }
        for t in 1..=ts {
            m.integer(names::chi(t), 0, cs as i64);
            for c in 0..=cs {
                m.binary(names::dclr(t, c));
            }
        }
        for c in 0..=cs {
            m.integer(names::clr(c), 0, ts as i64);
        }
        for s in 1..=ss {
            m.integer(names::degbp(s), 0, dmax);
            m.integer(names::degbm(s), 0, dmax);
            m.binary(names::sigma(s));
        }
        for (p, i) in sg.positions() {
            m.binary(sg.vert(p, i));
        }
        for t in 2..=ts {
            m.binary(names::e(t));
        }
        for (p, i) in sg.positions() {
            m.integer(names::alpha(p, i), 0, na);
            for c in 0..=na as u32 {
                m.binary(names::dalpha(p, i, c));
            }
        }
        for sl in &self.slots {
            m.integer(names::beta(sl), 0, 3);
            for q in 0..=3 {
                m.binary(names::dbeta(sl, q));
            }
            for &(ca, cb, q) in &self.tuples {
                m.binary(names::tau(sl, ca, cb, q));
            }
            for &(d, d2, q) in &self.dcs {
                m.binary(names::dc(sl, d, d2, q));
            }
        }
        for (p, i) in sg.positions() {
            m.integer(names::deg(p, i), 0, dmax);
            for d in 0..=sg.d_max {
                m.binary(names::ddeg(p, i, d));
            }
        }
        let al = &self.spec.alphabet;
        for side in ["in", "ex"] {
            for d in 1..=4 {
                m.integer(names::dg(side, d), 0, n);
            }
            for e in al.elements() {
                m.integer(names::ce(side, &e.symbol), 0, n);
            }
            for q in 1..=3 {
                m.integer(names::bd(side, q), 0, n);
            }
            for g in al.gamma() {
                m.integer(names::ac(side, al.symbol(g.a), al.symbol(g.b), g.m), 0, n);
            }
            for b in al.bc() {
                m.integer(names::bc(side, b.d1, b.d2, b.m), 0, n);
            }
        }
        let masses: Vec<i64> = (0..al.len()).map(|a| al.mass10(a) as i64).collect();
        let lo = n * masses.iter().copied().min().unwrap_or(0);
        let hi = n * masses.iter().copied().max().unwrap_or(0);
        m.add_var(names::MASS, VarKind::Integer, lo, hi);
        m.integer(names::NH, 0, 4 * n);
    }

    /// Colors on the link path and branch degrees.
    fn sg_group(&mut self) {
        let sg = self.sg;
        let (ss, ts, cs) = (sg.s_star, sg.t_star, sg.c_star);
        for t in 1..=ts {
            let one = self.sum((0..=cs).map(|c| names::dclr(t, c)));
            self.m.eq(Group::SG, "clr1", one, Lin::constant(1));
            let mut w = Lin::new();
            for c in 1..=cs {
                w.add(self.x(&names::dclr(t, c)), c as i64);
            }
            let chi = self.lx(&names::chi(t));
            self.m.eq(Group::SG, "chi", w, chi);
        }
        for c in 0..=cs {
            let s = self.sum((1..=ts).map(|t| names::dclr(t, c)));
            let clr = self.lx(&names::clr(c));
            self.m.eq(Group::SG, "clrcount", s, clr);
        }
        for i in 1..=cs {
            let l = self.lx(&names::clr(i)).with(self.x(&names::a(i)), ts as i64);
            self.m.le(Group::SG, "clra", l, Lin::constant(ts as i64));
        }
        for s in 1..=ss {
            for t in 1..=ts {
                let l = self.sum([names::est(s, t), names::ets(t, s)]);
                self.m.le(Group::SG, "dir", l, Lin::constant(1));
            }
        }
        for c in 1..=cs {
            for t in 1..=ts {
                let dc = self.x(&names::dclr(t, c));
                let out = self
                    .sum((1..=ss).filter(|&s| s != sg.head[c]).map(|s| names::ets(t, s)))
                    .with(dc, 1);
                self.m.le(Group::SG, "head", out, Lin::constant(1));
                let inn = self
                    .sum((1..=ss).filter(|&s| s != sg.tail[c]).map(|s| names::est(s, t)))
                    .with(dc, 1);
                self.m.le(Group::SG, "tail", inn, Lin::constant(1));
            }
        }
        for s in 1..=ss {
            let mut minus = self.sum(sg.e_minus[s].iter().map(|&i| names::a(i)));
            minus.add_lin(&self.sum((1..=ts).map(|t| names::ets(t, s))), &Num::one());
            let bm = self.lx(&names::degbm(s));
            self.m.eq(Group::SG, "degbm", minus, bm);
            let mut plus = self.sum(sg.e_plus[s].iter().map(|&i| names::a(i)));
            plus.add_lin(&self.sum((1..=ts).map(|t| names::est(s, t))), &Num::one());
            let bp = self.lx(&names::degbp(s));
            self.m.eq(Group::SG, "degbp", plus, bp);
            let both = self.sum([names::degbm(s), names::degbp(s)]);
            self.m.le(Group::SG, "degb", both, Lin::constant(sg.d_max as i64));
        }
    }

    /// Selection of the subgraph.
    fn ss_group(&mut self) {
        let sg = self.sg;
        let spec = self.spec;
        let (ss, ts, cs) = (sg.s_star, sg.t_star, sg.c_star);
        for p in 1..=sg.n_positions() {
            let tpl = sg.template(p);
            for &(i, j) in &tpl.p_prc {
                let (a, b) = (self.lx(&sg.vert(p, i)), self.lx(&sg.vert(p, j)));
                self.m.ge(Group::SS, "prc", a, b);
            }
        }
        let all = self.sum(sg.positions().into_iter().map(|(p, i)| sg.vert(p, i)));
        self.m.eq(Group::SS, "size", all, Lin::constant(spec.n_star as i64));
        for p in 1..=sg.n_positions() {
            let tpl = sg.template(p);
            let total = self.sum((1..=tpl.n).map(|i| sg.vert(p, i)));
            let mut rhs = Lin::constant(2);
            rhs.add_lin(&self.sum(tpl.cld[1].iter().map(|&j| sg.vert(p, j))), &Num::Int(2));
            self.m.le(Group::SS, "fringe", total, rhs);
        }
        for t in 1..=ts {
            let vt = self.lx(&names::v(t, 1));
            let mut out = self.sum((1..=ss).map(|s| names::ets(t, s)));
            if t < ts {
                out.add(self.x(&names::e(t + 1)), 1);
            }
            self.m.eq(Group::SS, "chiout", out, vt.clone());
            let mut inn = self.sum((1..=ss).map(|s| names::est(s, t)));
            if t > 1 {
                inn.add(self.x(&names::e(t)), 1);
            }
            self.m.eq(Group::SS, "chiin", inn, vt.clone());
            let colored = self.sum((1..=cs).map(|c| names::dclr(t, c)));
            self.m.eq(Group::SS, "chiused", colored, vt);
        }
        for t in 1..ts {
            let (c0, c1) = (self.x(&names::chi(t)), self.x(&names::chi(t + 1)));
            let e1 = self.x(&names::e(t + 1));
            let diff = Lin::var(c0).with(c1, -1);
            self.m.le(
                Group::SS,
                "chidec",
                diff.clone().with(e1, cs as i64),
                Lin::constant(cs as i64),
            );
            let rhs = self.lx(&names::v(t, 1)).with(e1, -1);
            self.m.ge(Group::SS, "chistep", diff, rhs);
        }
        for i in 1..=cs {
            let l = self
                .sum((1..=ts).map(|t| names::ets(t, sg.head[i])))
                .with(self.x(&names::a(i)), 1);
            let u = self.lx(&names::u(sg.head[i], 1));
            self.m.eq(Group::SS, "reach", l, u);
            let (h, t) = (self.lx(&names::u(sg.head[i], 1)), self.lx(&names::u(sg.tail[i], 1)));
            self.m.le(Group::SS, "tree", h, t);
        }
        let (sig1, u11) = (self.lx(&names::sigma(1)), self.lx(&names::u(1, 1)));
        self.m.eq(Group::SS, "root", sig1, Lin::constant(1));
        self.m.eq(Group::SS, "root", u11, Lin::constant(1));
        for s in 1..=ss {
            let (sig, us) = (self.lx(&names::sigma(s)), self.lx(&names::u(s, 1)));
            self.m.le(Group::SS, "sigma", sig, us);
        }
        let dm1 = sg.d_max as i64 - 1;
        let deepest = sg.s_tree.at_depth(sg.k_star);
        for s in 2..=ss {
            let kids = self.sum(sg.base.cld[s].iter().map(|&c| names::u(c, 1)));
            let sig = self.x(&names::sigma(s));
            self.m.le(Group::SS, "brmax", kids.clone(), Lin::new().with(sig, dm1));
            self.m.ge(Group::SS, "brmin", kids, Lin::new().with(sig, 2));
            let deep = self.sum(deepest.iter().map(|&i| names::u(s, i)));
            let rhs = self.lx(&names::u(s, 1)).with(sig, -1);
            self.m.ge(Group::SS, "leafk", deep, rhs);
        }
        let mut leaves = Lin::new();
        for s in 2..=ss {
            leaves.add(self.x(&names::u(s, 1)), 1);
            leaves.add(self.x(&names::sigma(s)), -1);
        }
        self.m.eq(Group::SS, "bl", leaves, Lin::constant(spec.bl_star as i64));
        let deepest_b = self.sum(sg.v_depth[sg.bh_star].iter().map(|&s| names::u(s, 1)));
        self.m.ge(Group::SS, "bh", deepest_b, Lin::constant(1));
        let dia = spec.dia_star;
        for &s in &sg.leaves {
            let mut l = self.sum(sg.path_vertices[s].iter().map(|&x| names::u(x, 1)));
            l.add_lin(&self.sum(sg.path_edges[s].iter().map(|&i| names::clr(i))), &Num::one());
            let rhs = Lin::constant(sg.leaf_distance_bound(s, dia));
            if s == sg.s_left {
                let want = Lin::constant(dia.div_ceil(2) as i64 - sg.k_star as i64);
                self.m.eq(Group::SS, "left", l, want);
            } else if s == sg.s_right {
                let want = Lin::constant((dia / 2) as i64 - sg.k_star as i64);
                self.m.eq(Group::SS, "right", l, want);
            } else {
                self.m.le(Group::SS, "reachmax", l, rhs);
            }
        }
        if dia % 2 == 1 {
            let a1 = self.lx(&names::a(1));
            self.m.eq(Group::SS, "oddcenter", a1, Lin::constant(0));
        }
    }

    /// Multiplicities bounded by edge use.
    fn am_group(&mut self) {
        for sl in self.slots.clone() {
            let used = self.sum(self.sg.slot_used(&sl));
            let b = self.lx(&names::beta(&sl));
            self.m.le(Group::AM, "lo", used.clone(), b.clone());
            let mut three = Lin::new();
            three.add_lin(&used, &Num::Int(3));
            self.m.le(Group::AM, "hi", b, three);
        }
    }

    /// Slots incident to each position.
    fn incidence(&self) -> HashMap<(usize, usize), Vec<Slot>> {
        let mut inc: HashMap<(usize, usize), Vec<Slot>> = HashMap::new();
        for sl in &self.slots {
            let (a, b) = self.sg.endpoints(sl);
            inc.entry(a).or_default().push(*sl);
            inc.entry(b).or_default().push(*sl);
        }
        inc
    }

    /// Element assignment, multiplicity indicators and valence.
    fn ae_group(&mut self, inc: &HashMap<(usize, usize), Vec<Slot>>) {
        let sg = self.sg;
        let al = &self.spec.alphabet;
        let na = al.len() as u32;
        for (p, i) in sg.positions() {
            let one = self.sum((0..=na).map(|c| names::dalpha(p, i, c)));
            self.m.eq(Group::AE, "alpha1", one, Lin::constant(1));
            let mut w = Lin::new();
            for c in 1..=na {
                w.add(self.x(&names::dalpha(p, i, c)), c as i64);
            }
            let a = self.lx(&names::alpha(p, i));
            self.m.eq(Group::AE, "alpha", w, a);
            let eps = self.lx(&names::dalpha(p, i, 0)).with(self.x(&sg.vert(p, i)), 1);
            self.m.eq(Group::AE, "eps", eps, Lin::constant(1));
        }
        for sl in self.slots.clone() {
            let one = self.sum((0..=3).map(|q| names::dbeta(&sl, q)));
            self.m.eq(Group::AE, "beta1", one, Lin::constant(1));
            let mut w = Lin::new();
            for q in 1..=3u8 {
                w.add(self.x(&names::dbeta(&sl, q)), q as i64);
            }
            let b = self.lx(&names::beta(&sl));
            self.m.eq(Group::AE, "beta", w, b);
        }
        for (p, i) in sg.positions() {
            let bsum = self.sum(inc.get(&(p, i)).into_iter().flatten().map(names::beta));
            let mut cap = Lin::new();
            for a in 0..al.len() {
                cap.add(self.x(&names::dalpha(p, i, al.code(a))), al.val(a) as i64);
            }
            self.m.le(Group::AE, "val", bsum, cap);
        }
    }

    /// Element counts, mass, bond counts and hydrogens.
    fn ne_group(&mut self) {
        let sg = self.sg;
        let al = &self.spec.alphabet;
        for a in 0..al.len() {
            let code = al.code(a);
            let sym = al.symbol(a);
            let inn = self.sum((1..=sg.n_positions()).map(|p| names::dalpha(p, 1, code)));
            let ci = self.lx(&names::ce("in", sym));
            self.m.eq(Group::NE, "cein", inn, ci);
            let ex = self
                .sum((1..=sg.n_positions()).flat_map(|p| (2..=sg.size_at(p)).map(move |i| names::dalpha(p, i, code))));
            let ce = self.lx(&names::ce("ex", sym));
            self.m.eq(Group::NE, "ceex", ex, ce);
        }
        let mut mass = Lin::new();
        for a in 0..al.len() {
            let w = al.mass10(a) as i64;
            mass.add(self.x(&names::ce("in", al.symbol(a))), w);
            mass.add(self.x(&names::ce("ex", al.symbol(a))), w);
        }
        let mv = self.lx(names::MASS);
        self.m.eq(Group::NE, "mass", mass, mv);
        for q in 1..=3u8 {
            let inn = self.sum(self.slots.iter().filter(|s| s.internal()).map(|s| names::dbeta(s, q)));
            let bi = self.lx(&names::bd("in", q));
            self.m.eq(Group::NE, "bdin", inn, bi);
            let ex = self.sum(self.slots.iter().filter(|s| !s.internal()).map(|s| names::dbeta(s, q)));
            let be = self.lx(&names::bd("ex", q));
            self.m.eq(Group::NE, "bdex", ex, be);
        }
        let mut h = Lin::new();
        for a in 0..al.len() {
            let w = al.val(a) as i64;
            h.add(self.x(&names::ce("in", al.symbol(a))), w);
            h.add(self.x(&names::ce("ex", al.symbol(a))), w);
        }
        for side in ["in", "ex"] {
            h.add(self.x(&names::bd(side, 2)), -2);
            h.add(self.x(&names::bd(side, 3)), -4);
        }
        h.add_const(-2 * (self.spec.n_star as i64 - 1));
        let nh = self.lx(names::NH);
        self.m.eq(Group::NE, "nh", h, nh);
    }

    /// Degrees and degree counts.
    fn nd_group(&mut self, inc: &HashMap<(usize, usize), Vec<Slot>>) {
        let sg = self.sg;
        for (p, i) in sg.positions() {
            let mut used = Lin::new();
            for sl in inc.get(&(p, i)).into_iter().flatten() {
                used.add_lin(&self.sum(sg.slot_used(sl)), &Num::one());
            }
            let d = self.lx(&names::deg(p, i));
            self.m.eq(Group::ND, "deg", used, d.clone());
            let one = self.sum((0..=sg.d_max).map(|x| names::ddeg(p, i, x)));
            self.m.eq(Group::ND, "deg1", one, Lin::constant(1));
            let mut w = Lin::new();
            for x in 1..=sg.d_max {
                w.add(self.x(&names::ddeg(p, i, x)), x as i64);
            }
            self.m.eq(Group::ND, "degv", w, d);
        }
        for x in 1..=4 {
            let inn = self.sum(
                (1..=sg.n_positions())
                    .filter(|_| x <= sg.d_max)
                    .map(|p| names::ddeg(p, 1, x)),
            );
            let di = self.lx(&names::dg("in", x));
            self.m.eq(Group::ND, "dgin", inn, di);
            let ex = self.sum(
                (1..=sg.n_positions())
                    .filter(|_| x <= sg.d_max)
                    .flat_map(|p| (2..=sg.size_at(p)).map(move |i| names::ddeg(p, i, x))),
            );
            let de = self.lx(&names::dg("ex", x));
            self.m.eq(Group::ND, "dgex", ex, de);
        }
        let four = self.sum([names::dg("in", 4), names::dg("ex", 4)]);
        if sg.d_max == 4 {
            self.m.ge(Group::ND, "dmax", four, Lin::constant(1));
        } else {
            self.m.eq(Group::ND, "dmax", four, Lin::constant(0));
        }
    }

    /// Adjacency configurations.
    fn nac_group(&mut self) {
        let sg = self.sg;
        let al = &self.spec.alphabet;
        for sl in self.slots.clone() {
            let ((tp, ti), (hp, hi)) = sg.endpoints(&sl);
            let one = self.sum(self.tuples.iter().map(|&(a, b, q)| names::tau(&sl, a, b, q)));
            self.m.eq(Group::NAC, "tau1", one, Lin::constant(1));
            let (mut wa, mut wb, mut wm) = (Lin::new(), Lin::new(), Lin::new());
            for &(a, b, q) in &self.tuples {
                let v = self.x(&names::tau(&sl, a, b, q));
                wa.add(v, a as i64);
                wb.add(v, b as i64);
                wm.add(v, q as i64);
            }
            let at = self.lx(&names::alpha(tp, ti));
            self.m.eq(Group::NAC, "taua", wa, at);
            let ah = self.lx(&names::alpha(hp, hi));
            self.m.eq(Group::NAC, "taub", wb, ah);
            let b = self.lx(&names::beta(&sl));
            self.m.eq(Group::NAC, "taum", wm, b);
        }
        for g in al.gamma() {
            let (ca, cb) = (al.code(g.a), al.code(g.b));
            for (side, internal) in [("in", true), ("ex", false)] {
                let mut l = Lin::new();
                for sl in self.slots.iter().filter(|s| s.internal() == internal) {
                    l.add(self.x(&names::tau(sl, ca, cb, g.m)), 1);
                    if ca != cb {
                        l.add(self.x(&names::tau(sl, cb, ca, g.m)), 1);
                    }
                }
                let ac = self.lx(&names::ac(side, al.symbol(g.a), al.symbol(g.b), g.m));
                self.m.eq(Group::NAC, side, l, ac);
            }
        }
    }

    /// Bond configurations.
    fn nbc_group(&mut self) {
        let sg = self.sg;
        let al = &self.spec.alphabet;
        for sl in self.slots.clone() {
            let ((tp, ti), (hp, hi)) = sg.endpoints(&sl);
            let one = self.sum(self.dcs.iter().map(|&(d, d2, q)| names::dc(&sl, d, d2, q)));
            self.m.eq(Group::NBC, "dc1", one, Lin::constant(1));
            let (mut wd, mut wd2, mut wm) = (Lin::new(), Lin::new(), Lin::new());
            for &(d, d2, q) in &self.dcs {
                let v = self.x(&names::dc(&sl, d, d2, q));
                wd.add(v, d as i64);
                wd2.add(v, d2 as i64);
                wm.add(v, q as i64);
            }
            let b = self.lx(&names::beta(&sl));
            self.m.eq(Group::NBC, "dcm", wm, b);
            let dt = self.lx(&names::deg(tp, ti));
            self.m.eq(Group::NBC, "dcd", wd, dt);
            let dh = self.lx(&names::deg(hp, hi));
            self.m.eq(Group::NBC, "dcd2", wd2, dh);
        }
        for b in al.bc() {
            let dm = sg.d_max as u8;
            for (side, internal) in [("in", true), ("ex", false)] {
                let mut l = Lin::new();
                if b.d2 <= dm {
                    for sl in self.slots.iter().filter(|s| s.internal() == internal) {
                        l.add(self.x(&names::dc(sl, b.d1, b.d2, b.m)), 1);
                        if b.d1 != b.d2 {
                            l.add(self.x(&names::dc(sl, b.d2, b.d1, b.m)), 1);
                        }
                    }
                }
                let bc = self.lx(&names::bc(side, b.d1, b.d2, b.m));
                self.m.eq(Group::NBC, side, l, bc);
            }
        }
    }

    /// Descriptor box.
    fn ad_group(&mut self, bounds: &DescriptorBounds) {
        let al = &self.spec.alphabet;
        let mut fams: Vec<(Vec<String>, &Vec<Range>)> = Vec::new();
        for (side, dg, ce, bd, ac, bc) in [
            (
                "in",
                &bounds.dg_in,
                &bounds.ce_in,
                &bounds.bd_in,
                &bounds.ac_in,
                &bounds.bc_in,
            ),
            (
                "ex",
                &bounds.dg_ex,
                &bounds.ce_ex,
                &bounds.bd_ex,
                &bounds.ac_ex,
                &bounds.bc_ex,
            ),
        ] {
            fams.push(((1..=4).map(|d| names::dg(side, d)).collect(), dg));
            fams.push((al.elements().iter().map(|e| names::ce(side, &e.symbol)).collect(), ce));
            fams.push(((2..=3).map(|q| names::bd(side, q)).collect(), bd));
            fams.push((
                al.gamma()
                    .iter()
                    .map(|g| names::ac(side, al.symbol(g.a), al.symbol(g.b), g.m))
                    .collect(),
                ac,
            ));
            fams.push((al.bc().iter().map(|b| names::bc(side, b.d1, b.d2, b.m)).collect(), bc));
        }
        for (vars, ranges) in fams {
            for (name, &(lo, hi)) in vars.iter().zip(ranges.iter()) {
                let v = self.x(name);
                self.ad.insert(v, (lo, hi));
                self.m.ge(Group::AD, "lb", Lin::var(v), Lin::constant(lo));
                self.m.le(Group::AD, "ub", Lin::var(v), Lin::constant(hi));
            }
        }
    }
}

/// Structural model (constraint groups AD, SG, SS, AM, AE, NE, ND, NAC, NBC)
/// together with its scheme graph.
pub fn build_structure(spec: &TargetSpec, bounds: &DescriptorBounds) -> Result<(MilpModel, SchemeGraph), MilpError> {
    let (m, sg, _) = build_structure_ad(spec, bounds)?;
    Ok((m, sg))
}

fn build_structure_ad(
    spec: &TargetSpec,
    bounds: &DescriptorBounds,
) -> Result<(MilpModel, SchemeGraph, HashMap<usize, Range>), MilpError> {
    let sg = SchemeGraph::new(spec)?;
    bounds.validate(&spec.alphabet)?;
    let mut b = Builder {
        m: MilpModel::new(),
        sg: &sg,
        spec,
        tuples: tuple_domain(&spec.alphabet),
        dcs: dc_domain(&spec.alphabet, sg.d_max),
        slots: sg.slots(),
        ad: HashMap::new(),
    };
    b.declare();
    b.ad_group(bounds);
    b.sg_group();
    b.ss_group();
    b.am_group();
    let inc = b.incidence();
    b.ae_group(&inc);
    b.ne_group();
    b.nd_group(&inc);
    b.nac_group();
    b.nbc_group();
    if !b.m.static_conflicts().is_empty() {
        return Err(MilpError::StaticInfeasible(b.m.static_conflicts().to_vec()));
    }
    let ad = b.ad;
    Ok((b.m, sg, ad))
}

/// The full model together with the pieces needed to encode and decode.
#[derive(Clone, Debug)]
pub struct InverseModel {
    pub model: MilpModel,
    pub sg: SchemeGraph,
    pub relu: ReluVars,
}

/// The full model: structure, descriptor box, network block and target window.
pub fn build_model(spec: &TargetSpec, bounds: &DescriptorBounds, net: &NeuralNet) -> Result<InverseModel, MilpError> {
    let k = descriptor_names(&spec.alphabet).len();
    if net.input_size() != k {
        return Err(MilpError::Shape {
            expected: k,
            got: net.input_size(),
        });
    }
    let (mut m, sg, ad) = build_structure_ad(spec, bounds)?;
    let inputs = network_inputs(&m, spec);
    let boxes = input_boxes(&m, &inputs, &ad);
    let relu = add_relu_block(&mut m, net, &inputs, &boxes)?;
    add_target_window(&mut m, relu.y, spec.y_star, spec.epsilon);
    if !m.static_conflicts().is_empty() {
        return Err(MilpError::StaticInfeasible(m.static_conflicts().to_vec()));
    }
    Ok(InverseModel { model: m, sg, relu })
}
