//! Model IR, LP-format text, solution files and the exact checker.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::num::{default_tolerance, parse_decimal, Num};
use super::MilpError;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lb: Num,
    pub ub: Num,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: &BigRational, rhs: &BigRational, tol: &BigRational) -> bool {
        match self {
            Sense::Le => *lhs <= rhs + tol,
            Sense::Ge => *lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= *tol,
        }
    }
}

/// Constraint families; every constraint name starts with its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    /// Descriptor box (applicability domain).
    AD,
    /// Link-path coloring and branch degrees.
    SG,
    /// Subgraph selection.
    SS,
    /// Edge multiplicities.
    AM,
    /// Element assignment and valence.
    AE,
    /// Element, mass, bond and hydrogen counts.
    NE,
    /// Degrees.
    ND,
    /// Adjacency configurations.
    NAC,
    /// Bond configurations.
    NBC,
    /// ReLU network.
    C1,
    /// Target window on the predicted value.
    TW,
    /// Constraints read from an LP file with an unrecognized name.
    Other,
}

impl Group {
    pub const ALL: [Group; 11] = [
        Group::AD,
        Group::SG,
        Group::SS,
        Group::AM,
        Group::AE,
        Group::NE,
        Group::ND,
        Group::NAC,
        Group::NBC,
        Group::C1,
        Group::TW,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Group::AD => "AD",
            Group::SG => "SG",
            Group::SS => "SS",
            Group::AM => "AM",
            Group::AE => "AE",
            Group::NE => "NE",
            Group::ND => "ND",
            Group::NAC => "NAC",
            Group::NBC => "NBC",
            Group::C1 => "C1",
            Group::TW => "TW",
            Group::Other => "X",
        }
    }

    /// Group of a constraint name (`"AE_val_12"` → `AE`).
    pub fn of_name(name: &str) -> Group {
        let head = name.split('_').next().unwrap_or("");
        Group::ALL
            .into_iter()
            .find(|g| g.label() == head)
            .unwrap_or(Group::Other)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub group: Group,
    pub terms: Vec<(usize, Num)>,
    pub sense: Sense,
    pub rhs: Num,
}

/// Linear expression `Σ c·x + constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lin {
    pub terms: Vec<(usize, Num)>,
    pub constant: Num,
}

impl Lin {
    pub fn new() -> Self {
        Lin::default()
    }

    pub fn var(v: usize) -> Self {
        Lin {
            terms: vec![(v, Num::one())],
            constant: Num::zero(),
        }
    }

    pub fn constant(c: impl Into<Num>) -> Self {
        Lin {
            terms: Vec::new(),
            constant: c.into(),
        }
    }

    pub fn sum(vars: impl IntoIterator<Item = usize>) -> Self {
        let mut l = Lin::new();
        for v in vars {
            l.add(v, 1);
        }
        l
    }

    pub fn add(&mut self, v: usize, c: i64) -> &mut Self {
        if c != 0 {
            self.terms.push((v, Num::Int(c)));
        }
        self
    }

    pub fn add_num(&mut self, v: usize, c: Num) -> &mut Self {
        if !c.is_zero() {
            self.terms.push((v, c));
        }
        self
    }

    pub fn add_const(&mut self, c: impl Into<Num>) -> &mut Self {
        self.constant = self.constant.add(&c.into());
        self
    }

    pub fn add_lin(&mut self, o: &Lin, scale: &Num) -> &mut Self {
        for (v, c) in &o.terms {
            self.add_num(*v, c.mul(scale));
        }
        self.constant = self.constant.add(&o.constant.mul(scale));
        self
    }

    pub fn with(mut self, v: usize, c: i64) -> Self {
        self.add(v, c);
        self
    }

    /// Value at a dense assignment.
    pub fn eval(&self, values: &[Num]) -> Num {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc = acc.add(&c.mul(&values[*v]));
        }
        acc
    }
}

/// A mixed-integer linear feasibility model.
#[derive(Clone, Debug, Default)]
pub struct MilpModel {
    vars: Vec<Var>,
    index: HashMap<String, usize>,
    cons: Vec<Constraint>,
    /// Constraints without variables that can never hold.
    static_conflicts: Vec<String>,
}

impl MilpModel {
    pub fn new() -> Self {
        MilpModel::default()
    }

    /// Declares a variable. Names must be unique.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: impl Into<Num>, ub: impl Into<Num>) -> usize {
        let name = name.into();
        let id = self.vars.len();
        let prev = self.index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate variable {name}");
        self.vars.push(Var {
            name,
            kind,
            lb: lb.into(),
            ub: ub.into(),
        });
        id
    }

    pub fn binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Binary, 0, 1)
    }

    pub fn integer(&mut self, name: impl Into<String>, lb: i64, ub: i64) -> usize {
        self.add_var(name, VarKind::Integer, lb, ub)
    }

    pub fn continuous(&mut self, name: impl Into<String>, lb: Num, ub: Num) -> usize {
        self.add_var(name, VarKind::Continuous, lb, ub)
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Index of a variable known to exist.
    pub fn v(&self, name: &str) -> usize {
        match self.index.get(name) {
            Some(&i) => i,
            None => panic!("undeclared variable {name}"),
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, id: usize) -> &Var {
        &self.vars[id]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn static_conflicts(&self) -> &[String] {
        &self.static_conflicts
    }

    /// Tightens the bounds of an existing variable.
    pub fn set_bounds(&mut self, id: usize, lb: Num, ub: Num) {
        self.vars[id].lb = lb;
        self.vars[id].ub = ub;
    }

    /// Adds `lhs sense rhs`, moving all variables left.
    ///
    /// The name is `{group}_{tag}_{running index}`. A constraint whose
    /// terms cancel is dropped when it holds and recorded as a static
    /// conflict otherwise.
    pub fn add(&mut self, group: Group, tag: &str, lhs: Lin, sense: Sense, rhs: Lin) {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut terms: Vec<(usize, Num)> = Vec::with_capacity(lhs.terms.len() + rhs.terms.len());
        let neg_rhs = rhs.terms.into_iter().map(|(v, c)| (v, c.neg()));
        for (v, c) in lhs.terms.into_iter().chain(neg_rhs) {
            match pos.get(&v) {
                Some(&p) => terms[p].1 = terms[p].1.add(&c),
                None => {
                    pos.insert(v, terms.len());
                    terms.push((v, c));
                }
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        let k = rhs.constant.sub(&lhs.constant);
        let name = format!("{}_{}_{}", group.label(), tag, self.cons.len() + 1);
        if terms.is_empty() {
            let z = BigRational::zero();
            if !sense.holds(&z, &k.to_rational(), &z) {
                self.static_conflicts.push(format!("{name}: 0 {} {k}", sense.symbol()));
            }
            return;
        }
        self.cons.push(Constraint {
            name,
            group,
            terms,
            sense,
            rhs: k,
        });
    }

    pub fn eq(&mut self, group: Group, tag: &str, lhs: Lin, rhs: Lin) {
        self.add(group, tag, lhs, Sense::Eq, rhs);
    }

    pub fn le(&mut self, group: Group, tag: &str, lhs: Lin, rhs: Lin) {
        self.add(group, tag, lhs, Sense::Le, rhs);
    }

    pub fn ge(&mut self, group: Group, tag: &str, lhs: Lin, rhs: Lin) {
        self.add(group, tag, lhs, Sense::Ge, rhs);
    }

    /// Pushes a constraint verbatim (used by the LP parser).
    fn push_raw(&mut self, c: Constraint) {
        self.cons.push(c);
    }

    /// Constraint counts per group.
    pub fn group_counts(&self) -> BTreeMap<Group, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cons {
            *m.entry(c.group).or_insert(0) += 1;
        }
        m
    }

    /// For each variable, the constraints mentioning it.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.vars.len()];
        for (ci, c) in self.cons.iter().enumerate() {
            for (v, _) in &c.terms {
                occ[*v].push(ci);
            }
        }
        occ
    }
}

// ---------------------------------------------------------------- LP text

const LINE_WIDTH: usize = 200;

fn push_wrapped(out: &mut String, pieces: &[String], first_prefix: &str) {
    let mut line = String::from(first_prefix);
    let mut started = false;
    for p in pieces {
        if started && line.len() + p.len() > LINE_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
            line.push_str(p.trim_start());
        } else {
            line.push_str(p);
        }
        started = true;
    }
    out.push_str(&line);
    out.push('\n');
}

fn term_pieces(model: &MilpModel, terms: &[(usize, Num)]) -> Vec<String> {
    let mut pieces = Vec::with_capacity(terms.len());
    for (k, (v, c)) in terms.iter().enumerate() {
        let name = &model.vars[*v].name;
        let neg = c.cmp_num(&Num::zero()) == std::cmp::Ordering::Less;
        let a = c.abs();
        let body = if a == Num::one() {
            name.clone()
        } else {
            format!("{a} {name}")
        };
        let piece = match (k, neg) {
            (0, false) => format!(" {body}"),
            (0, true) => format!(" - {body}"),
            (_, false) => format!(" + {body}"),
            (_, true) => format!(" - {body}"),
        };
        pieces.push(piece);
    }
    pieces
}

/// Renders the model in LP format.
///
/// Every variable gets a bounds line, in declaration order, so parsing the
/// text restores the original variable order.
pub fn emit_lp(model: &MilpModel) -> String {
    let mut out = String::from("Minimize\n obj: 0\nSubject To\n");
    for c in &model.cons {
        let mut pieces = term_pieces(model, &c.terms);
        pieces.push(format!(" {} {}", c.sense.symbol(), c.rhs));
        push_wrapped(&mut out, &pieces, &format!(" {}:", c.name));
    }
    if !model.vars.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.vars {
            if v.lb == v.ub {
                out.push_str(&format!(" {} = {}\n", v.name, v.lb));
            } else {
                out.push_str(&format!(" {} <= {} <= {}\n", v.lb, v.name, v.ub));
            }
        }
    }
    for (title, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<String> = model
            .vars
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| format!(" {}", v.name))
            .collect();
        if !names.is_empty() {
            out.push_str(title);
            out.push('\n');
            push_wrapped(&mut out, &names, "");
        }
    }
    out.push_str("End");
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Generals,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "minimize" | "maximize" | "min" | "max" => Section::Objective,
        "subject to" | "st" | "s.t." | "such that" => Section::Constraints,
        "bounds" => Section::Bounds,
        "generals" | "general" | "integers" => Section::Generals,
        "binaries" | "binary" => Section::Binaries,
        "end" => Section::End,
        _ => return None,
    })
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.chars().next().unwrap().is_ascii_digit()
}

fn sense_of(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "=<" | "<" => Some(Sense::Le),
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

struct RawCons {
    line: usize,
    name: String,
    body: String,
}

/// A number in LP text. A literal that is the shortest rendering of an
/// `f64` reads as that `f64`, so emitted coefficients parse back unchanged.
fn lp_number(tok: &str) -> Option<Num> {
    let exact = parse_decimal(tok)?;
    if exact.is_integer() {
        return Some(exact);
    }
    let f = Num::from_f64(exact.to_f64());
    if f.to_string() == tok {
        Some(f)
    } else {
        Some(exact)
    }
}

/// Parses LP text produced by [`emit_lp`] (and the common subset of the
/// CPLEX LP format it uses). Every variable must end up with finite bounds.
pub fn parse_lp(text: &str) -> Result<MilpModel, MilpError> {
    let err = |line: usize, msg: String| MilpError::LpParse { line, msg };
    let mut section = Section::None;
    let mut raw: Vec<RawCons> = Vec::new();
    let mut bounds: Vec<(usize, String)> = Vec::new();
    let mut generals: Vec<String> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = line.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        match section {
            Section::None => return Err(err(ln, "text before the objective section".into())),
            Section::Objective => {}
            Section::Constraints => {
                if let Some((name, body)) = line.split_once(':') {
                    let name = name.trim();
                    if !is_name(name) {
                        return Err(err(ln, format!("bad constraint name {name:?}")));
                    }
                    raw.push(RawCons {
                        line: ln,
                        name: name.to_string(),
                        body: body.to_string(),
                    });
                } else {
                    match raw.last_mut() {
                        Some(r) => {
                            r.body.push(' ');
                            r.body.push_str(line);
                        }
                        None => return Err(err(ln, "continuation without a constraint".into())),
                    }
                }
            }
            Section::Bounds => bounds.push((ln, line.trim().to_string())),
            Section::Generals => generals.extend(line.split_whitespace().map(String::from)),
            Section::Binaries => binaries.extend(line.split_whitespace().map(String::from)),
            Section::End => return Err(err(ln, "text after End".into())),
        }
    }
    // Variable declarations: bounds order first, then first use.
    let mut lb: HashMap<String, Num> = HashMap::new();
    let mut ub: HashMap<String, Num> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut note = |name: &str, order: &mut Vec<String>| {
        if seen.insert(name.to_string(), ()).is_none() {
            order.push(name.to_string());
        }
    };
    for (ln, b) in &bounds {
        let toks: Vec<&str> = b.split_whitespace().collect();
        let num = |s: &str| lp_number(s).ok_or_else(|| err(*ln, format!("bad number {s:?}")));
        match toks.as_slice() {
            [l, "<=", x, "<=", u] if is_name(x) => {
                lb.insert(x.to_string(), num(l)?);
                ub.insert(x.to_string(), num(u)?);
                note(x, &mut order);
            }
            [x, "=", v] if is_name(x) => {
                lb.insert(x.to_string(), num(v)?);
                ub.insert(x.to_string(), num(v)?);
                note(x, &mut order);
            }
            [x, op, v] if is_name(x) && (*op == "<=" || *op == ">=") => {
                let m = if *op == "<=" { &mut ub } else { &mut lb };
                m.insert(x.to_string(), num(v)?);
                note(x, &mut order);
            }
            _ => return Err(err(*ln, format!("unsupported bound {b:?}"))),
        }
    }
    struct Parsed {
        name: String,
        terms: Vec<(String, Num)>,
        sense: Sense,
        rhs: Num,
    }
    let mut parsed = Vec::with_capacity(raw.len());
    for r in &raw {
        let toks: Vec<&str> = r.body.split_whitespace().collect();
        let mut terms = Vec::new();
        let mut i = 0;
        let mut sense = None;
        while i < toks.len() {
            if let Some(s) = sense_of(toks[i]) {
                sense = Some(s);
                i += 1;
                break;
            }
            let mut neg = false;
            if toks[i] == "+" || toks[i] == "-" {
                neg = toks[i] == "-";
                i += 1;
            }
            let tok = *toks.get(i).ok_or_else(|| err(r.line, "dangling sign".into()))?;
            let (coef, name) = if is_name(tok) {
                (Num::one(), tok)
            } else {
                let c = lp_number(tok).ok_or_else(|| err(r.line, format!("bad token {tok:?}")))?;
                i += 1;
                let n = *toks
                    .get(i)
                    .ok_or_else(|| err(r.line, "coefficient without variable".into()))?;
                if !is_name(n) {
                    return Err(err(r.line, format!("bad variable {n:?}")));
                }
                (c, n)
            };
            i += 1;
            let coef = if neg { coef.neg() } else { coef };
            note(name, &mut order);
            terms.push((name.to_string(), coef));
        }
        let sense = sense.ok_or_else(|| err(r.line, "missing relation".into()))?;
        if i + 1 != toks.len() {
            return Err(err(r.line, "expected a single right-hand side".into()));
        }
        let rhs = lp_number(toks[i]).ok_or_else(|| err(r.line, format!("bad rhs {:?}", toks[i])))?;
        parsed.push(Parsed {
            name: r.name.clone(),
            terms,
            sense,
            rhs,
        });
    }
    for b in &binaries {
        note(b, &mut order);
    }
    for g in &generals {
        note(g, &mut order);
    }
    let is_bin: HashMap<&str, ()> = binaries.iter().map(|s| (s.as_str(), ())).collect();
    let is_gen: HashMap<&str, ()> = generals.iter().map(|s| (s.as_str(), ())).collect();
    let mut model = MilpModel::new();
    for name in &order {
        let kind = if is_bin.contains_key(name.as_str()) {
            VarKind::Binary
        } else if is_gen.contains_key(name.as_str()) {
            VarKind::Integer
        } else {
            VarKind::Continuous
        };
        let (l, u) = match kind {
            VarKind::Binary => (
                lb.get(name).cloned().unwrap_or(Num::zero()),
                ub.get(name).cloned().unwrap_or(Num::one()),
            ),
            _ => (
                lb.get(name).cloned().unwrap_or(Num::zero()),
                ub.get(name)
                    .cloned()
                    .ok_or_else(|| err(0, format!("variable {name} has no finite upper bound")))?,
            ),
        };
        model.add_var(name.clone(), kind, l, u);
    }
    for p in parsed {
        let terms = p.terms.into_iter().map(|(n, c)| (model.v(&n), c)).collect();
        model.push_raw(Constraint {
            group: Group::of_name(&p.name),
            name: p.name,
            terms,
            sense: p.sense,
            rhs: p.rhs,
        });
    }
    Ok(model)
}

// ---------------------------------------------------------------- solutions

/// Variable values by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub values: BTreeMap<String, Num>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn set(&mut self, name: impl Into<String>, v: impl Into<Num>) {
        self.values.insert(name.into(), v.into());
    }

    /// Value of a variable; absent names read as 0.
    pub fn get(&self, name: &str) -> Num {
        self.values.get(name).cloned().unwrap_or(Num::zero())
    }

    pub fn get_i64(&self, name: &str) -> i64 {
        self.get(name).round().as_i64().unwrap_or(0)
    }

    /// Values aligned with the model's variables (absent → 0) and the names
    /// the model does not know.
    pub fn to_dense(&self, model: &MilpModel) -> (Vec<Num>, Vec<String>) {
        let mut dense = vec![Num::zero(); model.n_vars()];
        let mut unknown = Vec::new();
        for (k, v) in &self.values {
            match model.var_id(k) {
                Some(i) => dense[i] = v.clone(),
                None => unknown.push(k.clone()),
            }
        }
        (dense, unknown)
    }

    pub fn from_dense(model: &MilpModel, dense: &[Num]) -> Self {
        let mut a = Assignment::new();
        for (v, x) in model.vars().iter().zip(dense) {
            a.set(v.name.clone(), x.clone());
        }
        a
    }

    /// `name value` lines in name order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            s.push_str(&format!("{k} {v}\n"));
        }
        s
    }
}

/// Reads a `name value` solution file against a model.
///
/// Blank lines and lines starting with `#` are skipped. Returns the
/// assignment and warnings about variables the file does not mention (they
/// default to 0). Integer and binary values within 1e-6 of an integer are
/// rounded.
pub fn parse_solution(text: &str, model: &MilpModel) -> Result<(Assignment, Vec<String>), MilpError> {
    let tol = default_tolerance();
    let mut asg = Assignment::new();
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(MilpError::Solution {
                line: ln,
                msg: format!("expected `name value`, got {t:?}"),
            });
        }
        let id = model
            .var_id(toks[0])
            .ok_or_else(|| MilpError::UnknownVariable(toks[0].to_string()))?;
        let mut val = parse_decimal(toks[1]).ok_or_else(|| MilpError::Solution {
            line: ln,
            msg: format!("bad number {:?}", toks[1]),
        })?;
        let var = model.var(id);
        let lo = var.lb.to_rational() - &tol;
        let hi = var.ub.to_rational() + &tol;
        let r = val.to_rational();
        if r < lo || r > hi {
            return Err(MilpError::OutOfBounds {
                var: var.name.clone(),
                value: val.to_string(),
            });
        }
        if var.kind != VarKind::Continuous {
            let rounded = val.round();
            if !val.close(&rounded, &tol) {
                return Err(MilpError::NotIntegral {
                    var: var.name.clone(),
                    value: val.to_string(),
                });
            }
            val = rounded;
        }
        if asg.values.insert(var.name.clone(), val).is_some() {
            return Err(MilpError::Solution {
                line: ln,
                msg: format!("duplicate value for {}", var.name),
            });
        }
    }
    let mut warnings = Vec::new();
    for v in model.vars() {
        if !asg.values.contains_key(&v.name) {
            warnings.push(format!("{} missing, set to 0", v.name));
            asg.values.insert(v.name.clone(), Num::zero());
        }
    }
    Ok((asg, warnings))
}

// ---------------------------------------------------------------- checker

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Constraint {
        name: String,
        group: Group,
        lhs: Num,
        sense: Sense,
        rhs: Num,
    },
    Bound {
        var: String,
        value: Num,
    },
    Integrality {
        var: String,
        value: Num,
    },
    UnknownVariable {
        var: String,
    },
}

impl Violation {
    pub fn group(&self) -> Option<Group> {
        match self {
            Violation::Constraint { group, .. } => Some(*group),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Constraint {
                name, lhs, sense, rhs, ..
            } => write!(f, "{name}: lhs {lhs} {} {rhs} fails", sense.symbol()),
            Violation::Bound { var, value } => write!(f, "{var} = {value} outside its bounds"),
            Violation::Integrality { var, value } => write!(f, "{var} = {value} is not integral"),
            Violation::UnknownVariable { var } => write!(f, "unknown variable {var}"),
        }
    }
}

fn eval_terms(terms: &[(usize, Num)], values: &[Num]) -> BigRational {
    let mut acc: i128 = 0;
    let mut big: Option<BigRational> = None;
    for (v, c) in terms {
        match (c, &values[*v]) {
            (Num::Int(a), Num::Int(b)) if big.is_none() => {
                match (*a as i128).checked_mul(*b as i128).and_then(|p| acc.checked_add(p)) {
                    Some(s) => acc = s,
                    None => {
                        let p = BigRational::from_integer(BigInt::from(*a) * BigInt::from(*b));
                        big = Some(BigRational::from_integer(BigInt::from(acc)) + p);
                    }
                }
            }
            _ => {
                let b = big.get_or_insert_with(|| BigRational::from_integer(BigInt::from(acc)));
                *b += c.to_rational() * values[*v].to_rational();
            }
        }
    }
    big.unwrap_or_else(|| BigRational::from_integer(BigInt::from(acc)))
}

/// Checks one constraint at a dense assignment.
pub fn check_constraint(c: &Constraint, values: &[Num], tol: &BigRational) -> Option<Violation> {
    let lhs = eval_terms(&c.terms, values);
    let rhs = c.rhs.to_rational();
    if c.sense.holds(&lhs, &rhs, tol) {
        None
    } else {
        Some(Violation::Constraint {
            name: c.name.clone(),
            group: c.group,
            lhs: Num::from_rational(lhs),
            sense: c.sense,
            rhs: c.rhs.clone(),
        })
    }
}

/// Bound and integrality violations of a dense assignment.
pub fn check_domains(model: &MilpModel, values: &[Num], tol: &BigRational) -> Vec<Violation> {
    let mut out = Vec::new();
    for (v, x) in model.vars().iter().zip(values) {
        let r = x.to_rational();
        if r < v.lb.to_rational() - tol || r > v.ub.to_rational() + tol {
            out.push(Violation::Bound {
                var: v.name.clone(),
                value: x.clone(),
            });
        }
        if v.kind != VarKind::Continuous && !x.close(&x.round(), tol) {
            out.push(Violation::Integrality {
                var: v.name.clone(),
                value: x.clone(),
            });
        }
    }
    out
}

/// Evaluates every constraint and variable domain at tolerance 1e-6.
pub fn check_dense(model: &MilpModel, values: &[Num]) -> Vec<Violation> {
    let tol = default_tolerance();
    let mut out = check_domains(model, values, &tol);
    let per: Vec<Option<Violation>> = par::map(model.constraints(), |c| check_constraint(c, values, &tol));
    out.extend(per.into_iter().flatten());
    out
}

/// Full check of an assignment: unknown names, domains and constraints.
pub fn check_assignment(model: &MilpModel, asg: &Assignment) -> Vec<Violation> {
    let (dense, unknown) = asg.to_dense(model);
    let mut out: Vec<Violation> = unknown
        .into_iter()
        .map(|var| Violation::UnknownVariable { var })
        .collect();
    out.extend(check_dense(model, &dense));
    out
}

/// Checks only the constraints listed in `which` plus the domain of `var`.
pub fn check_subset(model: &MilpModel, values: &[Num], var: usize, which: &[usize]) -> Vec<Violation> {
    let tol = default_tolerance();
    let mut out = Vec::new();
    let v = model.var(var);
    let x = &values[var];
    let r = x.to_rational();
    if r < v.lb.to_rational() - &tol || r > v.ub.to_rational() + &tol {
        out.push(Violation::Bound {
            var: v.name.clone(),
            value: x.clone(),
        });
    }
    for &ci in which {
        if let Some(viol) = check_constraint(&model.constraints()[ci], values, &tol) {
            out.push(viol);
        }
    }
    out
}
