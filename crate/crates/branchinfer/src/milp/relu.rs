//! ReLU network block and the target window on its output.

use std::collections::BTreeMap;

use super::model::{Group, Lin, MilpModel};
use super::num::Num;
use super::scheme::names;
use super::MilpError;
use crate::ann::NeuralNet;

/// Variable ids of the network block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReluVars {
    /// Post-activation variable of each hidden unit, `hidden[l][j]` for
    /// hidden layer `l + 1`.
    pub hidden: Vec<Vec<usize>>,
    /// Activity indicator of each hidden unit whose sign is not fixed by the
    /// pre-activation interval.
    pub active: Vec<Vec<Option<usize>>>,
    /// Network output.
    pub y: usize,
}

/// Affine form `Σ coef·x_v + constant` kept in floating point until emitted.
#[derive(Clone, Debug, Default)]
struct Affine {
    terms: BTreeMap<usize, f64>,
    constant: f64,
}

impl Affine {
    fn from_lin(l: &Lin) -> Self {
        let mut a = Affine {
            terms: BTreeMap::new(),
            constant: l.constant.to_f64(),
        };
        for (v, c) in &l.terms {
            *a.terms.entry(*v).or_insert(0.0) += c.to_f64();
        }
        a
    }

    fn scaled_add(&mut self, o: &Affine, w: f64) {
        for (v, c) in &o.terms {
            *self.terms.entry(*v).or_insert(0.0) += w * c;
        }
        self.constant += w * o.constant;
    }

    fn to_lin(&self) -> Lin {
        let mut l = Lin::new();
        for (v, c) in &self.terms {
            if *c != 0.0 {
                l.add_num(*v, Num::from_f64(*c));
            }
        }
        l.add_const(Num::from_f64(self.constant));
        l
    }
}

/// Widens an interval so float rounding in the bounds never cuts off a
/// feasible point.
fn pad((lo, hi): (f64, f64)) -> (f64, f64) {
    (lo - 1e-4 * (1.0 + lo.abs()), hi + 1e-4 * (1.0 + hi.abs()))
}

/// Interval of `Σ w_i·x_i + b` for `x_i ∈ [lo_i, hi_i]`.
fn interval(w: &[f64], b: f64, boxes: &[(f64, f64)]) -> (f64, f64) {
    let (mut lo, mut hi) = (b, b);
    for (wi, &(l, u)) in w.iter().zip(boxes) {
        if *wi >= 0.0 {
            lo += wi * l;
            hi += wi * u;
        } else {
            lo += wi * u;
            hi += wi * l;
        }
    }
    (lo, hi)
}

/// Adds the network block over the given inputs (raw, unscaled descriptor
/// expressions) whose values lie in `boxes`. Hidden units become big-M ReLU
/// encodings with bounds from interval arithmetic; the output is affine.
pub fn add_relu_block(
    m: &mut MilpModel,
    net: &NeuralNet,
    inputs: &[Lin],
    boxes: &[(f64, f64)],
) -> Result<ReluVars, MilpError> {
    if inputs.len() != net.input_size() || boxes.len() != inputs.len() {
        return Err(MilpError::Shape {
            expected: net.input_size(),
            got: inputs.len(),
        });
    }
    let mut prev: Vec<Affine> = Vec::with_capacity(inputs.len());
    let mut prev_box: Vec<(f64, f64)> = Vec::with_capacity(inputs.len());
    for (i, (l, &(lo, hi))) in inputs.iter().zip(boxes).enumerate() {
        let (a, b) = net.scale_coeffs(i);
        let mut s = Affine::default();
        s.scaled_add(&Affine::from_lin(l), a);
        s.constant += b;
        prev.push(s);
        let (x, y) = (a * lo + b, a * hi + b);
        prev_box.push((x.min(y), x.max(y)));
    }
    let nl = net.n_layers();
    let mut hidden = Vec::new();
    let mut active = Vec::new();
    for l in 0..nl {
        let last = l + 1 == nl;
        let mut cur = Vec::new();
        let mut cur_box = Vec::new();
        let mut hid_ids = Vec::new();
        let mut act_ids = Vec::new();
        for (j, (w, &bias)) in net.weights[l].iter().zip(&net.biases[l]).enumerate() {
            let mut z = Affine {
                terms: BTreeMap::new(),
                constant: bias,
            };
            for (wi, p) in w.iter().zip(&prev) {
                z.scaled_add(p, *wi);
            }
            let (lo, hi) = pad(interval(w, bias, &prev_box));
            if !lo.is_finite() || !hi.is_finite() {
                return Err(MilpError::Overflow(format!(
                    "unbounded pre-activation at layer {}",
                    l + 1
                )));
            }
            let zl = z.to_lin();
            if last {
                let y = m.continuous(names::Y, Num::from_f64(lo), Num::from_f64(hi));
                m.eq(Group::C1, "out", Lin::var(y), zl);
                hid_ids.push(y);
                act_ids.push(None);
                continue;
            }
            let h = m.continuous(names::hid(l + 1, j + 1), Num::zero(), Num::from_f64(hi.max(0.0)));
            let mut hv = Affine::default();
            hv.terms.insert(h, 1.0);
            if hi <= 0.0 {
                m.le(Group::C1, "off", Lin::var(h), Lin::constant(0));
                act_ids.push(None);
                cur_box.push((0.0, 0.0));
            } else if lo >= 0.0 {
                m.eq(Group::C1, "on", Lin::var(h), zl);
                act_ids.push(None);
                cur_box.push((lo, hi));
            } else {
                let r = m.binary(names::act(l + 1, j + 1));
                m.ge(Group::C1, "ge", Lin::var(h), zl.clone());
                // h ≤ z − L(1 − r)
                let mut shifted = z.clone();
                shifted.constant -= lo;
                let mut rhs = shifted.to_lin();
                rhs.add_num(r, Num::from_f64(lo));
                m.le(Group::C1, "big", Lin::var(h), rhs);
                let mut ur = Lin::new();
                ur.add_num(r, Num::from_f64(hi));
                m.le(Group::C1, "cap", Lin::var(h), ur);
                act_ids.push(Some(r));
                cur_box.push((0.0, hi));
            }
            hid_ids.push(h);
            cur.push(hv);
        }
        if last {
            let y = hid_ids[0];
            return Ok(ReluVars { hidden, active, y });
        }
        hidden.push(hid_ids);
        active.push(act_ids);
        prev = cur;
        prev_box = cur_box;
    }
    Err(MilpError::Shape { expected: 1, got: 0 })
}

/// `(1 − ε)y* ≤ y ≤ (1 + ε)y*`, ordered so the window is nonempty for any sign of `y*`.
pub fn add_target_window(m: &mut MilpModel, y: usize, y_star: f64, eps: f64) {
    let (a, b) = ((1.0 - eps) * y_star, (1.0 + eps) * y_star);
    m.ge(Group::TW, "lo", Lin::var(y), Lin::constant(Num::from_f64(a.min(b))));
    m.le(Group::TW, "hi", Lin::var(y), Lin::constant(Num::from_f64(a.max(b))));
}

/// Values of the network block at raw input `x`, taken from a forward pass.
pub fn relu_values(m: &MilpModel, rv: &ReluVars, net: &NeuralNet, x: &[f64]) -> Result<Vec<(String, Num)>, MilpError> {
    let t = net.trace(x)?;
    let mut out = Vec::new();
    for (l, (hs, rs)) in rv.hidden.iter().zip(&rv.active).enumerate() {
        for (j, (&h, r)) in hs.iter().zip(rs).enumerate() {
            out.push((m.var(h).name.clone(), Num::from_f64(t.activations[l + 1][j])));
            if let Some(r) = r {
                let on = t.pre[l][j] > 0.0;
                out.push((m.var(*r).name.clone(), Num::Int(on as i64)));
            }
        }
    }
    out.push((
        m.var(rv.y).name.clone(),
        Num::from_f64(t.activations[net.n_layers()][0]),
    ));
    Ok(out)
}
