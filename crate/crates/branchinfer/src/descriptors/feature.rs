//! The graph-theoretical descriptor vector f(G).

use num_rational::Rational64;

use super::DescError;
use crate::chemgraph::{branch_decomposition, BondConfig, ChemicalAlphabet, ChemicalGraph};

/// Descriptor vector of an acyclic chemical graph, split into the parts on
/// the k-branch subtree ("in") and off it ("ex").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureVector {
    pub k: usize,
    pub n: usize,
    /// Index `i` counts vertices of degree `i + 1`.
    pub dg_in: [u32; 4],
    pub dg_ex: [u32; 4],
    pub dia: usize,
    pub bl: usize,
    pub bh: usize,
    /// Per element, in alphabet order.
    pub ce_in: Vec<u32>,
    pub ce_ex: Vec<u32>,
    /// Sum of `mass10` over all vertices.
    pub mass_total: u64,
    /// Index 0 for double bonds, 1 for triple bonds.
    pub bd_in: [u32; 2],
    pub bd_ex: [u32; 2],
    /// Per adjacency configuration, in alphabet order.
    pub ac_in: Vec<u32>,
    pub ac_ex: Vec<u32>,
    /// Per bond configuration, in alphabet order.
    pub bc_in: Vec<u32>,
    pub bc_ex: Vec<u32>,
    pub n_h: u32,
}

impl FeatureVector {
    /// `dia / n` as an exact rational.
    pub fn dia_bar(&self) -> Rational64 {
        Rational64::new(self.dia as i64, self.n as i64)
    }

    /// Average scaled mass as an exact rational.
    pub fn ms_bar(&self) -> Rational64 {
        Rational64::new(self.mass_total as i64, self.n as i64)
    }

    /// Number of serialized descriptors K.
    pub fn len(&self) -> usize {
        descriptor_count(self.ce_in.len(), self.ac_in.len(), self.bc_in.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Descriptor values in column order as exact rationals.
    pub fn values(&self) -> Vec<Rational64> {
        let int = |x: u32| Rational64::from_integer(x as i64);
        let mut v = Vec::with_capacity(self.len());
        v.push(int(self.n as u32));
        v.extend(self.dg_in.iter().map(|&x| int(x)));
        v.extend(self.dg_ex.iter().map(|&x| int(x)));
        v.push(self.dia_bar());
        v.push(int(self.bl as u32));
        v.push(int(self.bh as u32));
        v.extend(self.ce_in.iter().map(|&x| int(x)));
        v.extend(self.ce_ex.iter().map(|&x| int(x)));
        v.push(self.ms_bar());
        v.extend(self.bd_in.iter().map(|&x| int(x)));
        v.extend(self.bd_ex.iter().map(|&x| int(x)));
        v.extend(self.ac_in.iter().map(|&x| int(x)));
        v.extend(self.ac_ex.iter().map(|&x| int(x)));
        v.extend(self.bc_in.iter().map(|&x| int(x)));
        v.extend(self.bc_ex.iter().map(|&x| int(x)));
        v.push(int(self.n_h));
        v
    }

    /// Descriptor values as `f64` (network input).
    pub fn to_f64(&self) -> Vec<f64> {
        self.values()
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }

    /// Descriptor values rendered for CSV output.
    pub fn to_strings(&self) -> Vec<String> {
        self.values().iter().map(format_rational).collect()
    }

    /// The n_H formula over element and adjacency-configuration counts.
    pub fn n_h_from_counts(&self, alphabet: &ChemicalAlphabet) -> i64 {
        let mut h: i64 = 0;
        for a in 0..alphabet.len() {
            h += alphabet.val(a) as i64 * (self.ce_in[a] + self.ce_ex[a]) as i64;
        }
        for (i, g) in alphabet.gamma().iter().enumerate() {
            h -= 2 * g.m as i64 * (self.ac_in[i] + self.ac_ex[i]) as i64;
        }
        h
    }
}

/// `K` for an alphabet with the given set sizes.
pub fn descriptor_count(n_elem: usize, n_gamma: usize, n_bc: usize) -> usize {
    1 + 8 + 3 + 2 * n_elem + 1 + 4 + 2 * n_gamma + 2 * n_bc + 1
}

/// Column names in serialization order.
pub fn descriptor_names(alphabet: &ChemicalAlphabet) -> Vec<String> {
    let mut v = vec!["n".to_string()];
    for side in ["in", "ex"] {
        for d in 1..=4 {
            v.push(format!("dg_{side}_{d}"));
        }
    }
    v.push("dia_bar".into());
    v.push("bl".into());
    v.push("bh".into());
    for side in ["in", "ex"] {
        for e in alphabet.elements() {
            v.push(format!("ce_{side}_{}", e.symbol));
        }
    }
    v.push("ms_bar".into());
    for side in ["in", "ex"] {
        for m in 2..=3 {
            v.push(format!("bd_{side}_{m}"));
        }
    }
    for side in ["in", "ex"] {
        for g in alphabet.gamma() {
            v.push(format!("ac_{side}_{}", alphabet.gamma_name(g)));
        }
    }
    for side in ["in", "ex"] {
        for b in alphabet.bc() {
            v.push(format!("bc_{side}_{}_{}_{}", b.d1, b.d2, b.m));
        }
    }
    v.push("n_H".into());
    v
}

/// Decimal rendering with six fractional digits for non-integers.
pub fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let (num, den) = (*r.numer() as i128, *r.denom() as i128);
    let neg = num < 0;
    let scaled = (2 * num.abs() * 1_000_000 + den) / (2 * den);
    let s = format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000);
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

/// Number of hydrogens `Σ val(α(v)) − 2 Σ β(e)`.
pub fn hydrogen_count(g: &ChemicalGraph, alphabet: &ChemicalAlphabet) -> Result<u32, DescError> {
    let val: i64 = g.labels().iter().map(|&a| alphabet.val(a) as i64).sum();
    let beta: i64 = g.edges().iter().map(|e| e.m as i64).sum();
    let h = val - 2 * beta;
    if h < 0 {
        return Err(DescError::NegativeHydrogen(h));
    }
    Ok(h as u32)
}

/// Computes f(G) with respect to the k-branch decomposition.
pub fn feature_vector(g: &ChemicalGraph, k: usize, alphabet: &ChemicalAlphabet) -> Result<FeatureVector, DescError> {
    let bd = branch_decomposition(g, k).map_err(|_| DescError::NotATree)?;
    let na = alphabet.len();
    let mut fv = FeatureVector {
        k,
        n: g.n(),
        dg_in: [0; 4],
        dg_ex: [0; 4],
        dia: bd.dia,
        bl: bd.bl,
        bh: bd.bh,
        ce_in: vec![0; na],
        ce_ex: vec![0; na],
        mass_total: 0,
        bd_in: [0; 2],
        bd_ex: [0; 2],
        ac_in: vec![0; alphabet.gamma().len()],
        ac_ex: vec![0; alphabet.gamma().len()],
        bc_in: vec![0; alphabet.bc().len()],
        bc_ex: vec![0; alphabet.bc().len()],
        n_h: 0,
    };
    for v in 0..g.n() {
        let d = g.degree(v);
        if d > 4 {
            return Err(DescError::DegreeTooLarge { vertex: v, degree: d });
        }
        let a = g.label(v);
        let inside = bd.in_vertex[v];
        if d >= 1 {
            if inside {
                fv.dg_in[d - 1] += 1;
            } else {
                fv.dg_ex[d - 1] += 1;
            }
        }
        if inside {
            fv.ce_in[a] += 1;
        } else {
            fv.ce_ex[a] += 1;
        }
        fv.mass_total += alphabet.mass10(a) as u64;
    }
    for (i, e) in g.edges().iter().enumerate() {
        let inside = bd.in_vertex[e.u] && bd.in_vertex[e.v];
        let gp = alphabet
            .gamma_pos(&g.gamma_of(i))
            .ok_or(DescError::TupleNotInGamma { edge: i })?;
        let bc = BondConfig::new(g.degree(e.u) as u8, g.degree(e.v) as u8, e.m);
        let bp = alphabet.bc_pos(&bc).ok_or(DescError::BondConfigOutside { edge: i })?;
        if inside {
            fv.ac_in[gp] += 1;
            fv.bc_in[bp] += 1;
            if e.m >= 2 {
                fv.bd_in[e.m as usize - 2] += 1;
            }
        } else {
            fv.ac_ex[gp] += 1;
            fv.bc_ex[bp] += 1;
            if e.m >= 2 {
                fv.bd_ex[e.m as usize - 2] += 1;
            }
        }
    }
    let h = fv.n_h_from_counts(alphabet);
    if h < 0 {
        return Err(DescError::NegativeHydrogen(h));
    }
    fv.n_h = h as u32;
    Ok(fv)
}

/// Writes descriptor rows as CSV with a header line.
pub fn write_feature_csv<W: std::io::Write>(
    out: W,
    alphabet: &ChemicalAlphabet,
    rows: &[FeatureVector],
) -> Result<(), DescError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(descriptor_names(alphabet))
        .map_err(|e| DescError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r.to_strings())
            .map_err(|e| DescError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| DescError::Io(e.to_string()))
}

/// Short human-readable summary, e.g. `n=3 C3 H8`.
pub fn formula(fv: &FeatureVector, alphabet: &ChemicalAlphabet) -> String {
    let mut s = format!("n={}", fv.n);
    for (a, e) in alphabet.elements().iter().enumerate() {
        let c = fv.ce_in[a] + fv.ce_ex[a];
        if c > 0 {
            s.push_str(&format!(" {}{}", e.symbol, c));
        }
    }
    s.push_str(&format!(" H{}", fv.n_h));
    s
}
