//! Descriptor boxes derived from a corpus.

use super::MilpError;
use crate::chemgraph::{ChemicalAlphabet, ChemicalGraph};
use crate::descriptors::{feature_vector, FeatureVector};

/// Inclusive integer range.
pub type Range = (i64, i64);

/// Lower and upper bounds per descriptor family, split into in/ex parts.
///
/// `dg` has four entries (degree 1..=4), `bd` two (multiplicity 2 and 3),
/// `ce`, `ac` and `bc` follow the alphabet order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescriptorBounds {
    pub dg_in: Vec<Range>,
    pub dg_ex: Vec<Range>,
    pub ce_in: Vec<Range>,
    pub ce_ex: Vec<Range>,
    pub bd_in: Vec<Range>,
    pub bd_ex: Vec<Range>,
    pub ac_in: Vec<Range>,
    pub ac_ex: Vec<Range>,
    pub bc_in: Vec<Range>,
    pub bc_ex: Vec<Range>,
}

impl DescriptorBounds {
    /// The trivial box: `[0, n*]` for vertex counts, `[0, n* − 1]` for edge counts.
    pub fn loose(n_star: usize, alphabet: &ChemicalAlphabet) -> Self {
        let n = n_star as i64;
        let v = |len: usize| vec![(0, n); len];
        let e = |len: usize| vec![(0, n - 1); len];
        DescriptorBounds {
            dg_in: v(4),
            dg_ex: v(4),
            ce_in: v(alphabet.len()),
            ce_ex: v(alphabet.len()),
            bd_in: e(2),
            bd_ex: e(2),
            ac_in: e(alphabet.gamma().len()),
            ac_ex: e(alphabet.gamma().len()),
            bc_in: e(alphabet.bc().len()),
            bc_ex: e(alphabet.bc().len()),
        }
    }

    /// The box containing exactly one feature vector.
    pub fn point(fv: &FeatureVector) -> Self {
        let p = |xs: &[u32]| xs.iter().map(|&x| (x as i64, x as i64)).collect::<Vec<_>>();
        DescriptorBounds {
            dg_in: p(&fv.dg_in),
            dg_ex: p(&fv.dg_ex),
            ce_in: p(&fv.ce_in),
            ce_ex: p(&fv.ce_ex),
            bd_in: p(&fv.bd_in),
            bd_ex: p(&fv.bd_ex),
            ac_in: p(&fv.ac_in),
            ac_ex: p(&fv.ac_ex),
            bc_in: p(&fv.bc_in),
            bc_ex: p(&fv.bc_ex),
        }
    }

    fn families(&self) -> [(&'static str, &Vec<Range>); 10] {
        [
            ("dg_in", &self.dg_in),
            ("dg_ex", &self.dg_ex),
            ("ce_in", &self.ce_in),
            ("ce_ex", &self.ce_ex),
            ("bd_in", &self.bd_in),
            ("bd_ex", &self.bd_ex),
            ("ac_in", &self.ac_in),
            ("ac_ex", &self.ac_ex),
            ("bc_in", &self.bc_in),
            ("bc_ex", &self.bc_ex),
        ]
    }

    /// Checks `LB ≤ UB` and the family lengths against the alphabet.
    pub fn validate(&self, alphabet: &ChemicalAlphabet) -> Result<(), MilpError> {
        let want = [
            4,
            4,
            alphabet.len(),
            alphabet.len(),
            2,
            2,
            alphabet.gamma().len(),
            alphabet.gamma().len(),
            alphabet.bc().len(),
            alphabet.bc().len(),
        ];
        for ((name, fam), w) in self.families().into_iter().zip(want) {
            if fam.len() != w {
                return Err(MilpError::InvalidBounds(format!(
                    "{name} has {} entries, expected {w}",
                    fam.len()
                )));
            }
            for (i, (lo, hi)) in fam.iter().enumerate() {
                if lo > hi {
                    return Err(MilpError::InvalidBounds(format!("{name}[{i}]: LB {lo} > UB {hi}")));
                }
            }
        }
        Ok(())
    }

    /// Whether a feature vector lies in the box.
    pub fn contains(&self, fv: &FeatureVector) -> bool {
        let inside = |xs: &[u32], rs: &[Range]| xs.iter().zip(rs).all(|(&x, &(l, u))| l <= x as i64 && x as i64 <= u);
        inside(&fv.dg_in, &self.dg_in)
            && inside(&fv.dg_ex, &self.dg_ex)
            && inside(&fv.ce_in, &self.ce_in)
            && inside(&fv.ce_ex, &self.ce_ex)
            && inside(&fv.bd_in, &self.bd_in)
            && inside(&fv.bd_ex, &self.bd_ex)
            && inside(&fv.ac_in, &self.ac_in)
            && inside(&fv.ac_ex, &self.ac_ex)
            && inside(&fv.bc_in, &self.bc_in)
            && inside(&fv.bc_ex, &self.bc_ex)
    }
}

/// Running min/max of `count / size` as exact fractions.
#[derive(Clone, Copy)]
struct RatioRange {
    lo: (u64, u64),
    hi: (u64, u64),
}

impl RatioRange {
    fn new() -> Self {
        RatioRange { lo: (1, 0), hi: (0, 1) }
    }

    fn push(&mut self, num: u64, den: u64) {
        // a/b < c/d  <=>  a d < c b, with (1, 0) acting as +infinity
        if (num as u128) * (self.lo.1 as u128) < (self.lo.0 as u128) * (den as u128) || self.lo.1 == 0 {
            self.lo = (num, den);
        }
        if (num as u128) * (self.hi.1 as u128) > (self.hi.0 as u128) * (den as u128) {
            self.hi = (num, den);
        }
    }

    /// `(⌊scale·min⌋, ⌈scale·max⌉)`.
    fn scaled(&self, scale: u64) -> Range {
        let floor = (scale * self.lo.0 / self.lo.1) as i64;
        let ceil = (scale * self.hi.0).div_ceil(self.hi.1) as i64;
        (floor, ceil)
    }
}

/// Bounds from the corpus `d` together with the database slice of graphs of
/// size `n*`: vertex counts scale by `n*/n(G)`, edge counts by
/// `(n* − 1)/(n(G) − 1)`. Lower bounds round down and upper bounds round up,
/// so every scaled corpus value lies in its range.
pub fn compute_bounds(
    d: &[ChemicalGraph],
    n_star: usize,
    db_slice: &[ChemicalGraph],
    k: usize,
    alphabet: &ChemicalAlphabet,
) -> Result<DescriptorBounds, MilpError> {
    if d.is_empty() {
        return Err(MilpError::EmptyCorpus);
    }
    let mut fvs = Vec::with_capacity(d.len() + db_slice.len());
    for g in d.iter().chain(db_slice) {
        fvs.push(feature_vector(g, k, alphabet)?);
    }
    bounds_from_features(&fvs, n_star, alphabet)
}

/// [`compute_bounds`] over precomputed feature vectors.
pub fn bounds_from_features(
    fvs: &[FeatureVector],
    n_star: usize,
    alphabet: &ChemicalAlphabet,
) -> Result<DescriptorBounds, MilpError> {
    if fvs.is_empty() {
        return Err(MilpError::EmptyCorpus);
    }
    let na = alphabet.len();
    let ng = alphabet.gamma().len();
    let nb = alphabet.bc().len();
    let fam = |len| vec![RatioRange::new(); len];
    let mut r = [
        fam(4),
        fam(4),
        fam(na),
        fam(na),
        fam(2),
        fam(2),
        fam(ng),
        fam(ng),
        fam(nb),
        fam(nb),
    ];
    for fv in fvs {
        let n = fv.n as u64;
        let m = (fv.n as u64).saturating_sub(1);
        let parts: [(&[u32], u64); 10] = [
            (&fv.dg_in, n),
            (&fv.dg_ex, n),
            (&fv.ce_in, n),
            (&fv.ce_ex, n),
            (&fv.bd_in, m),
            (&fv.bd_ex, m),
            (&fv.ac_in, m),
            (&fv.ac_ex, m),
            (&fv.bc_in, m),
            (&fv.bc_ex, m),
        ];
        for (rr, (xs, den)) in r.iter_mut().zip(parts) {
            for (slot, &x) in rr.iter_mut().zip(xs) {
                // a single-vertex graph has no edges; its edge ratios read 0
                if den == 0 {
                    slot.push(0, 1);
                } else {
                    slot.push(x as u64, den);
                }
            }
        }
    }
    let ns = n_star as u64;
    let ms = ns.saturating_sub(1);
    let sc = |rr: &Vec<RatioRange>, s: u64| rr.iter().map(|x| x.scaled(s)).collect::<Vec<_>>();
    let b = DescriptorBounds {
        dg_in: sc(&r[0], ns),
        dg_ex: sc(&r[1], ns),
        ce_in: sc(&r[2], ns),
        ce_ex: sc(&r[3], ns),
        bd_in: sc(&r[4], ms),
        bd_ex: sc(&r[5], ms),
        ac_in: sc(&r[6], ms),
        ac_ex: sc(&r[7], ms),
        bc_in: sc(&r[8], ms),
        bc_ex: sc(&r[9], ms),
    };
    b.validate(alphabet)?;
    Ok(b)
}
