//! Chemical element alphabet with adjacency and bond configurations.

use std::collections::HashMap;
use std::fmt;

use super::ChemError;

/// Index of an element inside a [`ChemicalAlphabet`] (0-based, mass order).
pub type ElemId = usize;

/// A heavy-atom element with valence and scaled mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub symbol: String,
    pub val: u8,
    /// `floor(10 * atomic mass)`.
    pub mass10: u32,
}

/// Adjacency configuration `(a, b, m)` with `a <= b` in alphabet order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gamma {
    pub a: ElemId,
    pub b: ElemId,
    pub m: u8,
}

impl Gamma {
    /// Normalizes an unordered element pair into canonical order.
    pub fn new(a: ElemId, b: ElemId, m: u8) -> Self {
        if a <= b {
            Gamma { a, b, m }
        } else {
            Gamma { a: b, b: a, m }
        }
    }
}

/// Bond configuration `(d1, d2, m)` with `d1 <= d2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BondConfig {
    pub d1: u8,
    pub d2: u8,
    pub m: u8,
}

impl BondConfig {
    pub fn new(d1: u8, d2: u8, m: u8) -> Self {
        if d1 <= d2 {
            BondConfig { d1, d2, m }
        } else {
            BondConfig { d1: d2, d2: d1, m }
        }
    }
}

/// Largest value of `max(d1, d2) + m` for an edge of a chemical graph.
///
/// An endpoint of degree `d` carrying an edge of multiplicity `m` has bond sum
/// at least `d - 1 + m`, which valence 4 caps at 4.
pub const BC_DEGREE_PLUS_MULT: u8 = 5;

const KNOWN: &[(&str, u8, f64)] = &[
    ("B", 3, 10.81),
    ("C", 4, 12.011),
    ("N", 3, 14.007),
    ("O", 2, 15.999),
    ("F", 1, 18.998),
    ("Si", 4, 28.085),
    ("P", 3, 30.974),
    ("S", 2, 32.06),
    ("Cl", 1, 35.45),
    ("Br", 1, 79.904),
    ("I", 1, 126.904),
];

/// Looks up the standard atomic mass of a common element symbol.
pub fn standard_mass(symbol: &str) -> Option<f64> {
    KNOWN.iter().find(|e| e.0 == symbol).map(|e| e.2)
}

/// The element set Λ with its derived configuration sets Γ, Bc and Dg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChemicalAlphabet {
    elements: Vec<Element>,
    by_symbol: HashMap<String, ElemId>,
    gamma: Vec<Gamma>,
    gamma_index: HashMap<Gamma, usize>,
    bc: Vec<BondConfig>,
    bc_index: HashMap<BondConfig, usize>,
}

impl Default for ChemicalAlphabet {
    fn default() -> Self {
        Self::cno()
    }
}

impl ChemicalAlphabet {
    /// The default alphabet {C, N, O} with valences 4, 3, 2.
    pub fn cno() -> Self {
        Self::from_symbols(&["C", "N", "O"]).expect("builtin alphabet")
    }

    /// Builds an alphabet from known element symbols using default valences.
    pub fn from_symbols(symbols: &[&str]) -> Result<Self, ChemError> {
        let mut els = Vec::new();
        for s in symbols {
            let (_, val, mass) = KNOWN
                .iter()
                .find(|e| e.0 == *s)
                .ok_or_else(|| ChemError::UnknownElement(s.to_string()))?;
            els.push(Element {
                symbol: s.to_string(),
                val: *val,
                mass10: (10.0 * mass).floor() as u32,
            });
        }
        Self::new(els)
    }

    /// Parses `"C:4,N:3,O:2"` (optionally `"X:val:mass"`) into an alphabet.
    pub fn parse(spec: &str) -> Result<Self, ChemError> {
        let mut els = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let parts: Vec<&str> = item.split(':').collect();
            let sym = parts[0].to_string();
            let val = match parts.get(1) {
                Some(v) => v.parse::<u8>().map_err(|_| ChemError::BadAlphabet(item.to_string()))?,
                None => KNOWN
                    .iter()
                    .find(|e| e.0 == sym)
                    .map(|e| e.1)
                    .ok_or_else(|| ChemError::UnknownElement(sym.clone()))?,
            };
            let mass = match parts.get(2) {
                Some(m) => m.parse::<f64>().map_err(|_| ChemError::BadAlphabet(item.to_string()))?,
                None => standard_mass(&sym).ok_or_else(|| ChemError::UnknownElement(sym.clone()))?,
            };
            els.push(Element {
                symbol: sym,
                val,
                mass10: (10.0 * mass).floor() as u32,
            });
        }
        Self::new(els)
    }

    /// Builds an alphabet with the full proper Γ.
    pub fn new(mut elements: Vec<Element>) -> Result<Self, ChemError> {
        if elements.is_empty() {
            return Err(ChemError::BadAlphabet("empty element set".into()));
        }
        for e in &elements {
            if !(1..=4).contains(&e.val) {
                return Err(ChemError::BadAlphabet(format!(
                    "valence of {} must lie in [1,4]",
                    e.symbol
                )));
            }
        }
        elements.sort_by(|x, y| x.mass10.cmp(&y.mass10).then(x.symbol.cmp(&y.symbol)));
        let mut by_symbol = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if by_symbol.insert(e.symbol.clone(), i).is_some() {
                return Err(ChemError::BadAlphabet(format!("duplicate element {}", e.symbol)));
            }
        }
        let mut gamma = Vec::new();
        for a in 0..elements.len() {
            for b in a..elements.len() {
                for m in 1..=3u8 {
                    let (va, vb) = (elements[a].val, elements[b].val);
                    if m <= va.min(vb) && m < va.max(vb) {
                        gamma.push(Gamma { a, b, m });
                    }
                }
            }
        }
        let mut bc = Vec::new();
        for m in 1..=3u8 {
            for d1 in 1..=4u8 {
                for d2 in d1..=4u8 {
                    if d2 + m <= BC_DEGREE_PLUS_MULT {
                        bc.push(BondConfig { d1, d2, m });
                    }
                }
            }
        }
        bc.sort();
        let gamma_index = gamma.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let bc_index = bc.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        Ok(ChemicalAlphabet {
            elements,
            by_symbol,
            gamma,
            gamma_index,
            bc,
            bc_index,
        })
    }

    /// Restricts Γ to the given tuples (each must be proper).
    pub fn with_gamma(mut self, tuples: &[Gamma]) -> Result<Self, ChemError> {
        let mut g: Vec<Gamma> = tuples.iter().map(|t| Gamma::new(t.a, t.b, t.m)).collect();
        g.sort();
        g.dedup();
        for t in &g {
            if !self.gamma_index.contains_key(t) {
                return Err(ChemError::BadAlphabet(format!(
                    "tuple {} is not a proper adjacency configuration",
                    self.gamma_name(t)
                )));
            }
        }
        self.gamma_index = g.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        self.gamma = g;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: ElemId) -> &Element {
        &self.elements[id]
    }

    pub fn symbol(&self, id: ElemId) -> &str {
        &self.elements[id].symbol
    }

    pub fn val(&self, id: ElemId) -> u8 {
        self.elements[id].val
    }

    pub fn mass10(&self, id: ElemId) -> u32 {
        self.elements[id].mass10
    }

    pub fn id(&self, symbol: &str) -> Option<ElemId> {
        self.by_symbol.get(symbol).copied()
    }

    /// Positive integer code of an element; ε has code 0.
    pub fn code(&self, id: ElemId) -> u32 {
        id as u32 + 1
    }

    pub fn max_val(&self) -> u8 {
        self.elements.iter().map(|e| e.val).max().unwrap_or(0)
    }

    /// Γ_< ∪ Γ_= in canonical order.
    pub fn gamma(&self) -> &[Gamma] {
        &self.gamma
    }

    pub fn gamma_lt(&self) -> impl Iterator<Item = &Gamma> {
        self.gamma.iter().filter(|g| g.a < g.b)
    }

    pub fn gamma_eq(&self) -> impl Iterator<Item = &Gamma> {
        self.gamma.iter().filter(|g| g.a == g.b)
    }

    pub fn gamma_pos(&self, g: &Gamma) -> Option<usize> {
        self.gamma_index.get(g).copied()
    }

    pub fn bc(&self) -> &[BondConfig] {
        &self.bc
    }

    pub fn bc_pos(&self, b: &BondConfig) -> Option<usize> {
        self.bc_index.get(b).copied()
    }

    /// Whether `(a, b, m)` is a proper adjacency configuration in Γ.
    pub fn is_proper(&self, a: ElemId, b: ElemId, m: u8) -> bool {
        self.gamma_index.contains_key(&Gamma::new(a, b, m))
    }

    pub fn gamma_name(&self, g: &Gamma) -> String {
        format!("{}{}{}", self.symbol(g.a), bond_char(g.m), self.symbol(g.b))
    }
}

/// Renders a multiplicity as `-`, `=` or `#`.
pub fn bond_char(m: u8) -> char {
    match m {
        1 => '-',
        2 => '=',
        _ => '#',
    }
}

impl fmt::Display for ChemicalAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .elements
            .iter()
            .map(|e| format!("{}:{}", e.symbol, e.val))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_alphabet_is_mass_ordered() {
        let al = ChemicalAlphabet::cno();
        let syms: Vec<&str> = al.elements().iter().map(|e| e.symbol.as_str()).collect();
        assert_eq!(syms, vec!["C", "N", "O"]);
        assert_eq!(al.mass10(0), 120);
        assert_eq!(al.code(0), 1);
        assert_eq!(al.code(2), 3);
    }

    #[test]
    fn gamma_tuples_are_proper() {
        let al = ChemicalAlphabet::cno();
        for g in al.gamma() {
            let (va, vb) = (al.val(g.a), al.val(g.b));
            assert!(g.m <= va.min(vb));
            assert!(g.m < va.max(vb));
        }
        // C-C x3, N-N x2, O-O x1, C-N x3, C-O x2, N-O x2
        assert_eq!(al.gamma().len(), 13);
        assert_eq!(al.gamma_eq().count(), 6);
        assert!(!al.is_proper(2, 2, 2));
        assert!(al.is_proper(0, 2, 2));
    }

    #[test]
    fn bond_configs_cover_all_valence_feasible_edges() {
        let al = ChemicalAlphabet::cno();
        assert_eq!(al.bc().len(), 19);
        assert!(al.bc_pos(&BondConfig::new(4, 1, 1)).is_some());
        assert!(al.bc_pos(&BondConfig::new(3, 1, 2)).is_some());
        assert!(al.bc_pos(&BondConfig::new(3, 1, 3)).is_none());
    }

    #[test]
    fn parse_custom_alphabet() {
        let al = ChemicalAlphabet::parse("O:2, C:4:12.011").unwrap();
        assert_eq!(al.symbol(0), "C");
        assert_eq!(al.val(1), 2);
        assert!(ChemicalAlphabet::parse("Xx").is_err());
        assert!(ChemicalAlphabet::parse("C:5").is_err());
    }

    #[test]
    fn restricted_gamma() {
        let al = ChemicalAlphabet::cno()
            .with_gamma(&[Gamma::new(0, 0, 1), Gamma::new(2, 0, 1)])
            .unwrap();
        assert_eq!(al.gamma().len(), 2);
        assert_eq!(al.gamma_pos(&Gamma::new(0, 2, 1)), Some(1));
        assert!(ChemicalAlphabet::cno().with_gamma(&[Gamma::new(2, 2, 2)]).is_err());
    }
}
