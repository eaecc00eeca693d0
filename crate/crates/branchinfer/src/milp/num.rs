//! Exact numbers with an `i64` fast path.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number; integers stay in machine words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Num {
    Int(i64),
    Big(BigRational),
}

impl Num {
    pub fn zero() -> Self {
        Num::Int(0)
    }

    pub fn one() -> Self {
        Num::Int(1)
    }

    /// Normalizes a rational, demoting to `Int` when possible.
    pub fn from_rational(r: BigRational) -> Self {
        if r.is_integer() {
            if let Some(i) = r.to_integer().to_i64() {
                return Num::Int(i);
            }
        }
        Num::Big(r)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        if x.fract() == 0.0 && x.abs() < 9.0e15 {
            return Num::Int(x as i64);
        }
        Num::from_rational(BigRational::from_float(x).expect("finite coefficient"))
    }

    pub fn to_rational(&self) -> BigRational {
        match self {
            Num::Int(i) => BigRational::from_integer(BigInt::from(*i)),
            Num::Big(r) => r.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Int(i) => *i as f64,
            Num::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Num::Int(i) => *i == 0,
            Num::Big(r) => r.is_zero(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Num::Int(_) => true,
            Num::Big(r) => r.is_integer(),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Num::Int(i) => Some(*i),
            Num::Big(r) if r.is_integer() => r.to_integer().to_i64(),
            Num::Big(_) => None,
        }
    }

    pub fn add(&self, o: &Num) -> Num {
        if let (Num::Int(a), Num::Int(b)) = (self, o) {
            if let Some(c) = a.checked_add(*b) {
                return Num::Int(c);
            }
        }
        Num::from_rational(self.to_rational() + o.to_rational())
    }

    pub fn sub(&self, o: &Num) -> Num {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Num) -> Num {
        if let (Num::Int(a), Num::Int(b)) = (self, o) {
            if let Some(c) = a.checked_mul(*b) {
                return Num::Int(c);
            }
        }
        Num::from_rational(self.to_rational() * o.to_rational())
    }

    pub fn neg(&self) -> Num {
        match self {
            Num::Int(i) if *i != i64::MIN => Num::Int(-i),
            _ => Num::from_rational(-self.to_rational()),
        }
    }

    /// Nearest integer (ties away from zero).
    pub fn round(&self) -> Num {
        match self {
            Num::Int(_) => self.clone(),
            Num::Big(r) => Num::from_rational(r.round()),
        }
    }

    pub fn abs(&self) -> Num {
        match self {
            Num::Int(i) => Num::Int(i.abs()),
            Num::Big(r) => Num::Big(r.abs()),
        }
    }

    /// `|self - o| <= tol`.
    pub fn close(&self, o: &Num, tol: &BigRational) -> bool {
        if let (Num::Int(a), Num::Int(b)) = (self, o) {
            return a == b || (BigRational::from_integer(BigInt::from((*a as i128 - *b as i128).abs() as i64)) <= *tol);
        }
        (self.to_rational() - o.to_rational()).abs() <= *tol
    }

    pub fn cmp_num(&self, o: &Num) -> std::cmp::Ordering {
        match (self, o) {
            (Num::Int(a), Num::Int(b)) => a.cmp(b),
            _ => self.to_rational().cmp(&o.to_rational()),
        }
    }
}

impl Default for Num {
    fn default() -> Self {
        Num::zero()
    }
}

impl From<i64> for Num {
    fn from(i: i64) -> Self {
        Num::Int(i)
    }
}

impl fmt::Display for Num {
    /// Integers plainly; dyadic values (from `f64`) in shortest round-trip
    /// decimal; other rationals as exact decimals when terminating, else
    /// with 20 fractional digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Int(i) => write!(f, "{i}"),
            Num::Big(r) => {
                let x = r.to_f64().unwrap_or(f64::NAN);
                if Num::from_f64(x) == *self {
                    return write!(f, "{x}");
                }
                write!(f, "{}", decimal_string(r, 20))
            }
        }
    }
}

fn decimal_string(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let int = a.to_integer();
    let mut frac = a - BigRational::from_integer(int.clone());
    let mut s = int.to_string();
    if !frac.is_zero() {
        s.push('.');
        let ten = BigRational::from_integer(BigInt::from(10));
        for _ in 0..digits {
            frac *= ten.clone();
            let d = frac.to_integer();
            s.push_str(&d.to_string());
            frac -= BigRational::from_integer(d);
            if frac.is_zero() {
                break;
            }
        }
    }
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

/// Parses a decimal literal such as `-12`, `0.9999998` or `1.5e-3` exactly.
pub fn parse_decimal(s: &str) -> Option<Num> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.as_bytes().first()? {
        b'-' => (true, &mant[1..]),
        b'+' => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (ip, fp) = match mant.find('.') {
        Some(p) => (&mant[..p], &mant[p + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if neg {
        num = -num;
    }
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(Num::from_rational(r))
}

/// `10^-6` as an exact rational.
pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000))
}
