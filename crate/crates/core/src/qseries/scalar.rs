//! Coefficients in `Q[(2πi)^±1]`.
//!
//! Throughout the crate `T` stands for `2πi`. A [`ScaledRational`] is a single
//! term `r·T^e`; a [`Graded`] value is a finite sum of such terms kept apart by
//! exponent.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // rescale huge numerators/denominators before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// `2πi` as a complex number.
pub fn tpi() -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
}

/// A single term `value · (2πi)^tpi_exponent`. Zero always carries exponent 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaledRational {
    pub value: BigRational,
    pub tpi_exponent: i32,
}

impl ScaledRational {
    pub fn new(value: BigRational, tpi_exponent: i32) -> Self {
        if value.is_zero() {
            ScaledRational { value, tpi_exponent: 0 }
        } else {
            ScaledRational { value, tpi_exponent }
        }
    }

    pub fn zero() -> Self {
        ScaledRational::new(BigRational::zero(), 0)
    }

    /// `πi`, i.e. `(1/2)·(2πi)`.
    pub fn pi_i() -> Self {
        ScaledRational::new(rat(1, 2), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, other: &ScaledRational) -> ScaledRational {
        ScaledRational::new(&self.value * &other.value, self.tpi_exponent + other.tpi_exponent)
    }

    pub fn to_complex(&self) -> Complex64 {
        tpi().powi(self.tpi_exponent) * rational_to_f64(&self.value)
    }
}

/// Finite sum `Σ_e c_e (2πi)^e`. Zero components are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Graded(BTreeMap<i32, BigRational>);

impl Graded {
    pub fn zero() -> Self {
        Graded(BTreeMap::new())
    }

    pub fn one() -> Self {
        Graded::rational(BigRational::one())
    }

    pub fn rational(r: BigRational) -> Self {
        Graded::term(r, 0)
    }

    pub fn int(n: i64) -> Self {
        Graded::rational(int(n))
    }

    /// `r · (2πi)^e`.
    pub fn term(r: BigRational, e: i32) -> Self {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(e, r);
        }
        Graded(m)
    }

    /// `(2πi)^e`.
    pub fn tpi_pow(e: i32) -> Self {
        Graded::term(BigRational::one(), e)
    }

    pub fn pi_i() -> Self {
        Graded::term(rat(1, 2), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.0.iter().map(|(e, r)| (*e, r))
    }

    pub fn component(&self, e: i32) -> BigRational {
        self.0.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The single term if this value is a monomial in `2πi`.
    pub fn as_monomial(&self) -> Option<ScaledRational> {
        if self.0.len() == 1 {
            let (e, r) = self.0.iter().next().unwrap();
            Some(ScaledRational::new(r.clone(), *e))
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, r: &BigRational, e: i32) {
        if r.is_zero() {
            return;
        }
        let slot = self.0.entry(e).or_insert_with(BigRational::zero);
        *slot += r;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn scale(&self, r: &BigRational) -> Graded {
        if r.is_zero() {
            return Graded::zero();
        }
        Graded(self.0.iter().map(|(e, c)| (*e, c * r)).collect())
    }

    /// Multiply by `(2πi)^k`.
    pub fn shift_tpi(&self, k: i32) -> Graded {
        Graded(self.0.iter().map(|(e, c)| (e + k, c.clone())).collect())
    }

    /// Inverse of a monomial.
    pub fn inverse(&self) -> Result<Graded> {
        let m = self
            .as_monomial()
            .ok_or_else(|| Error::NonUnit(format!("{self} is not a monomial in 2πi")))?;
        Ok(Graded::term(m.value.recip(), -m.tpi_exponent))
    }

    pub fn pow(&self, n: u32) -> Graded {
        (0..n).fold(Graded::one(), |acc, _| &acc * self)
    }

    pub fn to_complex(&self) -> Complex64 {
        let t = tpi();
        self.0
            .iter()
            .map(|(e, c)| t.powi(*e) * rational_to_f64(c))
            .sum()
    }

    pub fn max_tpi(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }

    pub fn min_tpi(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }
}

impl From<ScaledRational> for Graded {
    fn from(s: ScaledRational) -> Self {
        Graded::term(s.value, s.tpi_exponent)
    }
}

impl fmt::Display for Graded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.0 {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", format_rational(&mag))?,
                1 => write!(f, "{}*T", format_rational(&mag))?,
                _ => write!(f, "{}*T^{}", format_rational(&mag), e)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Graded {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (e, c) in &self.0 {
            seq.serialize_element(&(e, format_rational(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Graded {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(i32, String)> = Vec::deserialize(deserializer)?;
        let mut g = Graded::zero();
        for (e, s) in raw {
            let r = parse_rational(&s).map_err(de::Error::custom)?;
            g.add_term(&r, e);
        }
        Ok(g)
    }
}

impl Add<&Graded> for &Graded {
    type Output = Graded;
    fn add(self, rhs: &Graded) -> Graded {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Graded {
    type Output = Graded;
    fn add(mut self, rhs: Graded) -> Graded {
        self += &rhs;
        self
    }
}

impl AddAssign<&Graded> for Graded {
    fn add_assign(&mut self, rhs: &Graded) {
        for (e, c) in &rhs.0 {
            self.add_term(c, *e);
        }
    }
}

impl SubAssign<&Graded> for Graded {
    fn sub_assign(&mut self, rhs: &Graded) {
        for (e, c) in &rhs.0 {
            self.add_term(&-c, *e);
        }
    }
}

impl Sub<&Graded> for &Graded {
    type Output = Graded;
    fn sub(self, rhs: &Graded) -> Graded {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Graded {
    type Output = Graded;
    fn sub(mut self, rhs: Graded) -> Graded {
        self -= &rhs;
        self
    }
}

impl Neg for &Graded {
    type Output = Graded;
    fn neg(self) -> Graded {
        Graded(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }
}

impl Neg for Graded {
    type Output = Graded;
    fn neg(self) -> Graded {
        -&self
    }
}

impl Mul<&Graded> for &Graded {
    type Output = Graded;
    fn mul(self, rhs: &Graded) -> Graded {
        let mut out = Graded::zero();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &rhs.0 {
                out.add_term(&(ca * cb), ea + eb);
            }
        }
        out
    }
}

impl Mul for Graded {
    type Output = Graded;
    fn mul(self, rhs: Graded) -> Graded {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_normalization() {
        let z = ScaledRational::new(BigRational::zero(), 5);
        assert_eq!(z.tpi_exponent, 0);
        let mut g = Graded::term(rat(1, 2), 1);
        g.add_term(&rat(-1, 2), 1);
        assert!(g.is_zero());
    }

    #[test]
    fn pi_i_numeric() {
        let v = Graded::pi_i().to_complex();
        assert!((v - Complex64::new(0.0, std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn graded_mul_and_inverse() {
        let a = Graded::term(rat(3, 4), 2);
        let b = a.inverse().unwrap();
        assert_eq!(&a * &b, Graded::one());
        let c = Graded::one() + Graded::pi_i();
        assert!(c.inverse().is_err());
        assert_eq!(c.to_string(), "1 + 1/2*T");
    }

    #[test]
    fn serde_round_trip() {
        let g = Graded::term(rat(-1, 12), 2) + Graded::int(3);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"[[0,"3"],[2,"-1/12"]]"#);
        let back: Graded = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
