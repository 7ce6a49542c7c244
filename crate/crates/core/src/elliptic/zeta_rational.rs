//! Rational functions in `ζ` of the form `N(ζ)/(1-ζ)^d`.
//!
//! Every denominator met here is a power of `1-ζ`, so the canonical form
//! stores only the exponent `d` and a Laurent polynomial numerator with
//! `N(1) ≠ 0` whenever `d > 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::scalar::{int, Graded};

/// Minimum `|1-ζ|` accepted by [`ZetaRational::eval`].
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ZetaRational {
    numerator: BTreeMap<i32, Graded>,
    den_power: u32,
}

impl ZetaRational {
    pub fn zero() -> Self {
        ZetaRational::default()
    }

    pub fn constant(c: Graded) -> Self {
        ZetaRational::monomial(c, 0)
    }

    /// `c ζ^e`.
    pub fn monomial(c: Graded, e: i32) -> Self {
        let mut z = ZetaRational::zero();
        z.add_numerator_term(e, &c);
        z
    }

    pub fn from_parts(numerator: BTreeMap<i32, Graded>, den_power: u32) -> Self {
        let mut z = ZetaRational { numerator, den_power };
        z.numerator.retain(|_, c| !c.is_zero());
        z.reduce();
        z
    }

    pub fn numerator(&self) -> &BTreeMap<i32, Graded> {
        &self.numerator
    }

    pub fn den_power(&self) -> u32 {
        self.den_power
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn is_laurent(&self) -> bool {
        self.den_power == 0
    }

    pub fn coeff(&self, e: i32) -> Graded {
        self.numerator.get(&e).cloned().unwrap_or_default()
    }

    pub fn add_numerator_term(&mut self, e: i32, c: &Graded) {
        if c.is_zero() {
            return;
        }
        let slot = self.numerator.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.numerator.remove(&e);
        }
    }

    /// Cancels common factors of `1-ζ`.
    fn reduce(&mut self) {
        if self.numerator.is_empty() {
            self.den_power = 0;
            return;
        }
        while self.den_power > 0 {
            let at_one = self.numerator.values().fold(Graded::zero(), |acc, c| &acc + c);
            if !at_one.is_zero() {
                break;
            }
            // N = (1-ζ) Q with Q_e = Σ_{e' ≤ e} N_{e'}
            let mut q = BTreeMap::new();
            let mut running = Graded::zero();
            let lo = *self.numerator.keys().next().unwrap();
            let hi = *self.numerator.keys().next_back().unwrap();
            for e in lo..hi {
                running += &self.coeff(e);
                if !running.is_zero() {
                    q.insert(e, running.clone());
                }
            }
            self.numerator = q;
            self.den_power -= 1;
        }
    }

    fn numerator_times_one_minus_zeta(num: &BTreeMap<i32, Graded>, times: u32) -> BTreeMap<i32, Graded> {
        let mut cur = num.clone();
        for _ in 0..times {
            let mut next: BTreeMap<i32, Graded> = BTreeMap::new();
            for (e, c) in &cur {
                *next.entry(*e).or_default() += c;
                *next.entry(e + 1).or_default() -= c;
            }
            next.retain(|_, c| !c.is_zero());
            cur = next;
        }
        cur
    }

    pub fn add(&self, other: &ZetaRational) -> ZetaRational {
        let d = self.den_power.max(other.den_power);
        let a = Self::numerator_times_one_minus_zeta(&self.numerator, d - self.den_power);
        let b = Self::numerator_times_one_minus_zeta(&other.numerator, d - other.den_power);
        let mut out = ZetaRational { numerator: a, den_power: d };
        for (e, c) in &b {
            out.add_numerator_term(*e, c);
        }
        out.reduce();
        out
    }

    pub fn neg(&self) -> ZetaRational {
        self.scale(&Graded::int(-1))
    }

    pub fn sub(&self, other: &ZetaRational) -> ZetaRational {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Graded) -> ZetaRational {
        let numerator = self.numerator.iter().map(|(e, x)| (*e, x * c)).collect();
        ZetaRational::from_parts(numerator, self.den_power)
    }

    pub fn mul(&self, other: &ZetaRational) -> ZetaRational {
        let mut numerator: BTreeMap<i32, Graded> = BTreeMap::new();
        for (ea, ca) in &self.numerator {
            for (eb, cb) in &other.numerator {
                *numerator.entry(ea + eb).or_default() += &(ca * cb);
            }
        }
        ZetaRational::from_parts(numerator, self.den_power + other.den_power)
    }

    /// `ζ d/dζ`.
    pub fn zeta_derivative(&self) -> ZetaRational {
        // ζ∂(N/(1-ζ)^d) = [ζN'(1-ζ) + dζN] / (1-ζ)^{d+1}
        let zn: BTreeMap<i32, Graded> = self
            .numerator
            .iter()
            .map(|(e, c)| (*e, c.scale(&int(*e as i64))))
            .collect();
        if self.den_power == 0 {
            return ZetaRational::from_parts(zn, 0);
        }
        let mut num = Self::numerator_times_one_minus_zeta(&zn, 1);
        let d = BigRational::from_integer(self.den_power.into());
        for (e, c) in &self.numerator {
            *num.entry(e + 1).or_default() += &c.scale(&d);
        }
        ZetaRational::from_parts(num, self.den_power + 1)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Graded) -> Graded) -> ZetaRational {
        ZetaRational::from_parts(self.numerator.iter().map(|(e, c)| (*e, f(c))).collect(), self.den_power)
    }

    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        if self.den_power > 0 && (Complex64::new(1.0, 0.0) - zeta).norm() < POLE_GUARD {
            return Err(Error::Pole(format!("ζ = {zeta} is within {POLE_GUARD} of the pole at 1")));
        }
        let mut s = Complex64::zero();
        for (e, c) in &self.numerator {
            s += c.to_complex() * zeta.powi(*e);
        }
        Ok(s / (Complex64::new(1.0, 0.0) - zeta).powi(self.den_power as i32))
    }
}

impl PartialEq for ZetaRational {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numerator.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .numerator
            .iter()
            .map(|(e, c)| match e {
                0 => format!("({c})"),
                1 => format!("({c})*ζ"),
                _ => format!("({c})*ζ^{e}"),
            })
            .collect();
        let num = parts.join(" + ");
        match self.den_power {
            0 => write!(f, "{num}"),
            1 => write!(f, "[{num}]/(1-ζ)"),
            d => write!(f, "[{num}]/(1-ζ)^{d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(e: i32) -> ZetaRational {
        ZetaRational::monomial(Graded::one(), e)
    }

    fn geometric() -> ZetaRational {
        // ζ/(1-ζ)
        ZetaRational::from_parts([(1, Graded::one())].into_iter().collect(), 1)
    }

    #[test]
    fn reduction_cancels_common_factor() {
        // (1-ζ^2)/(1-ζ) = 1 + ζ
        let r = ZetaRational::from_parts([(0, Graded::one()), (2, Graded::int(-1))].into_iter().collect(), 1);
        assert_eq!(r.den_power(), 0);
        assert_eq!(r, z(0).add(&z(1)));
    }

    #[test]
    fn derivative_of_geometric() {
        // ζ∂ ζ/(1-ζ) = ζ/(1-ζ)^2
        let d = geometric().zeta_derivative();
        let expect = ZetaRational::from_parts([(1, Graded::one())].into_iter().collect(), 2);
        assert_eq!(d, expect);
        assert!(ZetaRational::constant(Graded::int(3)).zeta_derivative().is_zero());
        assert_eq!(z(3).zeta_derivative(), z(3).scale(&Graded::int(3)));
    }

    #[test]
    fn eval_and_pole_guard() {
        let v = geometric().eval(Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        assert!(matches!(geometric().eval(Complex64::new(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn add_with_different_denominators() {
        // ζ/(1-ζ) + 1 = 1/(1-ζ)
        let s = geometric().add(&z(0));
        let expect = ZetaRational::from_parts([(0, Graded::one())].into_iter().collect(), 1);
        assert_eq!(s, expect);
        assert_eq!(s.mul(&z(0).sub(&z(1))), z(0));
    }
}
