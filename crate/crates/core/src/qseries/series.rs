//! Truncated Laurent series in `q` with a rational exponent offset.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{format_rational, parse_rational, rational_to_f64, Graded};
use crate::error::{Error, Result};

/// `Σ_{m=lower}^{truncation} coeffs[m-lower] q^{offset+m}`.
///
/// Coefficients above `truncation` are unknown, not zero.
#[derive(Debug, Clone)]
pub struct QExpansion {
    offset: BigRational,
    lower: i64,
    coeffs: Vec<Graded>,
    truncation: i64,
}

impl QExpansion {
    /// Builds a series; `coeffs` beyond `truncation` are dropped and missing
    /// ones up to `truncation` are zero.
    pub fn new(offset: BigRational, lower: i64, mut coeffs: Vec<Graded>, truncation: i64) -> Self {
        let len = (truncation - lower + 1).max(0) as usize;
        coeffs.resize(len, Graded::zero());
        QExpansion { offset, lower, coeffs, truncation }
    }

    pub fn from_fn(offset: BigRational, lower: i64, truncation: i64, f: impl Fn(i64) -> Graded) -> Self {
        let coeffs = (lower..=truncation).map(f).collect();
        QExpansion::new(offset, lower, coeffs, truncation)
    }

    /// Power series with rational coefficients `c[0] + c[1] q + ...` known to `q^N`.
    pub fn from_rationals(coeffs: Vec<BigRational>, truncation: i64) -> Self {
        QExpansion::new(
            BigRational::zero(),
            0,
            coeffs.into_iter().map(Graded::rational).collect(),
            truncation,
        )
    }

    pub fn zero(truncation: i64) -> Self {
        QExpansion::new(BigRational::zero(), 0, vec![], truncation)
    }

    pub fn constant(c: Graded, truncation: i64) -> Self {
        QExpansion::new(BigRational::zero(), 0, vec![c], truncation)
    }

    pub fn one(truncation: i64) -> Self {
        QExpansion::constant(Graded::one(), truncation)
    }

    /// `c q^m`, exact to order `truncation`.
    pub fn monomial(c: Graded, m: i64, truncation: i64) -> Self {
        QExpansion::new(BigRational::zero(), m, vec![c], truncation)
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn coeffs(&self) -> &[Graded] {
        &self.coeffs
    }

    /// Coefficient of `q^{offset+m}`; zero outside the stored window.
    pub fn coeff(&self, m: i64) -> Graded {
        if m < self.lower || m > self.truncation {
            return Graded::zero();
        }
        self.coeffs[(m - self.lower) as usize].clone()
    }

    fn coeff_ref(&self, m: i64) -> Option<&Graded> {
        if m < self.lower || m > self.truncation {
            None
        } else {
            Some(&self.coeffs[(m - self.lower) as usize])
        }
    }

    /// Index of the first nonzero known coefficient, if any.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|p| self.lower + p as i64)
    }

    fn valuation_or_past(&self) -> i64 {
        self.valuation().unwrap_or(self.truncation + 1)
    }

    /// Lowers the truncation order.
    pub fn truncate(&self, n: i64) -> QExpansion {
        let n = n.min(self.truncation);
        QExpansion::new(self.offset.clone(), self.lower, self.coeffs.clone(), n)
    }

    fn integer_shift(&self, other: &QExpansion) -> Result<i64> {
        let d = &other.offset - &self.offset;
        if !d.is_integer() {
            return Err(Error::IncompatibleOffsets(
                format_rational(&self.offset),
                format_rational(&other.offset),
            ));
        }
        d.to_integer()
            .to_i64()
            .ok_or_else(|| Error::IncompatibleOffsets(format_rational(&self.offset), format_rational(&other.offset)))
    }

    /// Rewrites the series with a new offset differing by an integer.
    pub fn with_offset(&self, offset: &BigRational) -> Result<QExpansion> {
        let d = offset - &self.offset;
        if !d.is_integer() {
            return Err(Error::IncompatibleOffsets(format_rational(&self.offset), format_rational(offset)));
        }
        let d = d.to_integer().to_i64().unwrap_or(0);
        // q^{offset_old + m} = q^{offset_new + (m - d)}
        Ok(QExpansion {
            offset: offset.clone(),
            lower: self.lower - d,
            coeffs: self.coeffs.clone(),
            truncation: self.truncation - d,
        })
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.combine(other, true)
    }

    fn combine(&self, other: &QExpansion, negate: bool) -> Result<QExpansion> {
        let d = self.integer_shift(other)?;
        // other's index m sits at self index m + d
        let lower = self.lower.min(other.lower + d);
        let truncation = self.truncation.min(other.truncation + d);
        Ok(QExpansion::from_fn(self.offset.clone(), lower, truncation, |m| {
            let b = other.coeff(m - d);
            if negate {
                &self.coeff(m) - &b
            } else {
                &self.coeff(m) + &b
            }
        }))
    }

    pub fn neg(&self) -> QExpansion {
        self.scalar_mul(&Graded::int(-1))
    }

    pub fn scalar_mul(&self, c: &Graded) -> QExpansion {
        QExpansion {
            offset: self.offset.clone(),
            lower: self.lower,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            truncation: self.truncation,
        }
    }

    pub fn scale(&self, r: &BigRational) -> QExpansion {
        self.scalar_mul(&Graded::rational(r.clone()))
    }

    /// Product; known up to `min(N_a + v_b, N_b + v_a)`.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let va = self.valuation_or_past();
        let vb = other.valuation_or_past();
        let truncation = (self.truncation + vb).min(other.truncation + va);
        let lower = va + vb;
        let offset = &self.offset + &other.offset;
        if lower > truncation {
            return QExpansion::new(offset, lower.min(truncation + 1), vec![], truncation);
        }
        let mut coeffs = vec![Graded::zero(); (truncation - lower + 1) as usize];
        for i in va..=self.truncation {
            let a = match self.coeff_ref(i) {
                Some(a) if !a.is_zero() => a,
                _ => continue,
            };
            for j in vb..=(truncation - i) {
                if let Some(b) = other.coeff_ref(j) {
                    if !b.is_zero() {
                        coeffs[(i + j - lower) as usize] += &(a * b);
                    }
                }
            }
        }
        QExpansion::new(offset, lower, coeffs, truncation)
    }

    /// Inverse of a series whose leading coefficient is a monomial in `2πi`.
    pub fn invert_unit(&self) -> Result<QExpansion> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::NonUnit("series has no nonzero known coefficient".into()))?;
        let lead_inv = self.coeff(v).inverse()?;
        let rel = self.truncation - v;
        // a = q^v (c)(1 + r); compute the inverse of (1 + r) by the usual recurrence
        let mut b = vec![Graded::zero(); (rel + 1) as usize];
        b[0] = Graded::one();
        let unit: Vec<Graded> = (0..=rel).map(|i| &self.coeff(v + i) * &lead_inv).collect();
        for n in 1..=rel as usize {
            let mut acc = Graded::zero();
            for k in 1..=n {
                if !unit[k].is_zero() {
                    acc += &(&unit[k] * &b[n - k]);
                }
            }
            b[n] = -acc;
        }
        let coeffs = b.into_iter().map(|x| &x * &lead_inv).collect();
        Ok(QExpansion::new(-&self.offset, -v, coeffs, self.truncation - 2 * v))
    }

    pub fn power(&self, n: i64) -> Result<QExpansion> {
        let base = if n < 0 { self.invert_unit()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<QExpansion> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&sq),
                    None => sq.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap_or_else(|| QExpansion::one(self.truncation - self.valuation_or_past())))
    }

    /// `q d/dq`.
    pub fn q_d_dq(&self) -> QExpansion {
        QExpansion::from_fn(self.offset.clone(), self.lower, self.truncation, |m| {
            self.coeff(m).scale(&(&self.offset + BigRational::from_integer(BigInt::from(m))))
        })
    }

    /// `∂_τ = 2πi q d/dq`.
    pub fn tau_derivative(&self) -> QExpansion {
        let d = self.q_d_dq();
        QExpansion { coeffs: d.coeffs.iter().map(|c| c.shift_tpi(1)).collect(), ..d }
    }

    /// Exact equality of all coefficients of both series through index `n`.
    pub fn agrees_to(&self, other: &QExpansion, n: i64) -> bool {
        if self.offset != other.offset {
            return false;
        }
        if self.truncation < n || other.truncation < n {
            return false;
        }
        let lo = self.lower.min(other.lower);
        (lo..=n).all(|m| self.coeff(m) == other.coeff(m))
    }

    /// First index at which two series disagree, if any, up to the common truncation.
    pub fn first_difference(&self, other: &QExpansion) -> Option<i64> {
        let n = self.truncation.min(other.truncation);
        let lo = self.lower.min(other.lower);
        (lo..=n).find(|&m| self.coeff(m) != other.coeff(m))
    }

    /// Numeric sum at `τ`, with a geometric tail estimate based on the last
    /// stored coefficients.
    pub fn eval(&self, tau: Complex64) -> Result<(Complex64, f64)> {
        let q = (crate::qseries::scalar::tpi() * tau).exp();
        let aq = q.norm();
        if aq >= 1.0 {
            return Err(Error::Divergent(format!("|q| = {aq} >= 1")));
        }
        let off = rational_to_f64(&self.offset);
        let base = (crate::qseries::scalar::tpi() * tau * off).exp();
        let mut sum = Complex64::zero();
        let mut qm = q.powi(self.lower as i32);
        let mut last = 0.0f64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let term = c.to_complex() * qm;
            sum += term;
            if i + 4 >= self.coeffs.len() {
                last = last.max(c.to_complex().norm());
            }
            qm *= q;
        }
        let tail = last * aq.powi((self.truncation + 1) as i32) / (1.0 - aq) * base.norm();
        Ok((sum * base, tail))
    }
}

impl PartialEq for QExpansion {
    /// Equal when the offsets agree, both are known to the same order and all
    /// known coefficients match.
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset
            && self.truncation == other.truncation
            && self.first_difference(other).is_none()
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = BigRational::from_integer(BigInt::from(self.lower + i as i64)) + &self.offset;
            let e = if m.is_zero() {
                String::new()
            } else if m.is_one() {
                "q".to_string()
            } else if m.is_negative() || !m.is_integer() {
                format!("q^({})", format_rational(&m))
            } else {
                format!("q^{}", format_rational(&m))
            };
            let c = c.to_string();
            parts.push(match (e.is_empty(), c.as_str()) {
                (true, _) => format!("({c})"),
                (false, "1") => e,
                _ => format!("({c})*{e}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        let top = BigRational::from_integer(BigInt::from(self.truncation + 1)) + &self.offset;
        write!(f, "{} + O(q^{})", parts.join(" + "), format_rational(&top))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    offset: String,
    lower: i64,
    truncation: i64,
    coeffs: Vec<Graded>,
}

impl Serialize for QExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            offset: format_rational(&self.offset),
            lower: self.lower,
            truncation: self.truncation,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QExpansion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        let offset = parse_rational(&raw.offset).map_err(serde::de::Error::custom)?;
        Ok(QExpansion::new(offset, raw.lower, raw.coeffs, raw.truncation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::scalar::{int, rat};
    use proptest::prelude::*;

    fn poly(c: &[i64], n: i64) -> QExpansion {
        QExpansion::from_rationals(c.iter().map(|&x| int(x)).collect(), n)
    }

    fn geometric(n: i64) -> QExpansion {
        QExpansion::from_rationals(vec![int(1); (n + 1) as usize], n)
    }

    #[test]
    fn geometric_series_identity() {
        let p = poly(&[1, -1], 20).mul(&geometric(20));
        assert!(p.agrees_to(&QExpansion::one(20), 20));
        let inv = poly(&[1, -1], 20).invert_unit().unwrap();
        assert!(inv.agrees_to(&geometric(20), 20));
    }

    #[test]
    fn truncation_bookkeeping() {
        let a = geometric(5);
        let b = geometric(9);
        assert_eq!(a.mul(&b).truncation(), 5);
        let shifted = QExpansion::monomial(Graded::one(), 2, 9);
        assert_eq!(a.mul(&shifted).truncation(), 7);
    }

    #[test]
    fn tau_derivative_basics() {
        let q = QExpansion::monomial(Graded::one(), 1, 10);
        let d = q.tau_derivative();
        assert_eq!(d.coeff(1), Graded::tpi_pow(1));
        assert!(QExpansion::constant(Graded::int(5), 10).tau_derivative().valuation().is_none());
    }

    #[test]
    fn offsets_must_be_compatible() {
        let a = QExpansion::new(rat(1, 24), 0, vec![Graded::one()], 5);
        let b = QExpansion::one(5);
        assert!(matches!(a.add(&b), Err(Error::IncompatibleOffsets(_, _))));
        let c = QExpansion::new(rat(25, 24), 0, vec![Graded::one()], 5);
        let s = a.add(&c).unwrap();
        assert_eq!(s.coeff(0), Graded::one());
        assert_eq!(s.coeff(1), Graded::one());
        assert_eq!(s.truncation(), 5);
    }

    #[test]
    fn non_unit_inverse_rejected() {
        let c = QExpansion::constant(Graded::one() + Graded::pi_i(), 4);
        assert!(matches!(c.invert_unit(), Err(Error::NonUnit(_))));
        assert!(QExpansion::zero(4).invert_unit().is_err());
    }

    #[test]
    fn laurent_inverse_offsets() {
        let a = QExpansion::new(rat(1, 24), 1, vec![Graded::int(2), Graded::int(1)], 8);
        let inv = a.invert_unit().unwrap();
        assert_eq!(inv.offset(), &rat(-1, 24));
        assert_eq!(inv.lower(), -1);
        assert_eq!(inv.truncation(), 6);
        let prod = a.mul(&inv);
        assert_eq!(prod.offset(), &int(0));
        assert!(prod.agrees_to(&QExpansion::one(6), 6));
    }

    #[test]
    fn serde_round_trip() {
        let a = QExpansion::new(rat(-1, 24), 0, vec![Graded::one(), Graded::term(rat(1, 3), 2)], 3);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"offset":"-1/24","lower":0,"truncation":3,"coeffs":[[[0,"1"]],[[2,"1/3"]],[],[]]}"#);
        let b: QExpansion = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eval_geometric() {
        let tau = Complex64::new(0.0, 1.0);
        let (v, tail) = geometric(40).eval(tau).unwrap();
        let q = (crate::qseries::scalar::tpi() * tau).exp();
        assert!((v - 1.0 / (1.0 - q)).norm() < 1e-12);
        assert!(tail < 1e-50);
        assert!(geometric(4).eval(Complex64::new(0.0, -1.0)).is_err());
    }

    fn arb_series() -> impl Strategy<Value = QExpansion> {
        (proptest::collection::vec((-5i64..6, 1i64..4, -1i32..2), 1..8), 4i64..10).prop_map(|(c, n)| {
            QExpansion::new(
                BigRational::zero(),
                0,
                c.into_iter().map(|(a, b, e)| Graded::term(rat(a, b), e)).collect(),
                n,
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
            let n = a.truncation().min(b.truncation()).min(c.truncation());
            let l = a.mul(&b).mul(&c);
            let r = a.mul(&b.mul(&c));
            prop_assert!(l.truncate(n).first_difference(&r.truncate(n)).is_none());
            let d1 = a.mul(&b.add(&c).unwrap());
            let d2 = a.mul(&b).add(&a.mul(&c)).unwrap();
            prop_assert!(d1.truncate(n).first_difference(&d2.truncate(n)).is_none());
            prop_assert!(a.mul(&b).first_difference(&b.mul(&a)).is_none());
        }

        #[test]
        fn derivation_rule(a in arb_series(), b in arb_series()) {
            let lhs = a.mul(&b).tau_derivative();
            let rhs = a.tau_derivative().mul(&b).add(&a.mul(&b.tau_derivative())).unwrap();
            let n = lhs.truncation().min(rhs.truncation());
            prop_assert!(lhs.truncate(n).first_difference(&rhs.truncate(n)).is_none());
        }
    }
}
