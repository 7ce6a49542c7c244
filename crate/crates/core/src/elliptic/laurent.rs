//! Expansions about `z = 0` with `q`-series coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::Result;
use crate::qseries::scalar::Graded;
use crate::qseries::{eisenstein, QExpansion};

/// `Σ_e c_e(q) z^e`, known for `e ≤ max_order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSeries {
    pub terms: BTreeMap<i32, QExpansion>,
    pub max_order: i32,
}

impl ZSeries {
    pub fn coeff(&self, e: i32) -> Option<&QExpansion> {
        self.terms.get(&e)
    }

    fn add_term(&mut self, e: i32, c: QExpansion) -> Result<()> {
        let next = match self.terms.remove(&e) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        self.terms.insert(e, next);
        Ok(())
    }

    /// `d/dz`, termwise.
    pub fn z_derivative(&self) -> ZSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| **e != 0)
            .map(|(e, c)| (e - 1, c.scale(&BigRational::from_integer(BigInt::from(*e)))))
            .collect();
        ZSeries { terms, max_order: self.max_order - 1 }
    }

    pub fn scale(&self, c: &Graded) -> ZSeries {
        ZSeries { terms: self.terms.iter().map(|(e, s)| (*e, s.scalar_mul(c))).collect(), max_order: self.max_order }
    }

    pub fn eval(&self, z: Complex64, tau: Complex64) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            s += c.eval(tau)?.0 * z.powi(*e);
        }
        Ok(s)
    }
}

/// `℘_k = z^{-k} + (-1)^k Σ_{n≥1} C(2n+1, k-1) G_{2n+2} z^{2n+2-k}` up to `z^M`.
pub fn wp_laurent(k: u32, m: i32, n: i64) -> Result<ZSeries> {
    let mut out = ZSeries { terms: BTreeMap::new(), max_order: m };
    out.add_term(-(k as i32), QExpansion::one(n))?;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    for j in 1.. {
        let e = 2 * j + 2 - k as i32;
        if e > m {
            break;
        }
        let c = binomial(2 * j as i64 + 1, k as i64 - 1) * sign;
        if c == BigInt::from(0) {
            continue;
        }
        let g = eisenstein(2 * j as usize + 2, n)?;
        out.add_term(e, g.scale(&BigRational::from_integer(c)))?;
    }
    Ok(out)
}

/// `(2πi)^m Σ_{n≥0} ∂_τ^m G_{2n+2} z^{2n+1+m}/((2n+2)⋯(2n+1+m))`, up to `z^M`.
///
/// This is the `m`-fold integral from `0`; it vanishes at `z = 0`, so it
/// differs from `g_1^m` by [`g1m_integration_constant`].
pub fn g1m_z_expansion(m: u32, max: i32, n: i64) -> Result<ZSeries> {
    let mut out = ZSeries { terms: BTreeMap::new(), max_order: max };
    for j in 0.. {
        let e = 2 * j + 1 + m as i32;
        if e > max {
            break;
        }
        let mut g = eisenstein(2 * j as usize + 2, n)?;
        for _ in 0..m {
            g = g.tau_derivative();
        }
        let den: i64 = ((2 * j as i64 + 2)..=(2 * j as i64 + 1 + m as i64)).product();
        let c = Graded::term(BigRational::new(BigInt::from(1), BigInt::from(den)), m as i32);
        out.add_term(e, g.scalar_mul(&c))?;
    }
    Ok(out)
}

/// The polynomial `Σ_{k<m} z^k/k! · ∂_z^k g_1^m(0, τ)` separating `g_1^m` from
/// the `m`-fold integral [`g1m_z_expansion`]. Its coefficients are
/// `(2πi)^{m+k+1} (1-(-1)^{m+k}) Σ_N Σ_{d|N} d^k (N/d)^m q^N / k!`.
pub fn g1m_integration_polynomial(m: u32, n: i64) -> ZSeries {
    let mut terms = BTreeMap::new();
    for k in (0..m).filter(|k| (m + k) % 2 == 1) {
        let kf = BigRational::from_integer(crate::combinatorics::factorial(k as usize));
        let series = QExpansion::from_fn(BigRational::from_integer(0.into()), 0, n, |nn| {
            if nn == 0 {
                return Graded::zero();
            }
            let s: BigInt = (1..=nn)
                .filter(|d| nn % d == 0)
                .map(|d| BigInt::from(d).pow(k) * BigInt::from(nn / d).pow(m))
                .sum();
            Graded::term(BigRational::from_integer(s * 2) / &kf, (m + k + 1) as i32)
        });
        terms.insert(k as i32, series);
    }
    ZSeries { terms, max_order: m as i32 - 1 }
}

/// The `z^0` part of [`g1m_integration_polynomial`], `g_1^m(0, τ)`.
pub fn g1m_integration_constant(m: u32, n: i64) -> QExpansion {
    g1m_integration_polynomial(m, n).terms.remove(&0).unwrap_or_else(|| QExpansion::zero(n))
}
