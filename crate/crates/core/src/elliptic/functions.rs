//! Constructors for `P_k`, `P̃_1` and `g_j^i` as bivariate expansions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{eulerian_polynomial, factorial};
use crate::error::{Error, Result};
use crate::qseries::dtau_inverse_factor;
use crate::qseries::scalar::Graded;

use super::bivariate::BivariateExpansion;
use super::zeta_rational::ZetaRational;

/// Names of the special functions handled by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionId {
    /// `P_k`, `k ≥ 1`.
    P(u32),
    PTilde1,
    /// `g_j^i` stored as `(i, j)`.
    G(u32, u32),
    /// Eisenstein series `G_{2k}`, stored by its weight `2k`.
    Eis(u32),
    /// Weierstrass-type `℘_k`.
    Wp(u32),
}

impl FunctionId {
    pub fn weight(&self) -> i32 {
        match *self {
            FunctionId::P(k) | FunctionId::Wp(k) | FunctionId::Eis(k) => k as i32,
            FunctionId::PTilde1 => 1,
            FunctionId::G(i, j) => (i + j) as i32,
        }
    }

    pub fn depends_on_z(&self) -> bool {
        !matches!(self, FunctionId::Eis(_))
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::P(k) => write!(f, "P_{k}"),
            FunctionId::PTilde1 => write!(f, "Ptilde_1"),
            FunctionId::G(i, j) => write!(f, "g_{i}_{j}"),
            FunctionId::Eis(w) => write!(f, "G_{w}"),
            FunctionId::Wp(k) => write!(f, "wp_{k}"),
        }
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    /// Accepts `P_k`, `Ptilde_1`, `g_i_j` (upper index `i`, lower `j`), `G_2k`, `wp_k`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownFunction(s.to_string());
        let num = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split('_').collect();
        let id = match parts.as_slice() {
            ["Ptilde", "1"] | ["P~", "1"] => FunctionId::PTilde1,
            ["P", k] => FunctionId::P(num(k)?),
            ["g", i, j] => FunctionId::G(num(i)?, num(j)?),
            ["G", w] => FunctionId::Eis(num(w)?),
            ["wp", k] => FunctionId::Wp(num(k)?),
            _ => return Err(bad()),
        };
        let ok = match id {
            FunctionId::P(k) | FunctionId::Wp(k) => k >= 1,
            FunctionId::G(_, j) => j >= 1,
            FunctionId::Eis(w) => w >= 2 && w % 2 == 0,
            FunctionId::PTilde1 => true,
        };
        if ok {
            Ok(id)
        } else {
            Err(bad())
        }
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n^e` for `n ≠ 0` and any integer `e`.
fn int_pow(n: i64, e: i64) -> BigRational {
    let b = big(n);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// `(2πi)^k/(k-1)!`.
fn prefactor(k: u32) -> Graded {
    let f = BigRational::from_integer(factorial(k as usize - 1));
    Graded::term(f.recip(), k as i32)
}

/// `Σ_{n>0} n^{k-1} ζ^n = ζ A_{k-1}(ζ)/(1-ζ)^k`.
fn positive_power_sum(k: u32) -> ZetaRational {
    let numerator: BTreeMap<i32, Graded> = eulerian_polynomial(k as usize - 1)
        .into_iter()
        .enumerate()
        .map(|(e, a)| (e as i32 + 1, Graded::rational(BigRational::from_integer(a))))
        .collect();
    ZetaRational::from_parts(numerator, k)
}

/// `P_k` with coefficients carrying `(2πi)^k`.
pub fn p_expansion(k: u32, n: usize) -> Result<BivariateExpansion> {
    if k == 0 {
        return Err(Error::InvalidInput("P_k needs k >= 1".into()));
    }
    let pre = prefactor(k);
    let mut layers = vec![positive_power_sum(k).scale(&pre)];
    for m in 1..=n as i64 {
        // n>0: ζ^p q^{p i};  n<0: -ζ^{-p} q^{p i}, both with p | m
        let mut layer = ZetaRational::zero();
        for p in (1..=m).filter(|p| m % p == 0) {
            layer.add_numerator_term(p as i32, &pre.scale(&int_pow(p, k as i64 - 1)));
            layer.add_numerator_term(-(p as i32), &pre.scale(&-int_pow(-p, k as i64 - 1)));
        }
        layers.push(layer);
    }
    BivariateExpansion::from_layers(layers)
}

/// `P̃_1 = P_1 + πi`.
pub fn p_tilde_1(n: usize) -> Result<BivariateExpansion> {
    Ok(p_expansion(1, n)?.add_constant(&Graded::pi_i()))
}

/// `g_j^i = (2πi)^j/(j-1)! Σ_{n≠0} n^{j-i-1} ζ^n ∂_τ^i (1-q^n)^{-1}`, assembled
/// from the per-`n` series of `∂_τ^i (1-q^n)^{-1}`.
pub fn g_expansion(i: u32, j: u32, n: usize) -> Result<BivariateExpansion> {
    if j == 0 {
        return Err(Error::InvalidInput("g_j^i needs j >= 1".into()));
    }
    let pre = prefactor(j);
    let order = n as i64;
    let mut layers = vec![ZetaRational::zero(); n + 1];
    if i == 0 {
        layers[0] = positive_power_sum(j).scale(&pre);
    }
    for k in (-order..=order).filter(|k| *k != 0) {
        let series = dtau_inverse_factor(k, i, order)?;
        let c = pre.scale(&int_pow(k, j as i64 - i as i64 - 1));
        for (m, layer) in layers.iter_mut().enumerate().skip(1) {
            let a = series.coeff(m as i64);
            if !a.is_zero() {
                layer.add_numerator_term(k as i32, &(&a * &c));
            }
        }
    }
    BivariateExpansion::from_layers(layers)
}

/// `ζ d/dζ` applied layerwise.
pub fn zeta_derivative(b: &BivariateExpansion) -> BivariateExpansion {
    b.zeta_derivative()
}

/// Expansion of any `z`-dependent function id that has a bivariate form.
pub fn expansion(id: FunctionId, n: usize) -> Result<BivariateExpansion> {
    match id {
        FunctionId::P(k) => p_expansion(k, n),
        FunctionId::PTilde1 => p_tilde_1(n),
        FunctionId::G(i, j) => g_expansion(i, j, n),
        other => Err(Error::InvalidInput(format!("{other} has no bivariate expansion"))),
    }
}

/// `(m-1)!/(m+i-1)!` as a rational.
pub fn factorial_ratio(m: u32, i: u32) -> BigRational {
    let num = factorial(m as usize - 1);
    let den = factorial((m + i) as usize - 1);
    BigRational::new(num, den)
}
