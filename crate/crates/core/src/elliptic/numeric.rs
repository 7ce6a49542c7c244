//! Floating-point evaluation of the elliptic functions anywhere off the lattice.
//!
//! Two independent routes are provided:
//! - [`eval_reduced`] sums the exact bivariate expansion of `P_k`/`P̃_1` after
//!   moving `z` into the expansion strip with the elliptic laws;
//! - [`eval_function`] uses Lambert sums `Σ_r r^i E_{j-1}(q^r ζ^{±1})`, which
//!   converge for every `ζ ∉ q^Z`.

use num_complex::Complex64;
use num_rational::BigRational;

use crate::combinatorics::{eulerian_polynomial, factorial};
use crate::error::{Error, Result};
use crate::qseries::scalar::{rational_to_f64, tpi};
use crate::qseries::bernoulli;

use super::bivariate::NumericValue;
use super::functions::{p_expansion, FunctionId};
use super::zeta_rational::POLE_GUARD;

/// Default truncation for numeric work.
pub const NUMERIC_ORDER: usize = 60;

const MAX_TERMS: usize = 20_000;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_tau(tau: Complex64) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return Err(Error::Region(format!("Im τ = {} must be positive", tau.im)));
    }
    Ok((tpi() * tau).exp())
}

fn fact(n: usize) -> f64 {
    rational_to_f64(&BigRational::from_integer(factorial(n)))
}

/// `E_n(x) = Σ_{p≥1} p^n x^p = x A_n(x)/(1-x)^{n+1}`, continued to all `x ≠ 1`.
fn power_lambert(n: u32, x: Complex64) -> Result<Complex64> {
    if (one() - x).norm() < POLE_GUARD {
        return Err(Error::Pole(format!("argument {x} is on the lattice")));
    }
    let mut poly = Complex64::new(0.0, 0.0);
    for (e, a) in eulerian_polynomial(n as usize).iter().enumerate() {
        poly += rational_to_f64(&BigRational::from_integer(a.clone())) * x.powi(e as i32);
    }
    Ok(x * poly / (one() - x).powi(n as i32 + 1))
}

/// `g_j^i(z, τ)` by Lambert sums over the `q`-shifts of `ζ`.
pub fn lambert_g(i: u32, j: u32, z: Complex64, tau: Complex64) -> Result<Complex64> {
    if j == 0 {
        return Err(Error::InvalidInput("g_j^i needs j >= 1".into()));
    }
    let q = check_tau(tau)?;
    let zeta = (tpi() * z).exp();
    let sign = if (j + i) % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = Complex64::new(0.0, 0.0);
    if i == 0 {
        sum += power_lambert(j - 1, zeta)?;
    }
    let mut qr = one();
    let mut quiet = 0;
    for r in 1..=MAX_TERMS {
        qr *= q;
        let w = (r as f64).powi(i as i32);
        let term = w * (power_lambert(j - 1, qr * zeta)? + sign * power_lambert(j - 1, qr / zeta)?);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if r == MAX_TERMS {
            return Err(Error::Divergent("Lambert sum did not converge".into()));
        }
    }
    let pre = tpi().powi((i + j) as i32) / fact(j as usize - 1);
    Ok(pre * sum)
}

/// `G_w(τ) = -B_w/w! (2πi)^w + 2(2πi)^w/(w-1)! Σ_n n^{w-1} q^n/(1-q^n)`.
pub fn eisenstein_numeric(w: u32, tau: Complex64) -> Result<Complex64> {
    if w < 2 || w % 2 == 1 {
        return Err(Error::InvalidInput(format!("G_{w} needs even weight >= 2")));
    }
    let q = check_tau(tau)?;
    let tw = tpi().powi(w as i32);
    let c0 = -rational_to_f64(&(bernoulli(w as usize) / BigRational::from_integer(factorial(w as usize))));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut qn = one();
    for n in 1..=MAX_TERMS {
        qn *= q;
        let term = (n as f64).powi(w as i32 - 1) * qn / (one() - qn);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) && n > 5 {
            break;
        }
    }
    Ok(tw * c0 + tw * 2.0 / fact(w as usize - 1) * sum)
}

/// Any function id at an arbitrary point.
pub fn eval_function(id: FunctionId, z: Complex64, tau: Complex64) -> Result<Complex64> {
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);
    match id {
        FunctionId::P(k) => lambert_g(0, k, z, tau),
        FunctionId::PTilde1 => Ok(lambert_g(0, 1, z, tau)? + pi_i),
        FunctionId::G(i, j) => lambert_g(i, j, z, tau),
        FunctionId::Eis(w) => eisenstein_numeric(w, tau),
        FunctionId::Wp(1) => Ok(-lambert_g(0, 1, z, tau)? + eisenstein_numeric(2, tau)? * z - pi_i),
        FunctionId::Wp(2) => Ok(lambert_g(0, 2, z, tau)? - eisenstein_numeric(2, tau)?),
        FunctionId::Wp(k) => Ok(if k % 2 == 0 { 1.0 } else { -1.0 } * lambert_g(0, k, z, tau)?),
    }
}

/// Result of evaluating after reduction into the expansion strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedValue {
    pub value: Complex64,
    pub error_estimate: f64,
    /// `n` with `z = z' + nτ + m`, where `z'` lies in the strip.
    pub tau_shift: i64,
    /// Whether `z'` was reflected to `τ - z'`.
    pub reflected: bool,
}

/// `P_k` (`k ≥ 1`) or `P̃_1` at any `z ∉ Λ`, via the bivariate expansion
/// truncated at `order`. Uses `P_1(z+τ) = P_1(z) + 2πi`, `P_k(z+τ) = P_k(z)`
/// and the reflection `P_k(τ-w) = (-1)^k P_k(w)` (`P_1(τ-w) = -P_1(w)`).
pub fn eval_reduced(id: FunctionId, z: Complex64, tau: Complex64, order: usize) -> Result<ReducedValue> {
    check_tau(tau)?;
    let (k, tilde) = match id {
        FunctionId::P(k) => (k, false),
        FunctionId::PTilde1 => (1, true),
        FunctionId::G(0, k) => (k, false),
        other => return Err(Error::InvalidInput(format!("{other} has no reduced evaluation"))),
    };
    let n = (z.im / tau.im).floor() as i64;
    let mut zr = z - tau * n as f64;
    // keep the real part small so ζ^e stays well conditioned
    zr -= Complex64::new(zr.re.round(), 0.0);
    let reflected = zr.im > tau.im / 2.0;
    let w = if reflected { tau - zr } else { zr };
    let w = w - Complex64::new(w.re.round(), 0.0);
    let nv: NumericValue = p_expansion(k, order)?.eval_numeric(w, tau)?;
    let mut value = nv.value;
    if reflected && k % 2 == 1 {
        value = -value;
    }
    if k == 1 {
        value += tpi() * n as f64;
        if tilde {
            value += Complex64::new(0.0, std::f64::consts::PI);
        }
    }
    Ok(ReducedValue { value, error_estimate: nv.error_estimate, tau_shift: n, reflected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::functions::g_expansion;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `℘_2` from its `q`-expansion with the `m`-sum split into both directions.
    fn wp2_q(z: Complex64, tau: Complex64) -> Complex64 {
        let t = tpi();
        let zeta = (t * z).exp();
        let q = (t * tau).exp();
        let f = |x: Complex64| x / ((one() - x) * (one() - x));
        let mut s = f(zeta);
        let mut qm = one();
        for _ in 1..400 {
            qm *= q;
            s += f(qm * zeta) + f(qm / zeta);
        }
        let mut lam = Complex64::new(0.0, 0.0);
        let mut qn = one();
        for n in 1..400 {
            qn *= q;
            lam += n as f64 * qn / (one() - qn);
        }
        let pi = std::f64::consts::PI;
        c(-pi * pi / 3.0, 0.0) + t * t * s - 2.0 * t * t * lam
    }

    /// `℘_1` from its `q`-expansion.
    fn wp1_q(z: Complex64, tau: Complex64) -> Complex64 {
        let t = tpi();
        let zeta = (t * z).exp();
        let q = (t * tau).exp();
        let pi_i = c(0.0, std::f64::consts::PI);
        let mut s = Complex64::new(0.0, 0.0);
        let mut qn = one();
        for _ in 1..400 {
            qn *= q;
            s += qn / (zeta - qn) - zeta * qn / (one() - zeta * qn);
        }
        eisenstein_numeric(2, tau).unwrap() * z + pi_i * (zeta + one()) / (zeta - one()) + t * s
    }

    #[test]
    fn p2_minus_g2_is_wp2() {
        let (z, tau) = (c(0.0, 0.3), c(0.0, 1.1));
        let lhs = eval_reduced(FunctionId::P(2), z, tau, NUMERIC_ORDER).unwrap().value
            - eisenstein_numeric(2, tau).unwrap();
        assert!((lhs - wp2_q(z, tau)).norm() < 1e-8);
    }

    #[test]
    fn p1_matches_wp1_relation() {
        let (z, tau) = (c(0.13, 0.3), c(0.2, 1.1));
        let p1 = eval_reduced(FunctionId::P(1), z, tau, NUMERIC_ORDER).unwrap().value;
        let rhs = -wp1_q(z, tau) + eisenstein_numeric(2, tau).unwrap() * z - c(0.0, std::f64::consts::PI);
        assert!((p1 - rhs).norm() < 1e-8, "{p1} vs {rhs}");
    }

    #[test]
    fn lambert_agrees_with_expansion_in_strip() {
        let tau = c(0.1, 1.2);
        for &z in &[c(0.2, 0.1), c(-0.3, 0.5), c(0.45, 0.9)] {
            for (i, j) in [(0, 1), (0, 2), (0, 5), (1, 1), (1, 2), (1, 3), (2, 2), (2, 5), (3, 1)] {
                let b = g_expansion(i, j, NUMERIC_ORDER).unwrap().eval_numeric(z, tau).unwrap();
                let l = lambert_g(i, j, z, tau).unwrap();
                let scale = l.norm().max(1.0);
                assert!((b.value - l).norm() / scale < 1e-9, "g^{i}_{j} at {z}: {} vs {l}", b.value);
            }
        }
    }

    #[test]
    fn reduction_agrees_with_lambert_everywhere() {
        let tau = c(-0.3, 1.05);
        for &z in &[c(0.2, -0.7), c(0.1, 1.9), c(2.3, 3.1), c(0.4, 0.8)] {
            for id in [FunctionId::P(1), FunctionId::P(2), FunctionId::P(3), FunctionId::PTilde1] {
                let r = eval_reduced(id, z, tau, NUMERIC_ORDER).unwrap();
                let l = eval_function(id, z, tau).unwrap();
                assert!((r.value - l).norm() < 1e-8, "{id} at {z}: {} vs {l}", r.value);
            }
        }
    }

    #[test]
    fn elliptic_shifts() {
        let tau = c(0.15, 1.1);
        let z = c(0.21, 0.33);
        let p = |id, z| eval_reduced(id, z, tau, NUMERIC_ORDER).unwrap().value;
        let d1 = p(FunctionId::P(1), z + tau) - p(FunctionId::P(1), z);
        assert!((d1 - tpi()).norm() < 1e-6);
        let dt = p(FunctionId::PTilde1, z + tau) - p(FunctionId::PTilde1, z);
        assert!((dt - tpi()).norm() < 1e-6);
        assert!((p(FunctionId::P(1), z + 1.0) - p(FunctionId::P(1), z)).norm() < 1e-10);
        for k in 2..=5 {
            let d = p(FunctionId::P(k), z + tau) - p(FunctionId::P(k), z);
            assert!(d.norm() < 1e-6, "k={k}");
        }
        let r = eval_reduced(FunctionId::P(2), z + tau * 2.0, tau, NUMERIC_ORDER).unwrap();
        assert_eq!(r.tau_shift, 2);
    }

    #[test]
    fn eisenstein_numeric_values() {
        // G_4(i) from the exact series at high order
        let tau = c(0.0, 1.0);
        let exact = crate::qseries::eisenstein(4, 30).unwrap().eval(tau).unwrap().0;
        assert!((eisenstein_numeric(4, tau).unwrap() - exact).norm() < 1e-10);
        assert!(eisenstein_numeric(3, tau).is_err());
    }

    #[test]
    fn pole_guard() {
        assert!(matches!(lambert_g(0, 2, c(0.0, 0.0), c(0.0, 1.0)), Err(Error::Pole(_))));
    }
}
