//! Named series: Bernoulli numbers, Eisenstein series, powers of `η`, and
//! `τ`-derivatives of `(1-q^k)^{-1}`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::{int, Graded};
use super::series::QExpansion;
use crate::combinatorics::{binomial, factorial, stirling_first, stirling_second};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: i64 = 40;

/// Bernoulli number `B_n` with `B_1 = -1/2`, from `Σ_{j≤m} C(m+1,j) B_j = 0`.
pub fn bernoulli(n: usize) -> BigRational {
    static CACHE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    let lock = CACHE.get_or_init(|| RwLock::new(vec![BigRational::one()]));
    if let Some(b) = lock.read().expect("bernoulli cache").get(n) {
        return b.clone();
    }
    let mut b = lock.write().expect("bernoulli cache");
    while b.len() <= n {
        let m = b.len();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial(m as i64 + 1, j as i64)) * bj;
        }
        let next = -acc / BigRational::from_integer(BigInt::from(m + 1));
        b.push(next);
    }
    b[n].clone()
}

/// `σ_k(n) = Σ_{d|n} d^k`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    acc
}

/// `G_{2k}` to `q^N`, every coefficient at `(2πi)^{2k}`.
pub fn eisenstein(two_k: usize, n: i64) -> Result<QExpansion> {
    if two_k < 2 || two_k % 2 != 0 {
        return Err(Error::InvalidInput(format!("Eisenstein weight must be even and >= 2, got {two_k}")));
    }
    let e = two_k as i32;
    let constant = -bernoulli(two_k) / BigRational::from_integer(factorial(two_k));
    let scale = BigRational::new(BigInt::from(2), factorial(two_k - 1));
    Ok(QExpansion::from_fn(BigRational::zero(), 0, n, |m| {
        if m == 0 {
            Graded::term(constant.clone(), e)
        } else {
            Graded::term(&scale * BigRational::from_integer(sigma(two_k as u32 - 1, m as u64)), e)
        }
    }))
}

/// `Π_{n≥1}(1-q^n)` to `q^N`, by Euler's pentagonal theorem.
fn euler_product(n: i64) -> QExpansion {
    let mut c = vec![BigRational::zero(); (n + 1) as usize];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = kk * (3 * kk - 1) / 2;
            if e <= n {
                any = true;
                c[e as usize] += int(if kk.rem_euclid(2) == 0 { 1 } else { -1 });
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    QExpansion::from_rationals(c, n)
}

/// `η^l = q^{l/24} Π(1-q^n)^l`, known to `q^{l/24 + N}`.
pub fn eta_power(l: i64, n: i64) -> Result<QExpansion> {
    let base = euler_product(n);
    let p = base.power(l)?.truncate(n);
    let offset = BigRational::new(BigInt::from(l), BigInt::from(24));
    Ok(QExpansion::new(offset, p.lower(), p.coeffs().to_vec(), p.truncation()))
}

/// `(1-q^k)^{-1}` as a power series, with `-Σ_{i≥1} q^{|k|i}` for `k < 0`.
pub fn inverse_factor(k: i64, n: i64) -> Result<QExpansion> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be nonzero".into()));
    }
    let a = k.abs();
    Ok(QExpansion::from_fn(BigRational::zero(), 0, n, |m| {
        if m % a != 0 {
            Graded::zero()
        } else if k > 0 {
            Graded::one()
        } else if m == 0 {
            Graded::zero()
        } else {
            Graded::int(-1)
        }
    }))
}

/// `w = q^k/(1-q^k) = (1-q^k)^{-1} - 1`.
pub fn w_factor(k: i64, n: i64) -> Result<QExpansion> {
    inverse_factor(k, n)?.sub(&QExpansion::one(n))
}

/// `∂_τ^n (1-q^k)^{-1}` to `q^N` by repeated differentiation.
pub fn dtau_inverse_factor(k: i64, n: u32, order: i64) -> Result<QExpansion> {
    let mut s = inverse_factor(k, order)?;
    for _ in 0..n {
        s = s.tau_derivative();
    }
    Ok(s)
}

/// `(2πik)^n Σ_i i! S(n,i) u w^i` with `u = (1-q^k)^{-1}`, `w = u - 1`.
pub fn dtau_inverse_factor_closed(k: i64, n: u32, order: i64) -> Result<QExpansion> {
    let u = inverse_factor(k, order)?;
    let w = w_factor(k, order)?;
    let mut acc = QExpansion::zero(order);
    let mut uw = u;
    for i in 0..=n as usize {
        let c = factorial(i) * stirling_second(n as usize, i);
        acc = acc.add(&uw.scale(&BigRational::from_integer(c)))?;
        uw = uw.mul(&w);
    }
    let kpow = BigRational::from_integer(BigInt::from(k).pow(n));
    Ok(acc.scalar_mul(&Graded::term(kpow, n as i32)).truncate(order))
}

/// `u w^l` computed as a product.
pub fn inverse_factor_power(k: i64, l: u32, order: i64) -> Result<QExpansion> {
    let mut acc = inverse_factor(k, order)?;
    let w = w_factor(k, order)?;
    for _ in 0..l {
        acc = acc.mul(&w);
    }
    Ok(acc.truncate(order))
}

/// `Σ_m (1/l!) (2πik)^{-m} s(l,m) ∂_τ^m u`, the inverse change of basis.
pub fn inverse_factor_power_from_derivatives(k: i64, l: u32, order: i64) -> Result<QExpansion> {
    let mut acc = QExpansion::zero(order);
    let lf = BigRational::from_integer(factorial(l as usize));
    for m in 0..=l {
        let s = stirling_first(l as usize, m as i64);
        if s.is_zero() {
            continue;
        }
        let c = BigRational::from_integer(s) / &lf / BigRational::from_integer(BigInt::from(k).pow(m));
        acc = acc.add(&dtau_inverse_factor(k, m, order)?.scalar_mul(&Graded::term(c, -(m as i32))))?;
    }
    Ok(acc)
}

/// Right-hand side of the derivative recursion
/// `w Σ_{r<n} (2πik)^{n-r} C(n,r) ∂_τ^r u`.
pub fn deriv_iden_rhs(k: i64, n: u32, order: i64) -> Result<QExpansion> {
    let w = w_factor(k, order)?;
    let mut acc = QExpansion::zero(order);
    for r in 0..n {
        let c = BigRational::from_integer(binomial(n as i64, r as i64) * BigInt::from(k).pow(n - r));
        acc = acc.add(&dtau_inverse_factor(k, r, order)?.scalar_mul(&Graded::term(c, (n - r) as i32)))?;
    }
    Ok(w.mul(&acc).truncate(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::scalar::rat;
    use num_complex::Complex64;

    fn partitions(n: usize) -> Vec<u64> {
        // p(m) by brute-force recursion over largest part
        fn count(m: usize, max: usize) -> u64 {
            if m == 0 {
                return 1;
            }
            (1..=max.min(m)).map(|p| count(m - p, p)).sum()
        }
        (0..=n).map(|m| count(m, m)).collect()
    }

    fn sigma_brute(k: u32, n: u64) -> BigInt {
        (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert!(bernoulli(7).is_zero());
    }

    #[test]
    fn sigma_matches_enumeration() {
        for k in 0..5 {
            for n in 1..60 {
                assert_eq!(sigma(k, n), sigma_brute(k, n));
            }
        }
    }

    #[test]
    fn eisenstein_fixtures() {
        let g2 = eisenstein(2, 3).unwrap();
        let expect = [rat(-1, 12), int(2), int(6), int(8)];
        for (m, c) in expect.iter().enumerate() {
            assert_eq!(g2.coeff(m as i64), Graded::term(c.clone(), 2));
        }
        let g4 = eisenstein(4, 3).unwrap();
        let expect = [rat(1, 720), rat(1, 3), int(3), rat(28, 3)];
        for (m, c) in expect.iter().enumerate() {
            assert_eq!(g4.coeff(m as i64), Graded::term(c.clone(), 4));
        }
        let g6 = eisenstein(6, 0).unwrap();
        assert_eq!(g6.coeff(0), Graded::term(rat(-1, 42) / int(720), 6));
        assert!(eisenstein(3, 4).is_err());
    }

    #[test]
    fn eisenstein_constant_is_zeta_value() {
        // 2ζ(2k) summed numerically
        for k in 1..=4usize {
            let cut = 200000.0f64;
            let w = 2 * k as i32;
            let partial: f64 = (1..200000).map(|n| (n as f64).powi(-w)).sum();
            let direct = 2.0 * (partial + (cut - 0.5).powi(1 - w) / (w as f64 - 1.0));
            let c = eisenstein(2 * k, 0).unwrap().coeff(0).to_complex();
            assert!((c.re - direct).abs() < 1e-9 && c.im.abs() < 1e-12, "k={k}");
        }
    }

    // Σ_{(m,n)≠0} (mτ+n)^{-w}: inner sums to |n| ≤ 2000 with a midpoint
    // integral for the two tails; rows decay like |q|^|m|.
    fn lattice_sum(w: i32, tau: Complex64) -> Complex64 {
        let cut = 2000i64;
        let mut total = Complex64::new(0.0, 0.0);
        for m in -12i64..=12 {
            let x = tau * m as f64;
            for n in -cut..=cut {
                if m == 0 && n == 0 {
                    continue;
                }
                total += (x + n as f64).powi(-w);
            }
            let h = cut as f64 + 0.5;
            total += ((x + h).powi(1 - w) - (x - h).powi(1 - w)) / (w as f64 - 1.0);
        }
        total
    }

    #[test]
    fn eisenstein_matches_lattice_sum() {
        let tau = Complex64::new(0.0, 1.3);
        for k in 2..=5usize {
            let (v, tail) = eisenstein(2 * k, 40).unwrap().eval(tau).unwrap();
            let direct = lattice_sum(2 * k as i32, tau);
            let scale = v.norm().max(1.0);
            assert!((v - direct).norm() / scale < 1e-8 + tail, "k={k}: {v} vs {direct}");
        }
    }

    #[test]
    fn eta_inverse_counts_partitions() {
        let e = eta_power(-1, 20).unwrap();
        assert_eq!(e.offset(), &rat(-1, 24));
        for (m, p) in partitions(20).into_iter().enumerate() {
            assert_eq!(e.coeff(m as i64), Graded::int(p as i64));
        }
        let prod = eta_power(24, 10).unwrap().mul(&eta_power(-24, 10).unwrap());
        assert!(prod.agrees_to(&QExpansion::one(10), 10));
        assert_eq!(eta_power(-24, 3).unwrap().offset(), &int(-1));
    }

    #[test]
    fn dtau_examples() {
        let n = 12;
        // (2πi) q/(1-q)^2 = (2πi) Σ m q^m
        let d1 = dtau_inverse_factor(1, 1, n).unwrap();
        for m in 0..=n {
            assert_eq!(d1.coeff(m), Graded::term(int(m), 1));
        }
        // (2πi)^2 (q/(1-q)^2 + 2q^2/(1-q)^3) = (2πi)^2 Σ m^2 q^m
        let d2 = dtau_inverse_factor(1, 2, n).unwrap();
        for m in 0..=n {
            assert_eq!(d2.coeff(m), Graded::term(int(m * m), 2));
        }
        let d0 = dtau_inverse_factor(2, 0, n).unwrap();
        for m in 0..=n {
            assert_eq!(d0.coeff(m), Graded::int(i64::from(m % 2 == 0)));
        }
    }

    #[test]
    fn derivative_identities_to_order_30() {
        for k in [1i64, 2, 3, -1, -2, -3] {
            for n in 0..=5u32 {
                let direct = dtau_inverse_factor(k, n, 30).unwrap();
                let closed = dtau_inverse_factor_closed(k, n, 30).unwrap();
                assert!(direct.agrees_to(&closed, 30), "closed form k={k} n={n}");
                if n >= 1 {
                    assert!(direct.agrees_to(&deriv_iden_rhs(k, n, 30).unwrap(), 30), "recursion k={k} n={n}");
                }
                let prod = inverse_factor_power(k, n, 30).unwrap();
                let via = inverse_factor_power_from_derivatives(k, n, 30).unwrap();
                assert!(prod.agrees_to(&via, 30), "inverse basis k={k} l={n}");
            }
        }
    }

    #[test]
    fn tau_derivative_of_inverse_factor_matches_recursion_n1() {
        for k in 1..=3 {
            let lhs = inverse_factor(k, 3 * k).unwrap().tau_derivative();
            let rhs = deriv_iden_rhs(k, 1, 3 * k).unwrap();
            assert!(lhs.agrees_to(&rhs, 3 * k));
        }
    }
}
