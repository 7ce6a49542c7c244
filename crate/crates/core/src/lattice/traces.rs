//! Theta moments, the closed-form zero-mode trace, the Fock-basis oracle and
//! numeric evaluation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::enumerate::{pairing_profile, PairingProfile};
use super::EvenLattice;
use crate::combinatorics::binomial;
use crate::error::Result;
use crate::exec::Execution;
use crate::qseries::named::eta_power;
use crate::qseries::scalar::{rat, rational_to_f64, tpi, Graded};
use crate::qseries::series::QExpansion;

impl PairingProfile {
    /// `Σ_α ⟨h,α⟩^{2j} q^{⟨α,α⟩/2}` to `q^N`, `N` the profile bound.
    pub fn theta_moment(&self, two_j: u32) -> QExpansion {
        let n = self.max_norm_half as i64;
        QExpansion::from_fn(BigRational::zero(), 0, n, |m| Graded::rational(self.moment(m as u64, two_j)))
    }

    /// `Σ_j C(n,j) θ_{2j} η^{-(l-1)} (2q d/dq)^{n-j} η^{-1}`, offset `-l/24`.
    pub fn quasimod_rhs(&self, n: u32) -> Result<QExpansion> {
        let order = self.max_norm_half as i64;
        let l = self.rank as i64;
        let rest = eta_power(-(l - 1), order)?;
        let mut d = eta_power(-1, order)?;
        let mut derivs = vec![d.clone()];
        for _ in 0..n {
            d = d.q_d_dq().scale(&BigRational::from_integer(2.into()));
            derivs.push(d.clone());
        }
        let mut out: Option<QExpansion> = None;
        for j in 0..=n {
            let c = BigRational::from_integer(binomial(n as i64, j as i64));
            let term = self.theta_moment(2 * j).mul(&rest).mul(&derivs[(n - j) as usize]).scale(&c);
            out = Some(match out {
                Some(o) => o.add(&term)?,
                None => term,
            });
        }
        Ok(out.expect("j = 0 term"))
    }

    /// `Σ` over Fock labels of `(⟨h,α⟩² + 2Σ(color-1 parts) - 1/12)^n q^{L_0 - l/24}`.
    pub fn fock_oracle(&self, n: u32) -> QExpansion {
        let order = self.max_norm_half;
        let parts = colored_partition_counts(self.rank, order);
        let twelfth = rat(1, 12);
        let mut coeffs = vec![BigRational::zero(); order as usize + 1];
        for ((na, p), ca) in &self.counts {
            let p2 = p * p;
            for ((size, c1), cp) in &parts {
                let level = na + size;
                if level > order {
                    continue;
                }
                let eig = &p2 + BigRational::from_integer(BigInt::from(2 * c1)) - &twelfth;
                coeffs[level as usize] += num_traits::pow(eig, n as usize) * BigRational::from_integer(ca * cp);
            }
        }
        let offset = BigRational::new(BigInt::from(-(self.rank as i64)), BigInt::from(24));
        QExpansion::new(offset, 0, coeffs.into_iter().map(Graded::rational).collect(), order as i64)
    }

    /// `Σ_α e^{2πiz⟨h,α⟩} q^{⟨α,α⟩/2} · η(τ)^{-l}`; the theta sum runs over the
    /// stored shells, `η` is evaluated from an [`ETA_ORDER`]-term series.
    pub fn chi(&self, z: Complex64, tau: Complex64) -> Result<Complex64> {
        let q = (tpi() * tau).exp();
        let mut theta = Complex64::zero();
        for ((n, p), c) in &self.counts {
            let c = c.to_f64().unwrap_or(f64::INFINITY);
            theta += (tpi() * z * rational_to_f64(p)).exp() * q.powu(*n as u32) * c;
        }
        let (eta, _) = eta_power(-(self.rank as i64), ETA_ORDER)?.eval(tau)?;
        Ok(theta * eta)
    }

    /// `θ_{2j}(τ)` summed over the stored shells.
    pub fn theta_moment_numeric(&self, two_j: u32, tau: Complex64) -> Complex64 {
        let q = (tpi() * tau).exp();
        let mut acc = Complex64::zero();
        for n in 0..=self.max_norm_half {
            let m = rational_to_f64(&self.moment(n, two_j));
            if m != 0.0 {
                acc += q.powu(n as u32) * m;
            }
        }
        acc
    }

    /// `Tr a_0^s q^{L_0 - l/24}` for `a = h(-1)1`: `θ_s η^{-l}` (zero for odd `s`).
    pub fn weight1_trace_numeric(&self, s: u32, tau: Complex64) -> Result<Complex64> {
        if s % 2 == 1 {
            return Ok(Complex64::zero());
        }
        let (eta, _) = eta_power(-(self.rank as i64), ETA_ORDER)?.eval(tau)?;
        Ok(self.theta_moment_numeric(s, tau) * eta)
    }

    /// Numeric [`PairingProfile::quasimod_rhs`]: theta moments from the stored
    /// shells, the `η` factors from [`ETA_ORDER`]-term series.
    pub fn quasimod_numeric(&self, n: u32, tau: Complex64) -> Result<Complex64> {
        let l = self.rank as i64;
        let (rest, _) = eta_power(-(l - 1), ETA_ORDER)?.eval(tau)?;
        let mut d = eta_power(-1, ETA_ORDER)?;
        let mut derivs = vec![d.eval(tau)?.0];
        for _ in 0..n {
            d = d.q_d_dq().scale(&BigRational::from_integer(2.into()));
            derivs.push(d.eval(tau)?.0);
        }
        let mut acc = Complex64::zero();
        for j in 0..=n {
            let c = binomial(n as i64, j as i64).to_f64().unwrap_or(f64::INFINITY);
            acc += self.theta_moment_numeric(2 * j, tau) * rest * derivs[(n - j) as usize] * c;
        }
        Ok(acc)
    }
}

/// Series length used for numeric `η` factors; far beyond double precision
/// for `Im τ ≥ 1/2`.
pub const ETA_ORDER: i64 = 60;

/// Counts of `l`-colored partitions by `(size, sum of color-1 parts)`, for
/// sizes up to `max`, by explicit enumeration of the multisets of `(part, color)`.
pub fn colored_partition_counts(colors: usize, max: u64) -> BTreeMap<(u64, u64), BigInt> {
    fn rec(colors: usize, budget: u64, last: (u64, usize), size: u64, c1: u64, out: &mut BTreeMap<(u64, u64), BigInt>) {
        *out.entry((size, c1)).or_insert_with(BigInt::zero) += 1;
        // next item (part, color) must be ≤ last in lexicographic order
        for part in (1..=last.0.min(budget)).rev() {
            let top = if part == last.0 { last.1 } else { colors - 1 };
            for color in 0..=top {
                let c1n = if color == 0 { c1 + part } else { c1 };
                rec(colors, budget - part, (part, color), size + part, c1n, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    if colors > 0 {
        rec(colors, max, (max, colors - 1), 0, 0, &mut out);
    } else {
        out.insert((0, 0), BigInt::from(1));
    }
    out
}

pub fn theta_moment(lat: &EvenLattice, h: &[BigRational], two_j: u32, order: u64, exec: Execution) -> Result<QExpansion> {
    Ok(pairing_profile(lat, h, order, exec)?.theta_moment(two_j))
}

/// `Tr v_0^n q^{L_0 - l/24}` for `v = h[-1]²1`, known to `q^{-l/24 + order}`.
pub fn quasimod_rhs(lat: &EvenLattice, h: &[BigRational], n: u32, order: u64, exec: Execution) -> Result<QExpansion> {
    pairing_profile(lat, h, order, exec)?.quasimod_rhs(n)
}

pub fn fock_trace_oracle(lat: &EvenLattice, h: &[BigRational], n: u32, order: u64, exec: Execution) -> Result<QExpansion> {
    Ok(pairing_profile(lat, h, order, exec)?.fock_oracle(n))
}

/// `χ(τ, z) = Tr e^{2πiz h_0} q^{L_0 - l/24}`, truncated at shell `order`.
pub fn chi_weight1(
    lat: &EvenLattice,
    h: &[BigRational],
    z: Complex64,
    tau: Complex64,
    order: u64,
    exec: Execution,
) -> Result<Complex64> {
    pairing_profile(lat, h, order, exec)?.chi(z, tau)
}

/// Numeric value of a series and its geometric tail estimate.
pub fn eval_trace_numeric(series: &QExpansion, tau: Complex64) -> Result<(Complex64, f64)> {
    series.eval(tau)
}
