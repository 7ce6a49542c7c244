//! Fincke–Pohst enumeration and the `(norm, pairing)` profile of a lattice.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::EvenLattice;
use crate::error::Result;
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorShell {
    pub norm_half: u64,
    pub vectors: Vec<Vec<i64>>,
}

struct Bounds {
    /// `q[i][i] = R_ii²`, `q[i][j] = R_ij / R_ii` for `j > i`, with `G = Rᵀ R`.
    q: Vec<Vec<f64>>,
}

impl Bounds {
    fn new(lat: &EvenLattice) -> Self {
        let l = lat.rank();
        let chol = lat.matrix().cholesky().expect("checked positive definite");
        let r = chol.l().transpose();
        let mut q = vec![vec![0.0; l]; l];
        for i in 0..l {
            q[i][i] = r[(i, i)] * r[(i, i)];
            for j in i + 1..l {
                q[i][j] = r[(i, j)] / r[(i, i)];
            }
        }
        Bounds { q }
    }

    fn center(&self, i: usize, x: &[i64]) -> f64 {
        -(i + 1..x.len()).map(|j| self.q[i][j] * x[j] as f64).sum::<f64>()
    }

    /// Integer range for `x_i` given the budget left.
    fn range(&self, i: usize, x: &[i64], budget: f64) -> (f64, i64, i64) {
        let c = self.center(i, x);
        let w = (budget.max(0.0) / self.q[i][i]).sqrt() + 1e-9;
        (c, (c - w).ceil() as i64, (c + w).floor() as i64)
    }

    fn recurse(&self, lat: &EvenLattice, i: usize, x: &mut Vec<i64>, budget: f64, bound: i64, out: &mut Vec<Vec<i64>>) {
        let (c, lo, hi) = self.range(i, x, budget);
        for v in lo..=hi {
            x[i] = v;
            let used = self.q[i][i] * (v as f64 - c).powi(2);
            if i == 0 {
                if lat.norm(x) <= bound {
                    out.push(x.clone());
                }
            } else {
                self.recurse(lat, i - 1, x, budget - used + 1e-9, bound, out);
            }
        }
        x[i] = 0;
    }
}

/// All vectors with `⟨α,α⟩/2 ≤ max_norm_half`, grouped by shell (every shell
/// from 0 to the bound is present, possibly empty). Vectors are sorted.
pub fn enumerate_vectors(lat: &EvenLattice, max_norm_half: u64, exec: Execution) -> Vec<VectorShell> {
    let l = lat.rank();
    let bound = 2 * max_norm_half as i64;
    let b = Bounds::new(lat);
    let x0 = vec![0i64; l];
    let (c, lo, hi) = b.range(l - 1, &x0, bound as f64);
    let tops: Vec<i64> = (lo..=hi).collect();
    let parts = exec.map(tops, |v| {
        let mut x = vec![0i64; l];
        x[l - 1] = v;
        let mut out = Vec::new();
        if l == 1 {
            if lat.norm(&x) <= bound {
                out.push(x);
            }
            return out;
        }
        let used = b.q[l - 1][l - 1] * (v as f64 - c).powi(2);
        b.recurse(lat, l - 2, &mut x, bound as f64 - used + 1e-9, bound, &mut out);
        out
    });
    let mut shells: Vec<VectorShell> =
        (0..=max_norm_half).map(|n| VectorShell { norm_half: n, vectors: Vec::new() }).collect();
    for v in parts.into_iter().flatten() {
        let n = (lat.norm(&v) / 2) as usize;
        shells[n].vectors.push(v);
    }
    for s in &mut shells {
        s.vectors.sort_unstable();
    }
    shells
}

/// Number of vectors with `(⟨α,α⟩/2, ⟨h,α⟩)` for all shells up to `max_norm_half`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingProfile {
    pub rank: usize,
    pub max_norm_half: u64,
    pub counts: BTreeMap<(u64, BigRational), BigInt>,
}

impl PairingProfile {
    /// `Σ_α ⟨h,α⟩^p` over the shell `n`.
    pub fn moment(&self, n: u64, p: u32) -> BigRational {
        self.counts
            .iter()
            .filter(|((m, _), _)| *m == n)
            .map(|((_, x), c)| num_traits::pow(x.clone(), p as usize) * BigRational::from_integer(c.clone()))
            .sum()
    }

    pub fn shell_size(&self, n: u64) -> BigInt {
        self.counts.iter().filter(|((m, _), _)| *m == n).map(|(_, c)| c.clone()).sum()
    }
}

fn shell_counts(lat: &EvenLattice, n: u64, exec: Execution) -> Vec<BigInt> {
    enumerate_vectors(lat, n, exec).iter().map(|s| BigInt::from(s.vectors.len())).collect()
}

/// Exact profile. Orthogonal blocks not touched by `h` contribute only their
/// shell sizes, so only the blocks meeting the support of `h` are enumerated
/// with pairings.
pub fn pairing_profile(lat: &EvenLattice, h: &[BigRational], max_norm_half: u64, exec: Execution) -> Result<PairingProfile> {
    lat.check_direction(h)?;
    let blocks = lat.blocks();
    let (active, inactive): (Vec<_>, Vec<_>) = blocks.into_iter().partition(|b| b.iter().any(|&i| !h[i].is_zero()));
    let act_idx: Vec<usize> = active.into_iter().flatten().collect();
    let act = lat.sublattice(&act_idx);
    // the pairing only involves active coordinates
    let h_act: Vec<BigRational> = act_idx.iter().map(|&i| h[i].clone()).collect();
    let mut counts: BTreeMap<(u64, BigRational), BigInt> = BTreeMap::new();
    for shell in enumerate_vectors(&act, max_norm_half, exec) {
        for v in &shell.vectors {
            *counts.entry((shell.norm_half, act.pairing(&h_act, v))).or_insert_with(BigInt::zero) += 1;
        }
    }
    let mut memo: HashMap<Vec<Vec<i64>>, Vec<BigInt>> = HashMap::new();
    for b in inactive {
        let sub = lat.sublattice(&b);
        let theta = memo.entry(sub.gram().to_vec()).or_insert_with(|| shell_counts(&sub, max_norm_half, exec)).clone();
        let mut next: BTreeMap<(u64, BigRational), BigInt> = BTreeMap::new();
        for ((n, p), c) in &counts {
            for (m, t) in theta.iter().enumerate() {
                let tot = n + m as u64;
                if tot > max_norm_half {
                    break;
                }
                if t.is_zero() {
                    continue;
                }
                *next.entry((tot, p.clone())).or_insert_with(BigInt::zero) += c * t;
            }
        }
        counts = next;
    }
    Ok(PairingProfile { rank: lat.rank(), max_norm_half, counts })
}
