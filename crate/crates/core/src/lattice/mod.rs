//! Even positive definite lattices and the traces of their lattice VOAs.
//!
//! Directions `h` are given in lattice-basis coordinates (rational), with
//! `⟨h,h⟩ = hᵀ G h = 1`.

mod enumerate;
mod traces;

pub use enumerate::{enumerate_vectors, pairing_profile, PairingProfile, VectorShell};
pub use traces::{
    chi_weight1, colored_partition_counts, eval_trace_numeric, fock_trace_oracle, quasimod_rhs, theta_moment, ETA_ORDER,
};

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::scalar::{format_rational, rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenLattice {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

impl EvenLattice {
    /// Checks symmetry, even diagonal and positive definiteness.
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::InvalidLattice("empty Gram matrix".into()));
        }
        if gram.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidLattice("Gram matrix is not square".into()));
        }
        for i in 0..rank {
            if gram[i][i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!("diagonal entry {i} is odd")));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidLattice(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let lat = EvenLattice { rank, gram };
        if lat.matrix().cholesky().is_none() {
            return Err(Error::InvalidLattice("Gram matrix is not positive definite".into()));
        }
        Ok(lat)
    }

    /// `{"rank": l, "gram": [[...]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            rank: usize,
            gram: Vec<Vec<i64>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.rank != raw.gram.len() {
            return Err(Error::InvalidLattice(format!("rank {} but {} Gram rows", raw.rank, raw.gram.len())));
        }
        EvenLattice::new(raw.gram)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rank": self.rank, "gram": self.gram })
    }

    /// Cartan matrix of E8, Bourbaki numbering (2 attached to 4, chain 1-3-4-5-6-7-8).
    pub fn e8() -> Self {
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)] {
            g[a - 1][b - 1] = -1;
            g[b - 1][a - 1] = -1;
        }
        EvenLattice { rank: 8, gram: g }
    }

    /// Orthogonal sum of `k` copies.
    pub fn power(&self, k: usize) -> Self {
        let n = self.rank * k;
        let mut g = vec![vec![0i64; n]; n];
        for b in 0..k {
            for i in 0..self.rank {
                for j in 0..self.rank {
                    g[b * self.rank + i][b * self.rank + j] = self.gram[i][j];
                }
            }
        }
        EvenLattice { rank: n, gram: g }
    }

    pub fn e8x3() -> Self {
        EvenLattice::e8().power(3)
    }

    /// `e8`, `e8x3` or a path to a lattice JSON file.
    pub fn preset_or_file(name: &str) -> Result<Self> {
        match name {
            "e8" => Ok(EvenLattice::e8()),
            "e8x3" => Ok(EvenLattice::e8x3()),
            path => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?;
                EvenLattice::from_json(&text)
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rank, self.rank, |i, j| self.gram[i][j] as f64)
    }

    pub fn norm(&self, x: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += x[i] * self.gram[i][j] * x[j];
            }
        }
        s
    }

    /// `⟨h, α⟩ = hᵀ G α`.
    pub fn pairing(&self, h: &[BigRational], alpha: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.rank {
            if h[i].is_zero() {
                continue;
            }
            let gi: i64 = (0..self.rank).map(|j| self.gram[i][j] * alpha[j]).sum();
            s += &h[i] * BigRational::from_integer(gi.into());
        }
        s
    }

    pub fn rational_norm(&self, h: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                if self.gram[i][j] != 0 {
                    s += &h[i] * &h[j] * BigRational::from_integer(self.gram[i][j].into());
                }
            }
        }
        s
    }

    /// Errors unless `h` has the right length and `⟨h,h⟩ = 1`.
    pub fn check_direction(&self, h: &[BigRational]) -> Result<()> {
        if h.len() != self.rank {
            return Err(Error::InvalidInput(format!("direction has {} entries, rank is {}", h.len(), self.rank)));
        }
        let n = self.rational_norm(h);
        if !n.is_one() {
            return Err(Error::NonUnitDirection(format_rational(&n)));
        }
        Ok(())
    }

    /// Connected components of the Gram graph (indices sorted, components ordered by first index).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.rank];
        let mut out = Vec::new();
        for s in 0..self.rank {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let i = comp[k];
                for j in 0..self.rank {
                    if !seen[j] && self.gram[i][j] != 0 {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn sublattice(&self, idx: &[usize]) -> EvenLattice {
        let gram = idx.iter().map(|&i| idx.iter().map(|&j| self.gram[i][j]).collect()).collect();
        EvenLattice { rank: idx.len(), gram }
    }
}

/// `h = (α_2 - α_3)/2` in the E8 root basis; a unit vector (an axis of the
/// standard orthonormal frame).
pub fn e8_direction() -> Vec<BigRational> {
    let mut h = vec![BigRational::zero(); 8];
    h[1] = rat(1, 2);
    h[2] = rat(-1, 2);
    h
}

/// [`e8_direction`] in the first E8 block of E8³.
pub fn e8x3_direction() -> Vec<BigRational> {
    let mut h = e8_direction();
    h.resize(24, BigRational::zero());
    h
}

/// Preset unit direction for the E8 and E8³ presets.
pub fn default_direction(lat: &EvenLattice) -> Result<Vec<BigRational>> {
    if *lat == EvenLattice::e8() {
        return Ok(e8_direction());
    }
    if *lat == EvenLattice::e8x3() {
        return Ok(e8x3_direction());
    }
    Err(Error::InvalidInput("no default direction for this lattice; pass --direction".into()))
}

#[cfg(test)]
mod tests;
