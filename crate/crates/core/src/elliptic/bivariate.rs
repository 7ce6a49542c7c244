//! Series `Σ_m layer_m(ζ) q^m` with rational `ζ`-layers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::scalar::{tpi, Graded};

use super::zeta_rational::ZetaRational;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BivariateExpansion {
    layers: Vec<ZetaRational>,
    truncation: usize,
}

/// Value of a numeric evaluation plus a heuristic tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

impl BivariateExpansion {
    pub fn zero(truncation: usize) -> Self {
        BivariateExpansion { layers: vec![ZetaRational::zero(); truncation + 1], truncation }
    }

    /// Layers `0..=N`; layers `m ≥ 1` must be Laurent polynomials.
    pub fn from_layers(layers: Vec<ZetaRational>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("at least one layer required".into()));
        }
        if let Some(m) = layers.iter().skip(1).position(|l| !l.is_laurent()) {
            return Err(Error::InvalidInput(format!("layer {} is not a Laurent polynomial", m + 1)));
        }
        let truncation = layers.len() - 1;
        Ok(BivariateExpansion { layers, truncation })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn layers(&self) -> &[ZetaRational] {
        &self.layers
    }

    pub fn layer(&self, m: usize) -> &ZetaRational {
        &self.layers[m]
    }

    pub fn truncate(&self, n: usize) -> BivariateExpansion {
        let n = n.min(self.truncation);
        BivariateExpansion { layers: self.layers[..=n].to_vec(), truncation: n }
    }

    fn zip(&self, other: &Self, f: impl Fn(&ZetaRational, &ZetaRational) -> ZetaRational) -> Self {
        let n = self.truncation.min(other.truncation);
        BivariateExpansion { layers: (0..=n).map(|m| f(&self.layers[m], &other.layers[m])).collect(), truncation: n }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &Graded) -> Self {
        BivariateExpansion { layers: self.layers.iter().map(|l| l.scale(c)).collect(), truncation: self.truncation }
    }

    /// Adds `c` to the `q^0` layer.
    pub fn add_constant(&self, c: &Graded) -> Self {
        let mut out = self.clone();
        out.layers[0] = out.layers[0].add(&ZetaRational::constant(c.clone()));
        out
    }

    /// `ζ d/dζ`, layerwise.
    pub fn zeta_derivative(&self) -> Self {
        BivariateExpansion { layers: self.layers.iter().map(|l| l.zeta_derivative()).collect(), truncation: self.truncation }
    }

    /// `∂_τ = 2πi q d/dq`.
    pub fn tau_derivative(&self) -> Self {
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(m, l)| l.scale(&Graded::term(crate::qseries::scalar::int(m as i64), 1)))
            .collect();
        BivariateExpansion { layers, truncation: self.truncation }
    }

    /// First layer at which the two expansions differ, up to the common truncation.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.truncation.min(other.truncation);
        (0..=n).find(|&m| self.layers[m] != other.layers[m])
    }

    pub fn agrees_to(&self, other: &Self, n: usize) -> bool {
        self.truncation >= n && other.truncation >= n && (0..=n).all(|m| self.layers[m] == other.layers[m])
    }

    /// Sums the layers at `(z, τ)`; requires `0 ≤ Im z < Im τ` so that
    /// `|q| < |ζ| ≤ 1`.
    pub fn eval_numeric(&self, z: Complex64, tau: Complex64) -> Result<NumericValue> {
        if tau.im <= 0.0 {
            return Err(Error::Region(format!("Im τ = {} must be positive", tau.im)));
        }
        if z.im < 0.0 || z.im >= tau.im {
            return Err(Error::Region(format!("need 0 <= Im z < Im τ, got Im z = {}, Im τ = {}", z.im, tau.im)));
        }
        let zeta = (tpi() * z).exp();
        let q = (tpi() * tau).exp();
        let mut value = self.layers[0].eval(zeta)?;
        let mut qm = Complex64::new(1.0, 0.0);
        let mut last = 0.0f64;
        for m in 1..=self.truncation {
            qm *= q;
            let term = self.layers[m].eval(zeta)? * qm;
            value += term;
            if m + 3 > self.truncation {
                last = last.max(term.norm());
            }
        }
        // the layers decay at least like max(|q|, |q/ζ|)^m
        let ratio = q.norm().max(q.norm() / zeta.norm());
        let error_estimate = if self.truncation == 0 { 0.0 } else { 4.0 * last * ratio / (1.0 - ratio) };
        Ok(NumericValue { value, error_estimate })
    }
}

impl PartialEq for BivariateExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.truncation == other.truncation && self.first_difference(other).is_none()
    }
}
