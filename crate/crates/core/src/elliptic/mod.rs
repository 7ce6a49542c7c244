//! Elliptic functions `P_k`, `P̃_1`, `g_j^i`, Weierstrass expansions, numeric
//! evaluation and the modular anomaly calculus.

pub mod bivariate;
pub mod functions;
pub mod laurent;
pub mod modular;
pub mod numeric;
pub mod symbolic;
pub mod zeta_rational;

pub use bivariate::{BivariateExpansion, NumericValue};
pub use functions::{expansion, g_expansion, p_expansion, p_tilde_1, zeta_derivative, FunctionId};
pub use laurent::{g1m_integration_constant, g1m_integration_polynomial, g1m_z_expansion, wp_laurent, ZSeries};
pub use modular::{
    delta_anomaly, delta_numeric, derived_delta, descriptor, residual, verify_modular, ModularReport, Sl2z,
    TransformDescriptor,
};
pub use numeric::{eval_function, eval_reduced, eisenstein_numeric, lambert_g, ReducedValue, NUMERIC_ORDER};
pub use symbolic::{Atom, Monomial, Poly};
pub use zeta_rational::ZetaRational;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;

/// Least-squares fit of `g_1^m(z+λτ) - g_1^m(z)`, `λ = 1..=m+4`, by a
/// polynomial in `λ` of degree `≤ m+1` without constant term. Returns the
/// largest relative residual.
pub fn shift_polynomiality_residual(m: u32, z: Complex64, tau: Complex64) -> Result<f64> {
    let base = lambert_g(m, 1, z, tau)?;
    let lambdas: Vec<f64> = (1..=m + 4).map(|l| l as f64).collect();
    let mut ys = Vec::new();
    for &l in &lambdas {
        ys.push(lambert_g(m, 1, z + tau * l, tau)? - base);
    }
    let deg = (m + 1) as usize;
    // least squares in the basis λ, λ², …, λ^deg
    let design = DMatrix::from_fn(lambdas.len(), deg, |r, c| Complex64::new(lambdas[r].powi(c as i32 + 1), 0.0));
    let rhs = DVector::from_vec(ys.clone());
    let coeffs = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
    let fit = &design * &coeffs;
    let scale = ys.iter().map(|y| y.norm()).fold(1.0, f64::max);
    Ok((fit - rhs).iter().map(|d| d.norm() / scale).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g1m_shifts_are_polynomial_in_lambda() {
        let tau = Complex64::new(0.1, 1.1);
        let z = Complex64::new(0.23, 0.31);
        for m in 1..=3 {
            let r = shift_polynomiality_residual(m, z, tau).unwrap();
            assert!(r < 1e-5, "m={m}: residual {r}");
        }
    }
}
