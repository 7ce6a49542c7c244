//! Exact univariate series in `q` over `Q[(2πi)^±1]`.

pub mod named;
pub mod scalar;
pub mod series;

pub use named::{
    bernoulli, dtau_inverse_factor, dtau_inverse_factor_closed, eisenstein, eta_power, inverse_factor,
    sigma, DEFAULT_ORDER,
};
pub use scalar::{Graded, ScaledRational};
pub use series::QExpansion;
