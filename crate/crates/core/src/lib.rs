//! Exact q-expansions of quasi-modular and quasi-Jacobi forms, the zero-mode
//! recursion for torus correlators of vertex operator algebras, and lattice
//! VOA traces used as concrete realizations.
//!
//! Modules:
//! - [`combinatorics`]: Stirling and Eulerian numbers, increasing runs, `C_u` polynomials.
//! - [`qseries`]: exact truncated series in `q` over `Q[(2πi)^±1]`.
//! - [`elliptic`]: `P_k`, `P̃_1`, `g_j^i`, Weierstrass expansions, numerics and the Δ calculus.
//! - [`hha`]: heavy Heisenberg algebra specs and the symbolic reduction engine.
//! - [`lattice`]: even lattices, theta moments, zero-mode traces and a Fock-basis oracle.
//! - [`verify`]: named verification suites producing deterministic reports.

pub mod combinatorics;
pub mod elliptic;
pub mod error;
pub mod exec;
pub mod hha;
pub mod lattice;
pub mod qseries;
pub mod verify;

pub use error::{Error, Result};
