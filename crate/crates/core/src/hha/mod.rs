//! Heavy Heisenberg algebras and the zero-mode recursion.
//!
//! [`spec`] holds the structure tables, [`expr`] the correlator symbols and
//! their linear combinations, [`reduce`] the recursion and its inverse, and
//! [`anomaly`] the modular anomaly of zero-mode correlators.

pub mod anomaly;
pub mod expr;
pub mod reduce;
pub mod spec;
pub mod weight1;

pub use anomaly::{anomaly_in_b_units, anomaly_json, anomaly_of_zero_modes, weight1_anomaly_closed_form};
pub use expr::{in_b_units, parse_zero_modes, CorrExpression, CorrKind, CorrSymbol, Insertion};
pub use reduce::{
    default_positions, invert_to_full, ordered_step, peel_once, reduce_once, reduce_once_ordered,
    reduce_to_zero_modes, step, Reducer, Step,
};
pub use spec::{bracket_conversion, Basis, Generator, HHASpec, HHAState, StructureOut, IDENTITY};
pub use weight1::{configuration_count, weight1_configuration_formula};
