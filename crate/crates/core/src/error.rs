use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible offsets: {0} and {1} do not differ by an integer")]
    IncompatibleOffsets(String, String),
    #[error("leading coefficient {0} is not a unit")]
    NonUnit(String),
    #[error("point outside the expansion region: {0}")]
    Region(String),
    #[error("evaluation too close to a pole: {0}")]
    Pole(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("modular anomaly not available for {0}")]
    NotTabulated(String),
    #[error("structure table closure violation: {0}")]
    Closure(String),
    #[error("inhomogeneous structure entry: {0}")]
    Inhomogeneous(String),
    #[error("spec declares non-commuting zero modes; use the ordered reducer")]
    NonCommuting,
    #[error("missing commutator data: {0}")]
    MissingCommutator(String),
    #[error("lemma a0 cancellation failed: {0}")]
    A0Cancellation(String),
    #[error("residual dependence after anomaly reduction: {0}")]
    ResidualDependence(String),
    #[error("reduction did not terminate: {0}")]
    NonTermination(String),
    #[error("direction vector is not a unit vector: <h,h> = {0}")]
    NonUnitDirection(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("divergent evaluation: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
