use thiserror::Error;

use crate::dmcore::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("not a complex at this degree: {0}")]
    NotAComplex(String),

    #[error("modules live over different rings or have different differential degrees")]
    Incompatible,

    #[error("operation requires differential degree zero, found {0:?}")]
    NonzeroDifferentialDegree(Vec<i64>),

    #[error("operation requires coordinate {axis} of the differential degree to vanish")]
    NonzeroAxisDegree { axis: usize },

    #[error("axis {axis} out of range for d = {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("operation requires a free module (all caps infinite)")]
    CapsPresent,

    #[error("matrix is not invertible as a graded change of basis")]
    NotInvertible,

    #[error("entry ({row}, {col}) is not a unit")]
    NotAUnit { row: usize, col: usize },

    #[error("flag construction not guaranteed for differential degree {0:?}; supply a flag order manually")]
    PositiveDifferentialDegree(Vec<i64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("homology is zero")]
    ZeroHomology,

    #[error("homology is unbounded in direction {axis}")]
    UnboundedHomology { axis: usize },

    #[error("invalid module: {} violation(s), first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidModule(Vec<Violation>),

    #[error("flag order does not satisfy level(row) < level(col) for every nonzero entry")]
    InvalidFlag,

    #[error("provenance does not reproduce the given module: {0}")]
    ProvenanceMismatch(String),

    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),

    #[error("coefficient field does not match: {0}")]
    FieldMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}
