//! Exact dense linear algebra over Q or a prime field.

mod matrix;
mod scalar;

pub use matrix::{homology_dim, kernel_basis, rank, ScalarMatrix};
pub use scalar::{FieldSpec, Fp, Rational, Scalar, DEFAULT_PRIME, MAX_PRIME};
