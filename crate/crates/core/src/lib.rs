//! Exact computations with finely graded differential modules over
//! `k[x_1, ..., x_d]`: homology, Tor against `k`, Betti numbers, Gaussian
//! cancellation, free flags and high-low decompositions.
//!
//! Everything is generic over the scalar field through [`Scalar`]; the
//! aliases below fix it to `Q` or `F_p`.

pub mod degrees;
pub mod dmcore;
pub mod error;
pub mod exactla;
pub mod harness;
pub mod homology;
pub mod io;
pub mod structure;
pub mod torbetti;

pub use degrees::{Cap, CellDecomposition, ExtCount, Interval, Multidegree};
pub use dmcore::{
    box_tensor, compress, koszul, BoxDifferentialModule, ComplexLevel, GeneratorSpec, GradedComplex, RingContext,
    TruncateSide, Violation,
};
pub use error::{Error, Result};
pub use exactla::{FieldSpec, Fp, Rational, Scalar, ScalarMatrix};
pub use homology::{homology_at, homology_summary, HomologySummary};
pub use structure::{build_flag, cancel, find_unit_entry, minimize, verify_flag, CancellationStep, FlagOrder};
pub use torbetti::{betti, check_tor_inequality, high_low, tor_k, BettiMethod, BettiResult, BettiWitness};

pub type QModule = BoxDifferentialModule<Rational>;
pub type FpModule = BoxDifferentialModule<Fp>;
pub type QMatrix = ScalarMatrix<Rational>;
pub type FpMatrix = ScalarMatrix<Fp>;
pub type QComplex = GradedComplex<Rational>;
pub type FpComplex = GradedComplex<Fp>;
