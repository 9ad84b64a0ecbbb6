//! Degree-bounded multivariate polynomials and rational functions, fitted to
//! noisy samples by SVD-based least squares.

pub mod basis;
pub mod fit;
pub mod matrix;
pub mod poly;
pub mod svd;

pub use basis::{monomial_basis, DegreeBounds, Exponents, Side};
pub use fit::{
    build_sample_matrix, fit_polynomial, fit_rational, max_relative_error, poisedness_report,
    FitData, FitReport, Poisedness, DEFAULT_RANK_TOL,
};
pub use matrix::Matrix;
pub use poly::{Polynomial, RationalFunction};
pub use svd::{svd, Svd, SvdError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numerator and denominator use different variables")]
    VariableMismatch,
    #[error("denominator is near zero at the evaluation point")]
    DenominatorNearZero,
    #[error("fitted denominator is identically zero")]
    DegenerateFit,
    #[error("no samples to fit")]
    NoSamples,
    #[error("non-finite sample value")]
    NonFinite,
    #[error(transparent)]
    Svd(#[from] SvdError),
}
