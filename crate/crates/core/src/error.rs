use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("beta must be 1, 2, or 4 (got {0})")]
    InvalidBeta(u32),

    #[error("scalar has {got} components, algebra with beta={beta} needs {beta}")]
    ComponentCount { beta: usize, got: usize },

    #[error("operands live in different algebras (beta={left} vs beta={right})")]
    AlgebraMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residue {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not upper triangular")]
    NotUpperTriangular,

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point lies outside the support: {0}")]
    Support(String),

    #[error("density undefined at a boundary point: {0}")]
    Boundary(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("ill-conditioned Jacobian (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("degenerate importance proposal: effective sample size {ess:.1} of {draws}")]
    DegenerateProposal { ess: f64, draws: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
