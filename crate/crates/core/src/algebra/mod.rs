//! Scalars and dense matrices over R, C and H, with the Hermitian
//! factorizations used throughout the crate.

mod decomp;
mod io;
mod matrix;
mod realrep;
mod scalar;

pub use decomp::{
    cholesky_lower, cholesky_upper, classify, det_hermitian_pd, inverse_hermitian_pd, invert_lower_triangular,
    invert_upper_triangular, ldl_decompose, leading_principal_minor_dets, log_det_hermitian_pd, log_leading_pivots,
    log_trailing_pivots, Definiteness, Hermitian, UpperTriangular, HERMITIAN_TOL, PIVOT_TOL,
};
pub use io::{matrix_from_json, matrix_to_json};
pub use matrix::Matrix;
pub use realrep::{log_leading_minors_lu, real_representation};
pub use scalar::{scalar_mul, Algebra, Scalar};
