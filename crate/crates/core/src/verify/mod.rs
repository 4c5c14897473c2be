//! Numerical verification of the density normalizations, change-of-variables
//! Jacobians, special-function and highest-weight-vector identities, and
//! sampler goodness of fit.

pub mod gof;
pub mod identities;
pub mod jacobian;
pub mod normalization;
pub mod report;
pub mod suite;

pub use gof::{gof_sampler_vs_density, theorem_roundtrip_check, GofStatistic};
pub use identities::identity_suite;
pub use jacobian::{fd_log_abs_det, jacobian_check, Transform, TransformUnderTest};
pub use normalization::{check_normalization, quadrature_mass, Budget, NormMethod};
pub use report::{worst, Metric, VerificationReport};
pub use suite::{criterion_passed, run_suite, run_suite_filtered, SuiteConfig, SuiteEntry, CRITERIA};
