//! Log densities of the Kotz-Riesz, Riesz, Pearson type II-Riesz, T-Riesz and
//! beta-Riesz type II families, in both weight conventions.

mod classical;
mod logpdf;
mod spec;

pub use classical::classical_log_constant;
pub use logpdf::{
    logpdf_beta_riesz2, logpdf_beta_riesz2_nonstd, logpdf_kotz_riesz, logpdf_pearson2_riesz, logpdf_riesz,
    logpdf_t_riesz, logpdf_t_riesz_general,
};
pub(crate) use spec::cone_shift;
pub(crate) use spec::{invert_variant_factor, log_q_variant, variant_factor};
pub use spec::{DistributionSpec, Family, Kind, SpecParams, Variant};

#[cfg(test)]
mod tests;
