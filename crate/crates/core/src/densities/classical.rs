//! Normalizing constants of the classical (unweighted) matrix distributions,
//! written directly in terms of `Γ_m[·]`. Used to check the weighted
//! constants at zero weights.

use std::f64::consts::PI;

use crate::algebra::{log_det_hermitian_pd, Hermitian};
use crate::error::{Error, Result};
use crate::specfun::log_mv_gamma;

use super::spec::{DistributionSpec, Kind};

/// Log constant of the classical counterpart: matrix normal, Wishart-type,
/// Pearson type II, matricvariate T and beta type II. Errors if a weight is
/// nonzero.
pub fn classical_log_constant(spec: &DistributionSpec) -> Result<f64> {
    if !spec.zero_weights() {
        return Err(Error::Unsupported("classical constant needs zero weights".into()));
    }
    let p = spec.params();
    let alg = spec.algebra();
    let b = alg.b();
    let m = spec.m();
    let n = spec.n();
    let mnb2 = (m * n) as f64 * b / 2.0;
    let logdet = |h: &Option<crate::algebra::Matrix>| -> Result<f64> {
        match h {
            Some(x) => log_det_hermitian_pd(&Hermitian::symmetrized(x.clone())),
            None => Ok(0.0),
        }
    };
    Ok(match spec.kind() {
        Kind::KotzRiesz => {
            mnb2 * (b / PI).ln() - n as f64 * b / 2.0 * logdet(&p.sigma)? - m as f64 * b / 2.0 * logdet(&p.theta)?
        }
        Kind::Riesz => {
            let a = spec.a().expect("validated");
            a * m as f64 * b.ln() - log_mv_gamma(m, alg, a)? - a * logdet(&p.xi)?
        }
        Kind::Pearson | Kind::TRiesz => {
            let nu = spec.nu().expect("validated");
            log_mv_gamma(m, alg, (nu + n as f64) * b / 2.0)? - mnb2 * PI.ln() - log_mv_gamma(m, alg, nu * b / 2.0)?
        }
        Kind::Beta => {
            let nu = spec.nu().expect("validated");
            log_mv_gamma(m, alg, (nu + n as f64) * b / 2.0)?
                - log_mv_gamma(m, alg, nu * b / 2.0)?
                - log_mv_gamma(m, alg, n as f64 * b / 2.0)?
        }
    })
}
