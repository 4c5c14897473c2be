//! Point evaluation of the log densities.
//!
//! Boundary policy. A density factor `|A|^e q_σ(A)` (type I) or
//! `|A|^e q_σ(A^{-1})` (type II) is a product of Cholesky pivots of `A`
//! raised to `e + σ_i` (leading pivots) or `e − σ_i` (trailing pivots). Every
//! pivot is bounded by a diagonal entry, so when `A` is singular positive
//! semidefinite and all those exponents are positive the limit is zero and
//! the log density is `−∞`. If all exponents vanish the factor is identically
//! one. Any other sign pattern diverges or depends on the direction of
//! approach and is reported as `Error::Boundary`. Indefinite arguments lie
//! outside the support.

use crate::algebra::{cholesky_upper, classify, log_det_hermitian_pd, Definiteness, Hermitian, Matrix};
use crate::error::{Error, Result};
use crate::hwv::WeightVector;

use super::spec::{log_q_variant, DistributionSpec, Kind, Variant};

/// `log(|A|^e q_σ(A))` or `log(|A|^e q_σ(A^{-1}))` with the boundary policy.
pub(crate) fn log_power_factor(
    a: &Hermitian,
    e: f64,
    sigma: &WeightVector,
    variant: Variant,
    what: &str,
) -> Result<f64> {
    match classify(a) {
        Definiteness::PositiveDefinite => {
            let ld = if e == 0.0 { 0.0 } else { e * log_det_hermitian_pd(a)? };
            Ok(ld + log_q_variant(a, sigma, variant)?)
        }
        Definiteness::Singular { index } => {
            let exps: Vec<f64> = sigma
                .as_slice()
                .iter()
                .map(|s| match variant {
                    Variant::I => e + s,
                    Variant::II => e - s,
                })
                .collect();
            if exps.iter().all(|&x| x > 0.0) {
                Ok(f64::NEG_INFINITY)
            } else if exps.iter().all(|&x| x == 0.0) {
                Ok(0.0)
            } else {
                Err(Error::Boundary(format!(
                    "{what} is singular (pivot {}) and the pivot exponents {exps:?} are not all positive",
                    index + 1
                )))
            }
        }
        Definiteness::Indefinite { index, pivot } => Err(Error::Support(format!(
            "{what} is not positive semidefinite (pivot {} = {pivot:e})",
            index + 1
        ))),
    }
}

fn check_shape(x: &Matrix, spec: &DistributionSpec) -> Result<()> {
    if x.algebra() != spec.algebra() {
        return Err(Error::AlgebraMismatch {
            left: x.algebra().beta(),
            right: spec.algebra().beta(),
        });
    }
    let want = spec.point_shape();
    if x.shape() != want {
        return Err(Error::DimensionMismatch(format!(
            "point must be {}x{}, got {}x{}",
            want.0,
            want.1,
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

fn check_kind(spec: &DistributionSpec, kind: Kind) -> Result<()> {
    if spec.kind() != kind {
        return Err(Error::Unsupported(format!(
            "{} does not evaluate {kind:?} densities",
            spec.family()
        )));
    }
    Ok(())
}

fn b(spec: &DistributionSpec) -> f64 {
    spec.algebra().b()
}

/// A Hermitian-valued point: non-Hermitian input is rejected, indefinite or
/// singular input is not positive definite unless the boundary policy applies.
fn hermitian_point(x: &Matrix, spec: &DistributionSpec) -> Result<Hermitian> {
    check_shape(x, spec)?;
    Hermitian::new(x.clone())
}

/// Indefinite Hermitian points are reported with the failing Cholesky pivot.
fn pd_error(a: &Hermitian) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Support(_) => cholesky_upper(a).err().unwrap_or(e),
        other => other,
    }
}

pub fn logpdf_kotz_riesz(spec: &DistributionSpec, y: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::KotzRiesz)?;
    check_shape(y, spec)?;
    let s = spec.scales.kr.as_ref().expect("Kotz-Riesz scales");
    let centered = y.try_sub(&s.mu)?;
    let z = &(&s.u_theta_inv.adjoint() * &centered) * &s.u_sigma_inv;
    let q = Hermitian::gram(&z);
    let tr = q.trace();
    let factor = log_power_factor(&q, 0.0, spec.kappa(), spec.variant(), "the quadratic form")?;
    Ok(spec.log_constant() - b(spec) * tr + factor)
}

pub fn logpdf_riesz(spec: &DistributionSpec, v: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::Riesz)?;
    let v = hermitian_point(v, spec)?;
    let s = spec.scales.riesz.as_ref().expect("Riesz scales");
    let m = spec.m() as f64;
    let p = (m - 1.0) * b(spec) / 2.0 + 1.0;
    let a = spec.a().expect("validated");
    let tr = (s.xi_inv.as_matrix() * v.as_matrix()).trace_re();
    let factor = log_power_factor(&v, a - p, spec.kappa(), spec.variant(), "V").map_err(pd_error(&v))?;
    Ok(spec.log_constant() - b(spec) * tr + factor)
}

pub fn logpdf_pearson2_riesz(spec: &DistributionSpec, r: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::Pearson)?;
    check_shape(r, spec)?;
    let m = spec.m();
    let nu = spec.nu().expect("validated");
    let rr = Hermitian::gram(r);
    let inner = Hermitian::identity(spec.algebra(), m).try_sub(&rr)?;
    let e = (nu - m as f64 + 1.0) * b(spec) / 2.0 - 1.0;
    let f1 = log_power_factor(&inner, e, spec.kappa(), spec.variant(), "I − R*R")?;
    let f2 = log_power_factor(&rr, 0.0, spec.tau(), spec.variant(), "R*R")?;
    Ok(spec.log_constant() + f1 + f2)
}

/// Standard T-Riesz density; any location or scale in the spec is ignored.
pub fn logpdf_t_riesz(spec: &DistributionSpec, t: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::TRiesz)?;
    check_shape(t, spec)?;
    let tt = Hermitian::gram(t);
    let id = Hermitian::identity(spec.algebra(), spec.m());
    t_riesz_core(spec, &id, &tt)
}

/// `log[f]` with arguments `Π + Q` and `Q`, before the `Π`/`Δ` prefactors.
fn t_riesz_core(spec: &DistributionSpec, pi: &Hermitian, q: &Hermitian) -> Result<f64> {
    let nu = spec.nu().expect("validated");
    let n = spec.n() as f64;
    let outer = pi.try_add(q)?;
    let neg = -&(spec.kappa() + spec.tau());
    let f1 = log_power_factor(&outer, -(nu + n) * b(spec) / 2.0, &neg, spec.variant(), "Π + Q")?;
    let f2 = log_power_factor(q, 0.0, spec.tau(), spec.variant(), "the quadratic form")?;
    Ok(spec.log_constant() + f1 + f2)
}

/// Location-scale T-Riesz density with `Q = (S−μ)* Δ (S−μ)`.
pub fn logpdf_t_riesz_general(spec: &DistributionSpec, s: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::TRiesz)?;
    check_shape(s, spec)?;
    let sc = spec.scales.t.as_ref().expect("T-Riesz scales");
    let centered = s.try_sub(&sc.mu)?;
    let q = Hermitian::symmetrized(&(&centered.adjoint() * sc.delta.as_matrix()) * &centered);
    let nu = spec.nu().expect("validated");
    let bb = b(spec);
    let pre = nu * bb / 2.0 * log_det_hermitian_pd(&sc.pi)?
        + log_q_variant(&sc.pi, spec.kappa(), spec.variant())?
        + spec.m() as f64 * bb / 2.0 * log_det_hermitian_pd(&sc.delta)?;
    Ok(pre + t_riesz_core(spec, &sc.pi, &q)?)
}

/// Standard beta-Riesz type II density; `Θ` in the spec is ignored.
pub fn logpdf_beta_riesz2(spec: &DistributionSpec, f: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::Beta)?;
    let f = hermitian_point(f, spec)?;
    let id = Hermitian::identity(spec.algebra(), spec.m());
    beta_core(spec, &id, &f)
}

fn beta_core(spec: &DistributionSpec, theta: &Hermitian, z: &Hermitian) -> Result<f64> {
    let m = spec.m() as f64;
    let n = spec.n() as f64;
    let nu = spec.nu().expect("validated");
    let bb = b(spec);
    let f1 =
        log_power_factor(z, (n - m + 1.0) * bb / 2.0 - 1.0, spec.tau(), spec.variant(), "F").map_err(pd_error(z))?;
    let outer = theta.try_add(z)?;
    let neg = -&(spec.kappa() + spec.tau());
    let f2 = log_power_factor(&outer, -(n + nu) * bb / 2.0, &neg, spec.variant(), "Θ + F").map_err(pd_error(&outer))?;
    Ok(spec.log_constant() + f1 + f2)
}

/// Nonstandardized beta-Riesz type II density with scale `Θ` (identity if
/// the spec has none).
pub fn logpdf_beta_riesz2_nonstd(spec: &DistributionSpec, z: &Matrix) -> Result<f64> {
    check_kind(spec, Kind::Beta)?;
    let z = hermitian_point(z, spec)?;
    let Some(sc) = spec.scales.beta.as_ref() else {
        let id = Hermitian::identity(spec.algebra(), spec.m());
        return beta_core(spec, &id, &z);
    };
    let nu = spec.nu().expect("validated");
    let pre =
        nu * b(spec) / 2.0 * log_det_hermitian_pd(&sc.theta)? + log_q_variant(&sc.theta, spec.kappa(), spec.variant())?;
    Ok(pre + beta_core(spec, &sc.theta, &z)?)
}

impl DistributionSpec {
    /// Log density of the family at `x`, using the location and scale
    /// parameters present in the spec.
    pub fn logpdf(&self, x: &Matrix) -> Result<f64> {
        match self.kind() {
            Kind::KotzRiesz => logpdf_kotz_riesz(self, x),
            Kind::Riesz => logpdf_riesz(self, x),
            Kind::Pearson => logpdf_pearson2_riesz(self, x),
            Kind::TRiesz => logpdf_t_riesz_general(self, x),
            Kind::Beta => logpdf_beta_riesz2_nonstd(self, x),
        }
    }

    /// Log density of the standard form: no location, identity scales.
    pub fn logpdf_standard(&self, x: &Matrix) -> Result<f64> {
        match self.kind() {
            Kind::TRiesz => logpdf_t_riesz(self, x),
            Kind::Beta => logpdf_beta_riesz2(self, x),
            _ => self.logpdf(x),
        }
    }

    /// `logpdf` with every error mapped to `−∞`, for integrands.
    pub fn logpdf_or_neg_inf(&self, x: &Matrix) -> f64 {
        self.logpdf(x).unwrap_or(f64::NEG_INFINITY)
    }
}
