//! Total mass of a density: deterministic quadrature in low dimension and
//! importance sampling otherwise.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{cholesky_upper, log_det_hermitian_pd, Algebra, Hermitian, Matrix, Scalar};
use crate::densities::{DistributionSpec, Family, Kind, SpecParams};
use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::samplers::{map_draws, sample, uniform, RngStream};
use crate::specfun::{ln_gamma, log_stiefel_volume};

use super::report::{Metric, VerificationReport};

pub const QUADRATURE_TOL: f64 = 1e-4;
/// Pass threshold of the Monte Carlo estimate in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Minimum effective sample size as a fraction of the draws.
pub const MIN_ESS_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    Quadrature,
    ImportanceMc,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Importance-sampling draws; ignored by quadrature.
    pub draws: usize,
    pub seed: u64,
    pub stream: u64,
    /// Overrides the default tolerance (or sigma count for Monte Carlo).
    pub tolerance: Option<f64>,
}

impl Budget {
    pub fn new(draws: usize, seed: u64, stream: u64) -> Self {
        Budget {
            draws,
            seed,
            stream,
            tolerance: None,
        }
    }
}

pub fn check_normalization(spec: &DistributionSpec, method: NormMethod, budget: &Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = match method {
        NormMethod::Quadrature => {
            let (value, evals) = quadrature_mass(spec)?;
            base_report(spec, "quadrature").count(evals).compare(
                value,
                1.0,
                Metric::Absolute,
                budget.tolerance.unwrap_or(QUADRATURE_TOL),
                0.0,
            )
        }
        NormMethod::ImportanceMc => {
            let est = importance_mass(spec, budget)?;
            base_report(spec, "importance-mc")
                .param("std_error", est.std_error)
                .param("ess", est.ess)
                .param("proposal", est.proposal)
                .count(budget.draws as u64)
                .compare(
                    est.mean,
                    1.0,
                    Metric::ZScore,
                    budget.tolerance.unwrap_or(MC_SIGMAS),
                    est.std_error,
                )
        }
    };
    Ok(r.timed(start.elapsed()))
}

fn base_report(spec: &DistributionSpec, method: &str) -> VerificationReport {
    VerificationReport::new(format!("normalization/{}", spec.family()))
        .param("method", method)
        .param("beta", spec.algebra().beta())
        .param("m", spec.m())
        .param("n", spec.n())
        .param("kappa", spec.kappa())
        .param("tau", spec.tau())
        .param("nu", spec.nu())
        .param("a", spec.a())
}

fn is_zero_or_absent(m: &Option<Matrix>) -> bool {
    m.as_ref().is_none_or(|m| m.max_abs() == 0.0)
}

fn is_identity_or_absent(m: &Option<Matrix>) -> bool {
    m.as_ref()
        .is_none_or(|m| m.is_square() && m.max_abs_diff(&Matrix::identity(m.algebra(), m.rows())) == 0.0)
}

fn is_diagonal_or_absent(m: &Option<Matrix>) -> bool {
    m.as_ref()
        .is_none_or(|m| (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].norm() == 0.0)))
}

/// Whether an `m x m` argument enters only through its minors, so that the
/// off-diagonal entry can be integrated over spheres.
fn is_isotropic(spec: &DistributionSpec) -> bool {
    let p = spec.params();
    [&p.sigma, &p.theta, &p.xi, &p.delta, &p.pi]
        .into_iter()
        .all(is_diagonal_or_absent)
}

/// Whether the density of `X` depends on `X` only through `X*X`.
fn is_radial(spec: &DistributionSpec) -> bool {
    let p = spec.params();
    match spec.kind() {
        Kind::KotzRiesz => is_zero_or_absent(&p.mu) && is_identity_or_absent(&p.theta),
        Kind::TRiesz => is_zero_or_absent(&p.mu) && is_identity_or_absent(&p.delta),
        Kind::Pearson => true,
        Kind::Riesz | Kind::Beta => false,
    }
}

/// `∫ f` over `1 x 1` or `2 x 2` Hermitian arguments; the `2 x 2` case runs
/// over the diagonal and then `|s12| < bound(s11, s22)`.
struct Integrator {
    outer: Quadrature,
    inner: Quadrature,
    evals: u64,
    failure: Option<Error>,
}

#[derive(Clone, Copy)]
enum Range {
    HalfLine,
    Unit,
}

impl Integrator {
    fn new() -> Self {
        Integrator {
            outer: Quadrature::with_tol(1e-7),
            // Inner integrals over regions of negligible mass converge in
            // absolute terms; the total is of order one.
            inner: Quadrature {
                abs_tol: 1e-6,
                ..Quadrature::with_tol(1e-8)
            },
            evals: 0,
            failure: None,
        }
    }

    fn line(q: &Quadrature, range: Range, f: impl FnMut(f64) -> f64) -> Result<crate::quad::QuadResult> {
        match range {
            Range::HalfLine => q.half_line(0.0, f),
            Range::Unit => q.finite(0.0, 1.0, f),
        }
    }

    fn scalar(&mut self, range: Range, f: impl Fn(f64) -> f64) -> Result<f64> {
        let r = Self::line(&self.outer, range, f)?;
        self.evals += r.evals;
        Ok(r.value)
    }

    /// Unless `β = 1`, `f` must depend on the off-diagonal entry only through
    /// its modulus (`isotropic`), which is integrated radially with the
    /// sphere area `ω_β`.
    fn hermitian2(
        &mut self,
        alg: Algebra,
        isotropic: bool,
        range: Range,
        bound: impl Fn(f64, f64) -> f64,
        f: impl Fn(&Hermitian) -> f64,
    ) -> Result<f64> {
        let (outer, inner) = (self.outer, self.inner);
        let beta = alg.b();
        let log_sphere = 2f64.ln() + beta / 2.0 * std::f64::consts::PI.ln() - ln_gamma(beta / 2.0);
        let mut evals = 0u64;
        let mut failure = None;
        let r = Self::line(&outer, range, |s11| {
            let mut cell = |s22: f64| {
                let r = bound(s11, s22);
                let at = |z: f64| {
                    let mut a = Matrix::from_diag(alg, &[s11, s22]);
                    a[(0, 1)] = Scalar::real(z);
                    a[(1, 0)] = Scalar::real(z);
                    f(&Hermitian::symmetrized(a))
                };
                // Both signs are the whole sphere when β = 1, needed only if
                // the density is not isotropic.
                match inner.finite(0.0, r, |rho| {
                    let v = if isotropic { at(rho) } else { 0.5 * (at(rho) + at(-rho)) };
                    (log_sphere + (beta - 1.0) * rho.ln()).exp() * v
                }) {
                    Ok(v) => {
                        evals += v.evals;
                        v.value
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            // On the unit range the bound has a kink at s11 + s22 = 1.
            let mid = match range {
                Range::HalfLine => inner.half_line(0.0, &mut cell).map(|r| r.value),
                Range::Unit => inner
                    .finite(0.0, 1.0 - s11, &mut cell)
                    .and_then(|a| Ok(a.value + inner.finite(1.0 - s11, 1.0, &mut cell)?.value)),
            };
            mid.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        })?;
        self.evals += evals;
        if let Some(e) = failure.or(self.failure.take()) {
            return Err(e);
        }
        Ok(r.value)
    }
}

/// Mass and quadrature node count. Supported: total real dimension 1, and
/// radial matrix densities or Hermitian-valued densities at `m ≤ 2`.
pub fn quadrature_mass(spec: &DistributionSpec) -> Result<(f64, u64)> {
    let alg = spec.algebra();
    let m = spec.m();
    let mut q = Integrator::new();
    let hermitian_range = Range::HalfLine;
    let isotropic = is_isotropic(spec);
    if m == 2 && alg != Algebra::Real && !isotropic {
        return Err(unsupported(spec));
    }
    let value = if spec.family().is_hermitian_valued() {
        let f = |h: &Hermitian| spec.logpdf_or_neg_inf(h.as_matrix()).exp();
        match (m, alg) {
            (1, _) => q.scalar(hermitian_range, |x| f(&Hermitian::from_diag(alg, &[x])))?,
            (2, _) => q.hermitian2(alg, isotropic, hermitian_range, |a, b| (a * b).sqrt(), f)?,
            _ => return Err(unsupported(spec)),
        }
    } else if spec.real_dimension() == 1 {
        // Weighted powers of (x − μ)² put a cusp at the location, so each side
        // is a half-line of its own.
        let mu = spec.params().mu.as_ref().map_or(0.0, |m| m[(0, 0)].re());
        let f = |x: f64| spec.logpdf_or_neg_inf(&Matrix::from_real(alg, 1, 1, &[x])).exp();
        let line = Quadrature::with_tol(1e-8);
        let right = line.half_line(0.0, |y| f(mu + y))?;
        let left = line.half_line(0.0, |y| f(mu - y))?;
        q.evals += right.evals + left.evals;
        right.value + left.value
    } else if is_radial(spec) {
        // ∫ g(X*X) dX = Vol(V_{m,n}) 2^{−m} ∫ g(S) |S|^{β(n−m+1)/2 − 1} dS,
        // with g evaluated at X = [u(S); 0].
        let n = spec.n();
        let log_c = log_stiefel_volume(n, m, alg)? - m as f64 * 2f64.ln();
        let e = alg.b() * (n - m + 1) as f64 / 2.0 - 1.0;
        let zero = Matrix::zeros(alg, n - m, m);
        let g = |s: &Hermitian| -> f64 {
            let (Ok(t), Ok(ld)) = (cholesky_upper(s), log_det_hermitian_pd(s)) else {
                return 0.0;
            };
            let x = if n > m {
                t.as_matrix().vstack(&zero)
            } else {
                t.into_matrix()
            };
            (spec.logpdf_or_neg_inf(&x) + log_c + e * ld).exp()
        };
        let range = if spec.kind() == Kind::Pearson {
            Range::Unit
        } else {
            Range::HalfLine
        };
        match (m, alg) {
            (1, _) => q.scalar(range, |s| g(&Hermitian::from_diag(alg, &[s])))?,
            (2, _) => {
                let bound = |a: f64, b: f64| match range {
                    Range::Unit => (a * b).sqrt().min(((1.0 - a) * (1.0 - b)).sqrt()),
                    Range::HalfLine => (a * b).sqrt(),
                };
                q.hermitian2(alg, isotropic, range, bound, g)?
            }
            _ => return Err(unsupported(spec)),
        }
    } else {
        return Err(unsupported(spec));
    };
    Ok((value, q.evals))
}

fn unsupported(spec: &DistributionSpec) -> Error {
    Error::Unsupported(format!(
        "no quadrature rule for {} at m = {}, n = {}, {} with these scales; use importance-mc",
        spec.family(),
        spec.m(),
        spec.n(),
        spec.algebra()
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `(Σw)² / Σw²`.
    pub ess: f64,
    pub proposal: String,
}

/// Proposal density: a zero-weight member of a family with heavy tails, or
/// the uniform box `[−1, 1]^d` for the bounded Pearson support.
pub(super) enum Proposal {
    Family(Box<DistributionSpec>),
    Box { alg: Algebra, rows: usize, cols: usize },
}

impl Proposal {
    pub(super) fn for_target(spec: &DistributionSpec) -> Result<Self> {
        let alg = spec.algebra();
        let m = spec.m();
        let p = spec.params();
        // Smallest Bartlett shape β at zero weights; smaller shapes put
        // numerically singular draws in the sample. Never lighter-tailed
        // than a T or beta target.
        let nu = match spec.nu() {
            Some(t) if matches!(spec.kind(), Kind::TRiesz | Kind::Beta) => (m as f64 + 1.0).min(t),
            _ => m as f64 + 1.0,
        };
        Ok(match spec.kind() {
            Kind::Pearson => Proposal::Box {
                alg,
                rows: spec.n(),
                cols: m,
            },
            Kind::KotzRiesz | Kind::TRiesz => {
                let mut q = SpecParams::standard(Family::TRieszI, alg, spec.n(), m).with_nu(nu);
                q.mu = p.mu.clone();
                if spec.kind() == Kind::KotzRiesz {
                    // KR rows have covariance Θ, columns Σ, component variance 1/(2β);
                    // the T core has spread about sqrt(2/ν) times its scales.
                    q.delta = Some(inverse_or_identity(&p.theta, alg, spec.n())?);
                    let sigma = p.sigma.clone().unwrap_or_else(|| Matrix::identity(alg, m));
                    q.pi = Some(sigma.scale(nu / 2.0));
                } else {
                    q.delta = p.delta.clone();
                    q.pi = p.pi.clone();
                }
                Proposal::Family(Box::new(DistributionSpec::new(q)?))
            }
            Kind::Riesz | Kind::Beta => {
                let mut q = SpecParams::standard(Family::BetaRiesz2C, alg, m, m).with_nu(nu);
                q.theta = Some(match spec.kind() {
                    Kind::Riesz => {
                        let xi = p.xi.clone().unwrap_or_else(|| Matrix::identity(alg, m));
                        xi.scale(spec.a().expect("validated") / alg.b())
                    }
                    _ => p.theta.clone().unwrap_or_else(|| Matrix::identity(alg, m)),
                });
                Proposal::Family(Box::new(DistributionSpec::new(q)?))
            }
        })
    }

    pub(super) fn name(&self) -> String {
        match self {
            Proposal::Family(s) => format!("{} (nu = {}, zero weights)", s.family(), s.nu().unwrap_or(f64::NAN)),
            Proposal::Box { .. } => "uniform box [-1, 1]".into(),
        }
    }

    /// A draw and its proposal log density.
    pub(super) fn draw(&self, rng: &mut RngStream) -> Result<(Matrix, f64)> {
        match self {
            Proposal::Family(s) => {
                let x = sample(rng, s)?;
                let lq = s.logpdf(&x)?;
                Ok((x, lq))
            }
            &Proposal::Box { alg, rows, cols } => {
                let d = rows * cols * alg.beta();
                let c: Vec<f64> = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
                Ok((Matrix::from_coords(alg, rows, cols, &c), -(d as f64) * 2f64.ln()))
            }
        }
    }
}

fn inverse_or_identity(m: &Option<Matrix>, alg: Algebra, dim: usize) -> Result<Matrix> {
    match m {
        Some(m) => Ok(crate::algebra::inverse_hermitian_pd(&Hermitian::symmetrized(m.clone()))?.into_matrix()),
        None => Ok(Matrix::identity(alg, dim)),
    }
}

/// Plain importance-sampling estimate of the total mass.
pub fn importance_mass(spec: &DistributionSpec, budget: &Budget) -> Result<MassEstimate> {
    if budget.draws < 2 {
        return Err(Error::Domain("importance sampling needs at least 2 draws".into()));
    }
    let proposal = Proposal::for_target(spec)?;
    let weights = map_draws(budget.draws, budget.seed, budget.stream, |rng| {
        let (x, lq) = proposal.draw(rng)?;
        Ok(match spec.logpdf(&x) {
            Ok(lp) => (lp - lq).exp(),
            // Outside the support, or on a null boundary set.
            Err(Error::Support(_) | Error::Boundary(_) | Error::NotPositiveDefinite { .. }) => 0.0,
            Err(e) => return Err(e),
        })
    })?;
    let n = weights.len() as f64;
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    let ess = if sum_sq > 0.0 { sum * sum / sum_sq } else { 0.0 };
    if !(ess >= MIN_ESS_FRACTION * n) {
        return Err(Error::DegenerateProposal {
            ess,
            draws: budget.draws as u64,
        });
    }
    Ok(MassEstimate {
        mean,
        std_error: (var / n).sqrt(),
        ess,
        proposal: proposal.name(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: SpecParams) -> DistributionSpec {
        DistributionSpec::new(p).unwrap()
    }

    #[test]
    fn quadrature_examples() {
        let r = Algebra::Real;
        let cauchy = spec(SpecParams::standard(Family::TRieszI, r, 1, 1).with_nu(1.0));
        assert!((quadrature_mass(&cauchy).unwrap().0 - 1.0).abs() < 1e-6);
        let riesz = spec(
            SpecParams::standard(Family::RieszI, r, 2, 2)
                .with_a(3.0)
                .with_kappa(&[1.0, 0.0]),
        );
        assert!((quadrature_mass(&riesz).unwrap().0 - 1.0).abs() < 1e-4);
        let beta = spec(SpecParams::standard(Family::BetaRiesz2C, r, 1, 1).with_nu(1.0));
        assert!((quadrature_mass(&beta).unwrap().0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn importance_small_budget() {
        let s = spec(
            SpecParams::standard(Family::TRieszI, Algebra::Real, 2, 2)
                .with_nu(4.0)
                .with_kappa(&[0.5, 0.2])
                .with_tau(&[0.3, 0.1]),
        );
        let r = check_normalization(&s, NormMethod::ImportanceMc, &Budget::new(50_000, 3, 0)).unwrap();
        assert!(r.pass, "{r} {:?}", r.params);
    }
}
