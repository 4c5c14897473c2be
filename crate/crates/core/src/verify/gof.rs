//! Agreement between the samplers and the densities: Kolmogorov-Smirnov on
//! scalar reductions, moment comparisons against importance sampling, the
//! Riesz moment identity and the algebraic round trip of the constructions.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{classify, log_det_hermitian_pd, Algebra, Definiteness, Hermitian, Matrix};
use crate::densities::{log_q_variant, variant_factor, DistributionSpec, Family, Kind, SpecParams, Variant};
use crate::error::{Error, Result};
use crate::hwv::WeightVector;
use crate::quad::Quadrature;
use crate::samplers::{map_draws, sample, sample_pair, RngStream};
use crate::specfun::{log_mv_gamma_weighted, log_stiefel_volume};

use super::normalization::{Proposal, MIN_ESS_FRACTION};
use super::report::{Metric, VerificationReport};

/// Significance level of the KS test.
pub const KS_ALPHA: f64 = 0.01;
/// `λ` with Kolmogorov tail probability `KS_ALPHA`.
pub const KS_LAMBDA_CRIT: f64 = 1.627_624;
pub const Z_MAX: f64 = 3.0;
pub const ROUNDTRIP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GofStatistic {
    /// KS on a scalar reduction; `m = 1` only.
    Ks,
    /// `E[tr S]` with `S = X*X`, or `S = V` for Hermitian draws.
    Trace,
    /// `E[log |S|]`.
    Logdet,
    /// `E[s_11 / tr S]`. Bounded, and unlike the trace and the determinant it
    /// sees how the draw is oriented.
    Corner,
}

/// Kolmogorov tail probability `Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Scaling of `D` with Stephens' small-sample correction.
fn ks_lambda(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    (sn + 0.12 + 0.11 / sn) * d
}

/// A scalar statistic of a draw with a density obtained from `logpdf`.
struct ScalarReduction<'a> {
    spec: &'a DistributionSpec,
    /// Support `(lo, ∞)`, `(lo, 1)` or the real line.
    support: Support,
    kind: ReductionKind,
}

#[derive(Clone, Copy)]
enum Support {
    Positive,
    Unit,
    Real,
}

#[derive(Clone, Copy)]
enum ReductionKind {
    /// The single real coordinate of the draw.
    Identity,
    /// `s = X*X` for radial densities, with the Stiefel factor.
    Radial { log_c: f64, e: f64 },
}

impl<'a> ScalarReduction<'a> {
    fn new(spec: &'a DistributionSpec) -> Result<Self> {
        if spec.m() != 1 {
            return Err(Error::Domain(format!(
                "the KS reduction needs m = 1, got m = {}",
                spec.m()
            )));
        }
        let alg = spec.algebra();
        if spec.family().is_hermitian_valued() {
            return Ok(ScalarReduction {
                spec,
                support: Support::Positive,
                kind: ReductionKind::Identity,
            });
        }
        if spec.real_dimension() == 1 && spec.kind() != Kind::Pearson {
            return Ok(ScalarReduction {
                spec,
                support: Support::Real,
                kind: ReductionKind::Identity,
            });
        }
        let p = spec.params();
        let zero = |m: &Option<Matrix>| m.as_ref().is_none_or(|m| m.max_abs() == 0.0);
        let one = |m: &Option<Matrix>| {
            m.as_ref()
                .is_none_or(|m| m.max_abs_diff(&Matrix::identity(alg, m.rows())) == 0.0)
        };
        let radial = match spec.kind() {
            Kind::KotzRiesz => zero(&p.mu) && one(&p.theta),
            Kind::TRiesz => zero(&p.mu) && one(&p.delta),
            _ => true,
        };
        if !radial {
            return Err(Error::Domain(format!(
                "no scalar reduction for {} with a location or row scale",
                spec.family()
            )));
        }
        let n = spec.n();
        Ok(ScalarReduction {
            spec,
            support: if spec.kind() == Kind::Pearson {
                Support::Unit
            } else {
                Support::Positive
            },
            kind: ReductionKind::Radial {
                log_c: log_stiefel_volume(n, 1, alg)? - 2f64.ln(),
                e: n as f64 * alg.b() / 2.0 - 1.0,
            },
        })
    }

    fn statistic(&self, x: &Matrix) -> f64 {
        match self.kind {
            ReductionKind::Identity => x[(0, 0)].re(),
            ReductionKind::Radial { .. } => Hermitian::gram(x).trace(),
        }
    }

    fn pdf(&self, y: f64) -> f64 {
        let alg = self.spec.algebra();
        match self.kind {
            ReductionKind::Identity => self.spec.logpdf_or_neg_inf(&Matrix::from_real(alg, 1, 1, &[y])).exp(),
            ReductionKind::Radial { log_c, e } => {
                if !(y > 0.0) {
                    return 0.0;
                }
                let mut x = Matrix::zeros(alg, self.spec.n(), 1);
                x[(0, 0)] = crate::algebra::Scalar::real(y.sqrt());
                (self.spec.logpdf_or_neg_inf(&x) + log_c + e * y.ln()).exp()
            }
        }
    }

    /// CDF at sorted points by integrating between neighbours, plus the
    /// total mass and the number of nodes used.
    fn cdf_sorted(&self, ys: &[f64]) -> Result<(Vec<f64>, f64, u64)> {
        // Pieces add up to at most 1, so 1e-14 absolute per piece is plenty;
        // thin pieces would never meet the relative test alone.
        let q = Quadrature {
            abs_tol: 1e-4,
            ..Quadrature::with_tol(1e-10)
        };
        let f = |y: f64| self.pdf(y);
        let mut evals = 0u64;
        let first = match self.support {
            Support::Real => q.half_line(0.0, |t| f(ys[0] - t))?,
            Support::Positive | Support::Unit => q.finite(0.0, ys[0], f)?,
        };
        evals += first.evals;
        let mut acc = first.value;
        let mut out = Vec::with_capacity(ys.len());
        out.push(acc);
        for w in ys.windows(2) {
            if w[1] > w[0] {
                let r = q.finite(w[0], w[1], f)?;
                evals += r.evals;
                acc += r.value;
            }
            out.push(acc);
        }
        let last = *ys.last().expect("nonempty");
        let tail = match self.support {
            Support::Unit => q.finite(last, 1.0, f)?,
            _ => q.half_line(last, f)?,
        };
        evals += tail.evals;
        Ok((out, acc + tail.value, evals))
    }
}

/// KS distance between draws of the sampler and the density's CDF.
pub fn ks_check(spec: &DistributionSpec, draws: usize, seed: u64, stream: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let red = ScalarReduction::new(spec)?;
    let mut ys = map_draws(draws, seed, stream, |rng| Ok(red.statistic(&sample(rng, spec)?)))?;
    ys.sort_by(f64::total_cmp);
    let (cdf, total, evals) = red.cdf_sorted(&ys)?;
    let n = ys.len() as f64;
    let d = cdf
        .iter()
        .enumerate()
        .map(|(i, &c)| (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs()))
        .fold(0.0, f64::max);
    let lambda = ks_lambda(d, ys.len());
    let d_crit = d * KS_LAMBDA_CRIT / lambda;
    let r = gof_report(spec, "ks")
        .param("p_value", kolmogorov_q(lambda))
        .param("alpha", KS_ALPHA)
        .param("cdf_total_mass", total)
        .param("quadrature_nodes", evals)
        .count(draws as u64)
        .compare(d, 0.0, Metric::Ks, d_crit, 0.0);
    Ok(r.timed(start.elapsed()))
}

fn gof_report(spec: &DistributionSpec, statistic: &str) -> VerificationReport {
    VerificationReport::new(format!("gof/{statistic}/{}", spec.family()))
        .param("beta", spec.algebra().beta())
        .param("m", spec.m())
        .param("n", spec.n())
        .param("kappa", spec.kappa())
        .param("tau", spec.tau())
        .param("nu", spec.nu())
        .param("a", spec.a())
}

fn moment_value(spec: &DistributionSpec, x: &Matrix, stat: GofStatistic) -> Result<f64> {
    let s = if spec.family().is_hermitian_valued() {
        Hermitian::symmetrized(x.clone())
    } else {
        Hermitian::gram(x)
    };
    match stat {
        GofStatistic::Trace => Ok(s.trace()),
        GofStatistic::Logdet => log_det_hermitian_pd(&s),
        GofStatistic::Corner => Ok(s.as_matrix()[(0, 0)].re() / s.trace()),
        GofStatistic::Ks => unreachable!("moment statistics only"),
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `E[h]` from the sampler against the self-normalized importance estimate
/// built from the density, as z-scores, for each statistic in `stats`. All
/// statistics share the same two sets of draws.
pub fn moment_checks(
    spec: &DistributionSpec,
    stats: &[GofStatistic],
    draws: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<VerificationReport>> {
    if stats.contains(&GofStatistic::Ks) {
        return Err(Error::Domain("KS is not a moment statistic".into()));
    }
    let start = Instant::now();
    let values = |x: &Matrix| -> Result<Vec<f64>> { stats.iter().map(|&st| moment_value(spec, x, st)).collect() };
    let direct = map_draws(draws, seed, stream, |rng| values(&sample(rng, spec)?))?;

    let proposal = Proposal::for_target(spec)?;
    let weighted = map_draws(draws, seed, stream ^ (1 << 32), |rng| {
        let (x, lq) = proposal.draw(rng)?;
        match spec.logpdf(&x) {
            Ok(lp) => Ok(((lp - lq).exp(), values(&x)?)),
            Err(Error::Support(_) | Error::Boundary(_) | Error::NotPositiveDefinite { .. }) => {
                Ok((0.0, vec![0.0; stats.len()]))
            }
            Err(e) => Err(e),
        }
    })?;
    let sw: f64 = weighted.iter().map(|(w, _)| w).sum();
    let sw2: f64 = weighted.iter().map(|(w, _)| w * w).sum();
    let ess = if sw2 > 0.0 { sw * sw / sw2 } else { 0.0 };
    if !(ess >= MIN_ESS_FRACTION * draws as f64) {
        return Err(Error::DegenerateProposal {
            ess,
            draws: draws as u64,
        });
    }
    let elapsed = start.elapsed() / stats.len() as u32;
    Ok(stats
        .iter()
        .enumerate()
        .map(|(k, &st)| {
            let col: Vec<f64> = direct.iter().map(|v| v[k]).collect();
            let (m1, se1) = mean_se(&col);
            let m2 = weighted.iter().map(|(w, h)| w * h[k]).sum::<f64>() / sw;
            let se2 = weighted
                .iter()
                .map(|(w, h)| (w * (h[k] - m2)).powi(2))
                .sum::<f64>()
                .sqrt()
                / sw;
            let sigma = (se1 * se1 + se2 * se2).sqrt();
            let name = match st {
                GofStatistic::Trace => "trace",
                GofStatistic::Logdet => "logdet",
                _ => "corner",
            };
            gof_report(spec, name)
                .param("sampler_mean", m1)
                .param("sampler_se", se1)
                .param("importance_mean", m2)
                .param("importance_se", se2)
                .param("ess", ess)
                .param("proposal", proposal.name())
                .count(2 * draws as u64)
                .compare(m1, m2, Metric::ZScore, Z_MAX, sigma)
                .timed(elapsed)
        })
        .collect())
}

/// Either statistic through one entry point.
pub fn gof_sampler_vs_density(
    spec: &DistributionSpec,
    draws: usize,
    stat: GofStatistic,
    seed: u64,
    stream: u64,
) -> Result<VerificationReport> {
    match stat {
        GofStatistic::Ks => ks_check(spec, draws, seed, stream),
        _ => Ok(moment_checks(spec, &[stat], draws, seed, stream)?.remove(0)),
    }
}

/// `log E[q_τ(V)]` (type I) or `log E[q_τ(V^{-1})]` (type II) for a Riesz
/// draw: `β^{∓Στ} Γ_m[a, ±(κ+τ)] / Γ_m[a, ±κ]` times the scale factor.
pub fn riesz_log_moment(spec: &DistributionSpec, tau: &WeightVector) -> Result<f64> {
    if spec.kind() != Kind::Riesz {
        return Err(Error::Domain(format!("{} is not a Riesz family", spec.family())));
    }
    let alg = spec.algebra();
    let a = spec.a().expect("validated");
    let variant = spec.variant();
    let sign = variant.sign();
    let kappa = spec.kappa();
    let xi = match &spec.params().xi {
        Some(x) => Hermitian::symmetrized(x.clone()),
        None => Hermitian::identity(alg, spec.m()),
    };
    let s = match variant {
        Variant::I => -tau.sum(),
        Variant::II => tau.sum(),
    };
    Ok(s * alg.b().ln() + log_mv_gamma_weighted(alg, a, &(kappa + tau), sign)?
        - log_mv_gamma_weighted(alg, a, kappa, sign)?
        + log_q_variant(&xi, tau, variant)?)
}

/// Sample mean of `q_τ(V)` (or `q_τ(V^{-1})`) against [`riesz_log_moment`].
pub fn riesz_moment_check(
    spec: &DistributionSpec,
    tau: &WeightVector,
    draws: usize,
    seed: u64,
    stream: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let reference = riesz_log_moment(spec, tau)?.exp();
    let vals = map_draws(draws, seed, stream, |rng| {
        let v = Hermitian::symmetrized(sample(rng, spec)?);
        Ok(log_q_variant(&v, tau, spec.variant())?.exp())
    })?;
    let (mean, se) = mean_se(&vals);
    let r = gof_report(spec, "riesz-moment")
        .param("moment_weights", tau)
        .param("std_error", se)
        .count(draws as u64)
        .compare(mean, reference, Metric::ZScore, Z_MAX, se);
    Ok(r.timed(start.elapsed()))
}

/// Fraction of Pearson draws with `I − R*R` positive definite; must be 1.
pub fn pearson_support_check(
    spec: &DistributionSpec,
    draws: usize,
    seed: u64,
    stream: u64,
) -> Result<VerificationReport> {
    if spec.kind() != Kind::Pearson {
        return Err(Error::Domain(format!("{} is not a Pearson family", spec.family())));
    }
    let start = Instant::now();
    let id = Hermitian::identity(spec.algebra(), spec.m());
    let inside = map_draws(draws, seed, stream, |rng| {
        let r = sample(rng, spec)?;
        Ok(classify(&id.try_sub(&Hermitian::gram(&r))?) == Definiteness::PositiveDefinite)
    })?;
    let frac = inside.iter().filter(|&&b| b).count() as f64 / draws as f64;
    let r = gof_report(spec, "pearson-support")
        .count(draws as u64)
        .compare(frac, 1.0, Metric::Absolute, 0.0, 0.0);
    Ok(r.timed(start.elapsed()))
}

/// `T = X f(U)^{-1}` against `T = R f(I − R*R)^{-1}` with
/// `R = X f(U + X*X)^{-1}`, `f` the variant's Cholesky factor, on shared
/// draws plus the `X = 0` edge. The deviation is relative to `max(1, max|T|)`.
pub fn theorem_roundtrip_check(
    seed: u64,
    alg: Algebra,
    n: usize,
    m: usize,
    variant: Variant,
    trials: usize,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let family = Family::from_parts(Kind::TRiesz, variant);
    let spec = DistributionSpec::new(SpecParams::standard(family, alg, n, m).with_nu((n + 2) as f64))?;
    let divide = |x: &Matrix, a: &Hermitian| -> Result<Matrix> {
        let f = variant_factor(a, variant)?;
        Ok(x * &crate::densities::invert_variant_factor(&f, variant)?)
    };
    let id = Hermitian::identity(alg, m);
    let deviation = |x: &Matrix, u: &Hermitian| -> Result<f64> {
        let t = divide(x, u)?;
        let r = divide(x, &u.try_add(&Hermitian::gram(x))?)?;
        let t2 = divide(&r, &id.try_sub(&Hermitian::gram(&r))?)?;
        Ok(t.max_abs_diff(&t2) / t.max_abs().max(1.0))
    };
    let mut rng = RngStream::new(seed, 0x3d00 + (alg.beta() * 64 + n * 8 + m) as u64);
    let mut worst = 0.0_f64;
    let mut edge = f64::NAN;
    for i in 0..trials.max(1) {
        let (x, u) = sample_pair(&mut rng, &spec)?;
        worst = worst.max(deviation(&x, &u)?);
        if i == 0 {
            edge = deviation(&Matrix::zeros(alg, n, m), &u)?;
            worst = worst.max(edge);
        }
    }
    let r = VerificationReport::new("gof/roundtrip")
        .param("beta", alg.beta())
        .param("n", n)
        .param("m", m)
        .param("variant", variant)
        .param("zero_edge_deviation", edge)
        .count(trials as u64)
        .compare(worst, 0.0, Metric::Absolute, ROUNDTRIP_TOL, 0.0);
    Ok(r.timed(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_critical_value() {
        assert!((kolmogorov_q(KS_LAMBDA_CRIT) - KS_ALPHA).abs() < 1e-5);
        assert!(kolmogorov_q(0.1) == 1.0);
    }

    #[test]
    fn cauchy_ks_small() {
        let s = DistributionSpec::new(SpecParams::standard(Family::TRieszI, Algebra::Real, 1, 1).with_nu(1.0)).unwrap();
        let r = ks_check(&s, 5_000, 1, 0).unwrap();
        assert!(r.pass, "{r} {:?}", r.params);
    }

    #[test]
    fn roundtrip_all_algebras() {
        for alg in Algebra::ALL {
            for variant in [Variant::I, Variant::II] {
                let r = theorem_roundtrip_check(3, alg, 2, 2, variant, 50).unwrap();
                assert!(r.pass, "{r}");
            }
        }
    }
}
