use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    cholesky_lower, cholesky_upper, inverse_hermitian_pd, invert_lower_triangular, invert_upper_triangular,
    log_det_hermitian_pd, Algebra, Hermitian, Matrix,
};
use crate::error::{Error, Result};
use crate::hwv::{log_q_kappa_of_inverse, log_q_kappa_via_ldl, WeightVector};
use crate::specfun::{log_c_beta, log_k_beta, log_mv_gamma, log_mv_gamma_weighted, weighted_gamma_violations, Sign};

/// The weight convention: type I weights act on the leading minors of the
/// argument, type II on those of its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    I,
    II,
}

impl Variant {
    pub fn sign(self) -> Sign {
        match self {
            Variant::I => Sign::Plus,
            Variant::II => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    KotzRiesz,
    Riesz,
    Pearson,
    TRiesz,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    KotzRieszI,
    KotzRieszII,
    RieszI,
    RieszII,
    PearsonIIRieszI,
    PearsonIIRieszII,
    TRieszI,
    TRieszII,
    BetaRiesz2C,
    BetaRiesz2K,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::KotzRieszI,
        Family::KotzRieszII,
        Family::RieszI,
        Family::RieszII,
        Family::PearsonIIRieszI,
        Family::PearsonIIRieszII,
        Family::TRieszI,
        Family::TRieszII,
        Family::BetaRiesz2C,
        Family::BetaRiesz2K,
    ];

    pub fn kind(self) -> Kind {
        match self {
            Family::KotzRieszI | Family::KotzRieszII => Kind::KotzRiesz,
            Family::RieszI | Family::RieszII => Kind::Riesz,
            Family::PearsonIIRieszI | Family::PearsonIIRieszII => Kind::Pearson,
            Family::TRieszI | Family::TRieszII => Kind::TRiesz,
            Family::BetaRiesz2C | Family::BetaRiesz2K => Kind::Beta,
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Family::KotzRieszI | Family::RieszI | Family::PearsonIIRieszI | Family::TRieszI | Family::BetaRiesz2C => {
                Variant::I
            }
            _ => Variant::II,
        }
    }

    pub fn from_parts(kind: Kind, variant: Variant) -> Family {
        use Family::*;
        match (kind, variant) {
            (Kind::KotzRiesz, Variant::I) => KotzRieszI,
            (Kind::KotzRiesz, Variant::II) => KotzRieszII,
            (Kind::Riesz, Variant::I) => RieszI,
            (Kind::Riesz, Variant::II) => RieszII,
            (Kind::Pearson, Variant::I) => PearsonIIRieszI,
            (Kind::Pearson, Variant::II) => PearsonIIRieszII,
            (Kind::TRiesz, Variant::I) => TRieszI,
            (Kind::TRiesz, Variant::II) => TRieszII,
            (Kind::Beta, Variant::I) => BetaRiesz2C,
            (Kind::Beta, Variant::II) => BetaRiesz2K,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::KotzRieszI => "KotzRieszI",
            Family::KotzRieszII => "KotzRieszII",
            Family::RieszI => "RieszI",
            Family::RieszII => "RieszII",
            Family::PearsonIIRieszI => "PearsonIIRieszI",
            Family::PearsonIIRieszII => "PearsonIIRieszII",
            Family::TRieszI => "TRieszI",
            Family::TRieszII => "TRieszII",
            Family::BetaRiesz2C => "BetaRiesz2C",
            Family::BetaRiesz2K => "BetaRiesz2K",
        }
    }

    /// Whether draws are Hermitian `m x m` matrices rather than `n x m`.
    pub fn is_hermitian_valued(self) -> bool {
        matches!(self.kind(), Kind::Riesz | Kind::Beta)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Raw parameters of a distribution, before validation.
///
/// `theta` is the `n x n` row scale for Kotz-Riesz families and the `m x m`
/// scale of the nonstandardized beta-Riesz families.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecParams {
    pub family: Family,
    pub alg: Algebra,
    pub n: Option<usize>,
    pub m: usize,
    pub nu: Option<f64>,
    pub a: Option<f64>,
    pub kappa: WeightVector,
    pub tau: Option<WeightVector>,
    pub mu: Option<Matrix>,
    pub sigma: Option<Matrix>,
    pub theta: Option<Matrix>,
    pub xi: Option<Matrix>,
    pub delta: Option<Matrix>,
    pub pi: Option<Matrix>,
}

impl SpecParams {
    /// Standard-form parameters with zero weights; scale matrices absent.
    pub fn standard(family: Family, alg: Algebra, n: usize, m: usize) -> Self {
        let kind = family.kind();
        SpecParams {
            family,
            alg,
            n: (kind != Kind::Riesz).then_some(n),
            m,
            nu: matches!(kind, Kind::Pearson | Kind::TRiesz | Kind::Beta).then_some(n as f64),
            a: (kind == Kind::Riesz).then_some(n as f64 * alg.b() / 2.0),
            kappa: WeightVector::zeros(m),
            tau: matches!(kind, Kind::Pearson | Kind::TRiesz | Kind::Beta).then(|| WeightVector::zeros(m)),
            mu: None,
            sigma: None,
            theta: None,
            xi: None,
            delta: None,
            pi: None,
        }
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_kappa(mut self, kappa: &[f64]) -> Self {
        self.kappa = WeightVector::new(kappa.to_vec());
        self
    }

    pub fn with_tau(mut self, tau: &[f64]) -> Self {
        self.tau = Some(WeightVector::new(tau.to_vec()));
        self
    }

    /// Every violated constraint, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let kind = self.family.kind();
        let m = self.m;
        let b = self.alg.b();
        if m == 0 {
            out.push("m must be at least 1".to_string());
        }
        let n = match (kind, self.n) {
            (Kind::Riesz, n) => n.unwrap_or(m),
            (_, Some(n)) => n,
            (_, None) => {
                out.push(format!("{} requires n", self.family));
                m
            }
        };
        if kind != Kind::Riesz && n < m {
            out.push(format!("n ≥ m is required (got n = {n}, m = {m})"));
        }
        if self.kappa.len() != m {
            out.push(format!("kappa has {} entries, expected m = {m}", self.kappa.len()));
        }
        let needs_tau = matches!(kind, Kind::Pearson | Kind::TRiesz | Kind::Beta);
        match (&self.tau, needs_tau) {
            (Some(t), true) if t.len() != m => out.push(format!("tau has {} entries, expected m = {m}", t.len())),
            (None, true) => out.push(format!("{} requires tau", self.family)),
            (Some(_), false) => out.push(format!("{} takes no tau", self.family)),
            _ => {}
        }
        match (self.nu, needs_tau) {
            (None, true) => out.push(format!("{} requires nu", self.family)),
            (Some(_), false) => out.push(format!("{} takes no nu", self.family)),
            _ => {}
        }
        match (self.a, kind == Kind::Riesz) {
            (None, true) => out.push("Riesz families require a".to_string()),
            (Some(_), false) => out.push(format!("{} takes no a", self.family)),
            _ => {}
        }

        let allowed: &[&str] = match kind {
            Kind::KotzRiesz => &["mu", "Sigma", "Theta"],
            Kind::Riesz => &["Xi"],
            Kind::Pearson => &[],
            Kind::TRiesz => &["mu", "Delta", "Pi"],
            Kind::Beta => &["Theta"],
        };
        let theta_dim = if kind == Kind::KotzRiesz { n } else { m };
        let slots = [
            ("mu", &self.mu, (n, m), false),
            ("Sigma", &self.sigma, (m, m), true),
            ("Theta", &self.theta, (theta_dim, theta_dim), true),
            ("Xi", &self.xi, (m, m), true),
            ("Delta", &self.delta, (n, n), true),
            ("Pi", &self.pi, (m, m), true),
        ];
        for (name, slot, shape, pd) in slots {
            let Some(mat) = slot else { continue };
            if !allowed.contains(&name) {
                out.push(format!("{} takes no {name}", self.family));
                continue;
            }
            if mat.algebra() != self.alg {
                out.push(format!("{name} has {}, spec has {}", mat.algebra(), self.alg));
                continue;
            }
            if mat.shape() != shape {
                out.push(format!(
                    "{name} must be {}x{}, got {}x{}",
                    shape.0,
                    shape.1,
                    mat.rows(),
                    mat.cols()
                ));
                continue;
            }
            if pd {
                match Hermitian::new(mat.clone()) {
                    Err(e) => out.push(format!("{name}: {e}")),
                    Ok(h) => {
                        if let Err(e) = cholesky_upper(&h) {
                            out.push(format!("{name} must be positive definite: {e}"));
                        }
                    }
                }
            }
        }

        if m == 0 || self.kappa.len() != m {
            return out;
        }
        let sign = self.family.variant().sign();
        let half_n = n as f64 * b / 2.0;
        match kind {
            Kind::KotzRiesz => out.extend(weighted_gamma_violations(self.alg, "nβ/2", half_n, &self.kappa, sign)),
            Kind::Riesz => {
                if let Some(a) = self.a {
                    out.extend(weighted_gamma_violations(self.alg, "a", a, &self.kappa, sign));
                }
            }
            _ => {
                if let Some(nu) = self.nu {
                    out.extend(weighted_gamma_violations(
                        self.alg,
                        "νβ/2",
                        nu * b / 2.0,
                        &self.kappa,
                        sign,
                    ));
                }
                if let Some(tau) = self.tau.as_ref().filter(|t| t.len() == m) {
                    out.extend(weighted_gamma_violations(self.alg, "nβ/2", half_n, tau, sign));
                }
            }
        }
        out
    }
}

/// Factorizations of the scale matrices, computed once.
#[derive(Clone, Debug)]
pub(crate) struct Scales {
    /// Kotz-Riesz: `u(Θ)`, `u(Θ)^{-1}`, `u(Σ)`, `u(Σ)^{-1}`.
    pub kr: Option<KrScales>,
    /// Riesz: `Ξ^{-1}` and the congruence factor used by the sampler.
    pub riesz: Option<RieszScales>,
    /// T-Riesz location-scale: `Δ`, `Π`, `u(Δ)^{-1}` and the right factor of `Π`.
    pub t: Option<TScales>,
    /// Beta-Riesz nonstandardized: `Θ` and its congruence factor.
    pub beta: Option<BetaScales>,
}

#[derive(Clone, Debug)]
pub(crate) struct KrScales {
    pub mu: Matrix,
    pub u_theta: Matrix,
    pub u_theta_inv: Matrix,
    pub u_sigma: Matrix,
    pub u_sigma_inv: Matrix,
}

#[derive(Clone, Debug)]
pub(crate) struct RieszScales {
    pub xi_inv: Hermitian,
    /// `u(Ξ)` for type I, `l(Ξ)` for type II.
    pub factor: Matrix,
}

#[derive(Clone, Debug)]
pub(crate) struct TScales {
    pub mu: Matrix,
    pub delta: Hermitian,
    pub pi: Hermitian,
    pub u_delta_inv: Matrix,
    /// `u(Π)` for type I, `l(Π)` for type II.
    pub pi_factor: Matrix,
    pub general: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct BetaScales {
    pub theta: Hermitian,
    /// `u(Θ)` for the c-variant, `l(Θ)` for the k-variant.
    pub factor: Matrix,
}

/// A validated distribution with its normalizing constant cached.
#[derive(Clone, Debug)]
pub struct DistributionSpec {
    params: SpecParams,
    n: usize,
    tau: WeightVector,
    log_const: f64,
    pub(crate) scales: Scales,
}

fn pd(m: &Option<Matrix>, alg: Algebra, dim: usize) -> Hermitian {
    match m {
        Some(m) => Hermitian::symmetrized(m.clone()),
        None => Hermitian::identity(alg, dim),
    }
}

/// `u(A)` for type I, `l(A)` for type II.
pub(crate) fn variant_factor(a: &Hermitian, variant: Variant) -> Result<Matrix> {
    match variant {
        Variant::I => Ok(cholesky_upper(a)?.into_matrix()),
        Variant::II => cholesky_lower(a),
    }
}

pub(crate) fn invert_variant_factor(f: &Matrix, variant: Variant) -> Result<Matrix> {
    match variant {
        Variant::I => Ok(invert_upper_triangular(&crate::algebra::UpperTriangular::new(f.clone())?)?.into_matrix()),
        Variant::II => invert_lower_triangular(f),
    }
}

/// `log q_κ(A)` for type I, `log q_κ(A^{-1})` for type II.
pub(crate) fn log_q_variant(a: &Hermitian, kappa: &WeightVector, variant: Variant) -> Result<f64> {
    match variant {
        Variant::I => log_q_kappa_via_ldl(a, kappa),
        Variant::II => log_q_kappa_of_inverse(a, kappa),
    }
}

impl DistributionSpec {
    pub fn new(params: SpecParams) -> Result<Self> {
        let v = params.violations();
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let alg = params.alg;
        let m = params.m;
        let b = alg.b();
        let kind = params.family.kind();
        let variant = params.family.variant();
        let n = params.n.unwrap_or(m);
        let tau = params.tau.clone().unwrap_or_else(|| WeightVector::zeros(m));
        let half_n = n as f64 * b / 2.0;
        let mnb2 = (m * n) as f64 * b / 2.0;
        let ln_pi = std::f64::consts::PI.ln();
        let kappa = &params.kappa;
        let sign = variant.sign();
        let signed_sum = match variant {
            Variant::I => kappa.sum(),
            Variant::II => -kappa.sum(),
        };

        let mut scales = Scales {
            kr: None,
            riesz: None,
            t: None,
            beta: None,
        };
        let log_const = match kind {
            Kind::KotzRiesz => {
                let sigma = pd(&params.sigma, alg, m);
                let theta = pd(&params.theta, alg, n);
                let u_sigma = cholesky_upper(&sigma)?;
                let u_theta = cholesky_upper(&theta)?;
                scales.kr = Some(KrScales {
                    mu: params.mu.clone().unwrap_or_else(|| Matrix::zeros(alg, n, m)),
                    u_sigma_inv: invert_upper_triangular(&u_sigma)?.into_matrix(),
                    u_theta_inv: invert_upper_triangular(&u_theta)?.into_matrix(),
                    u_sigma: u_sigma.into_matrix(),
                    u_theta: u_theta.into_matrix(),
                });
                (mnb2 + signed_sum) * b.ln() + log_mv_gamma(m, alg, half_n)?
                    - mnb2 * ln_pi
                    - log_mv_gamma_weighted(alg, half_n, kappa, sign)?
                    - half_n * log_det_hermitian_pd(&sigma)?
                    - (m as f64 * b / 2.0) * log_det_hermitian_pd(&theta)?
            }
            Kind::Riesz => {
                let a = params.a.expect("validated");
                let xi = pd(&params.xi, alg, m);
                scales.riesz = Some(RieszScales {
                    xi_inv: inverse_hermitian_pd(&xi)?,
                    factor: variant_factor(&xi, variant)?,
                });
                (a * m as f64 + signed_sum) * b.ln()
                    - log_mv_gamma_weighted(alg, a, kappa, sign)?
                    - a * log_det_hermitian_pd(&xi)?
                    - log_q_variant(&xi, kappa, variant)?
            }
            Kind::Pearson | Kind::TRiesz | Kind::Beta => {
                let half_nu = params.nu.expect("validated") * b / 2.0;
                // Over the whole cone the kernel integrates to the beta function
                // with shifted weights; on the unit interval no shift arises.
                let kappa = &match kind {
                    Kind::Pearson => kappa.clone(),
                    _ => cone_shift(kappa, alg),
                };
                let log_beta = match variant {
                    Variant::I => log_c_beta(alg, half_nu, kappa, half_n, &tau)?,
                    Variant::II => log_k_beta(alg, half_nu, kappa, half_n, &tau)?,
                };
                if kind == Kind::TRiesz {
                    let delta = pd(&params.delta, alg, n);
                    let pi = pd(&params.pi, alg, m);
                    scales.t = Some(TScales {
                        mu: params.mu.clone().unwrap_or_else(|| Matrix::zeros(alg, n, m)),
                        u_delta_inv: invert_upper_triangular(&cholesky_upper(&delta)?)?.into_matrix(),
                        pi_factor: variant_factor(&pi, variant)?,
                        delta,
                        pi,
                        general: params.mu.is_some() || params.delta.is_some() || params.pi.is_some(),
                    });
                }
                if kind == Kind::Beta {
                    if let Some(theta) = &params.theta {
                        let theta = Hermitian::symmetrized(theta.clone());
                        scales.beta = Some(BetaScales {
                            factor: variant_factor(&theta, variant)?,
                            theta,
                        });
                    }
                }
                if kind == Kind::Beta {
                    -log_beta
                } else {
                    log_mv_gamma(m, alg, half_n)? - mnb2 * ln_pi - log_beta
                }
            }
        };
        Ok(DistributionSpec {
            params,
            n,
            tau,
            log_const,
            scales,
        })
    }

    pub fn params(&self) -> &SpecParams {
        &self.params
    }

    pub fn family(&self) -> Family {
        self.params.family
    }

    pub fn kind(&self) -> Kind {
        self.params.family.kind()
    }

    pub fn variant(&self) -> Variant {
        self.params.family.variant()
    }

    pub fn algebra(&self) -> Algebra {
        self.params.alg
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    /// Row count of draws; equals `m` for the Hermitian-valued families.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> &WeightVector {
        &self.params.kappa
    }

    /// `τ`, zeros for families without a second weight.
    pub fn tau(&self) -> &WeightVector {
        &self.tau
    }

    pub fn nu(&self) -> Option<f64> {
        self.params.nu
    }

    pub fn a(&self) -> Option<f64> {
        self.params.a
    }

    /// Log normalizing constant of the standard-form density, including the
    /// scale-matrix terms that do not depend on the point.
    pub fn log_constant(&self) -> f64 {
        self.log_const
    }

    /// Shape of a draw.
    pub fn point_shape(&self) -> (usize, usize) {
        if self.params.family.is_hermitian_valued() {
            (self.m(), self.m())
        } else {
            (self.n, self.m())
        }
    }

    /// Whether both weight vectors vanish.
    pub fn zero_weights(&self) -> bool {
        self.params.kappa.is_zero() && self.tau.is_zero()
    }

    /// The same parameters under the other weight convention.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        let mut p = self.params.clone();
        p.family = Family::from_parts(self.kind(), variant);
        DistributionSpec::new(p)
    }

    /// Total number of real coordinates of a draw.
    pub fn real_dimension(&self) -> usize {
        let m = self.m();
        let b = self.algebra().beta();
        if self.params.family.is_hermitian_valued() {
            m + b * m * (m - 1) / 2
        } else {
            b * self.n * m
        }
    }
}

/// `κ − ρ` with `ρ_i = β(m + 1 − 2i)/2`. Integrals over the whole cone and
/// division by a triangular root both shift weights by `ρ`.
pub(crate) fn cone_shift(kappa: &WeightVector, alg: Algebra) -> WeightVector {
    let m = kappa.len() as f64;
    WeightVector::new(
        kappa
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &k)| k - alg.b() * (m - 1.0 - 2.0 * i as f64) / 2.0)
            .collect(),
    )
}
