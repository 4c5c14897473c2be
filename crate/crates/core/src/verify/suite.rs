//! The default verification suite: every check at its default budget, tagged
//! with the acceptance criterion it belongs to.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Hermitian, Matrix};
use crate::densities::{classical_log_constant, DistributionSpec, Family, Kind, SpecParams, Variant};
use crate::error::Result;
use crate::hwv::WeightVector;
use crate::samplers::{sample, RngStream};
use crate::specfun::{log_mv_gamma_weighted, quadrature_gamma_oracle, Sign};

use super::gof::{
    ks_check, moment_checks, pearson_support_check, riesz_moment_check, theorem_roundtrip_check, GofStatistic,
};
use super::identities::{gamma_identity_suite, hwv_identity_suite};
use super::jacobian::{jacobian_check, Transform, TransformUnderTest};
use super::normalization::{check_normalization, Budget, NormMethod};
use super::report::{worst, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub identity_trials: usize,
    pub jacobian_points: usize,
    pub ks_draws: usize,
    pub mc_draws: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            identity_trials: 200,
            jacobian_points: 20,
            ks_draws: 100_000,
            mc_draws: 1_000_000,
        }
    }
}

/// Criterion tags, in order.
pub const CRITERIA: [(u8, &str); 7] = [
    (1, "special-function identities"),
    (2, "highest weight vector identities"),
    (3, "weighted gamma quadrature oracle"),
    (4, "Jacobian propositions"),
    (5, "density normalization"),
    (6, "constructive theorems and goodness of fit"),
    (7, "zero-weight reduction"),
];

type Job = Box<dyn Fn(&SuiteConfig) -> Vec<VerificationReport> + Send + Sync>;

struct Task {
    criterion: u8,
    name: String,
    job: Job,
}

fn task(
    criterion: u8,
    name: impl Into<String>,
    job: impl Fn(&SuiteConfig) -> Vec<VerificationReport> + Send + Sync + 'static,
) -> Task {
    Task {
        criterion,
        name: name.into(),
        job: Box::new(job),
    }
}

fn one(name: &str, r: Result<VerificationReport>) -> Vec<VerificationReport> {
    vec![r.unwrap_or_else(|e| VerificationReport::failed(name, e))]
}

fn real(alg: Algebra, rows: usize, cols: usize, v: &[f64]) -> Matrix {
    Matrix::from_real(alg, rows, cols, v)
}

/// Weights for which every boundary factor vanishes: positive for type I,
/// negative for type II.
pub fn benign_weights(variant: Variant, m: usize, scale: f64) -> WeightVector {
    WeightVector::new(
        (0..m)
            .map(|i| {
                let k = scale * (0.6 - 0.3 * i as f64 / m as f64);
                match variant {
                    Variant::I => k,
                    Variant::II => -k,
                }
            })
            .collect(),
    )
}

/// Parameters with benign nonzero weights and light enough tails for the
/// moment checks.
pub fn benign_params(family: Family, alg: Algebra, n: usize, m: usize) -> SpecParams {
    let v = family.variant();
    let b = alg.b();
    let mut p = SpecParams::standard(family, alg, n, m);
    p.kappa = benign_weights(v, m, 1.0);
    match family.kind() {
        Kind::KotzRiesz => {}
        Kind::Riesz => p.a = Some((m + 1) as f64 * b / 2.0 + 0.5),
        Kind::Pearson => {
            p.nu = Some((n + 2) as f64);
            p.tau = Some(benign_weights(v, m, 0.5));
        }
        Kind::TRiesz | Kind::Beta => {
            p.nu = Some((n + 6) as f64);
            p.tau = Some(benign_weights(v, m, 0.5));
        }
    }
    p
}

/// `benign_params` at `m = n = 2` plus location and scale matrices.
fn scaled_params(family: Family, alg: Algebra, n: usize) -> SpecParams {
    let m = 2;
    let mut p = benign_params(family, alg, n, m);
    let sigma = real(alg, 2, 2, &[1.5, 0.3, 0.3, 0.8]);
    let theta = real(alg, 2, 2, &[1.2, -0.2, -0.2, 0.9]);
    let mu = real(alg, n, m, &[0.5, -1.0, 0.2, 0.3, -0.4, 0.1][..n * m]);
    match family.kind() {
        Kind::KotzRiesz => {
            p.mu = Some(mu);
            p.sigma = Some(sigma);
            p.theta = Some(theta);
        }
        Kind::Riesz => p.xi = Some(sigma),
        Kind::Pearson => {}
        Kind::TRiesz => {
            p.mu = Some(mu);
            p.delta = Some(theta);
            p.pi = Some(sigma);
        }
        Kind::Beta => p.theta = Some(sigma),
    }
    p
}

fn build(p: SpecParams) -> Result<DistributionSpec> {
    DistributionSpec::new(p)
}

fn stream(criterion: u8, index: usize) -> u64 {
    ((criterion as u64) << 24) | index as u64
}

fn criterion_3_points() -> Vec<(usize, f64, Vec<f64>, Sign)> {
    vec![
        (1, 2.5, vec![0.5], Sign::Plus),
        (1, 3.0, vec![1.0], Sign::Minus),
        (1, 1.7, vec![-0.4], Sign::Plus),
        (1, 4.2, vec![2.0], Sign::Minus),
        (1, 0.8, vec![0.6], Sign::Plus),
        (2, 3.0, vec![1.0, 0.0], Sign::Plus),
        (2, 2.5, vec![0.5, -0.25], Sign::Plus),
        (2, 4.0, vec![1.0, 0.5], Sign::Minus),
        (2, 3.5, vec![0.3, 1.2], Sign::Plus),
        (2, 5.0, vec![2.0, -1.0], Sign::Minus),
    ]
}

fn jacobian_dims(t: Transform, alg: Algebra) -> Vec<(usize, usize)> {
    let b = alg.beta();
    match t {
        Transform::Linear => {
            let big = match b {
                1 => (8, 8),
                2 => (8, 4),
                _ => (4, 4),
            };
            vec![(1, 1), (3, 2), (4, 4), big]
        }
        Transform::Polar => vec![(1, 1), (3, 1), (3, 2), (4, 3)],
        _ => vec![(1, 1), (2, 2), (3, 3), (5, 5)],
    }
}

/// Quadrature cases of criterion 5: total real dimension at most 4.
fn quadrature_cases(family: Family) -> Vec<SpecParams> {
    let r = Algebra::Real;
    let mut out = Vec::new();
    if family.is_hermitian_valued() {
        out.push(benign_params(family, Algebra::Quaternion, 2, 1));
        out.push(benign_params(family, r, 3, 2));
        out.push(benign_params(family, Algebra::Complex, 3, 2));
        out.push(scaled_params(family, r, 3));
    } else {
        out.push(benign_params(family, Algebra::Complex, 2, 1));
        out.push(benign_params(family, r, 2, 2));
        out.push(benign_params(family, Algebra::Complex, 2, 2));
        if family.kind() != Kind::Pearson {
            // One real coordinate with location and scales.
            let mut p = benign_params(family, r, 1, 1);
            let s = |x| Some(real(r, 1, 1, &[x]));
            match family.kind() {
                Kind::KotzRiesz => {
                    p.mu = s(0.7);
                    p.sigma = s(2.0);
                    p.theta = s(1.5);
                }
                _ => {
                    p.mu = s(-0.4);
                    p.delta = s(0.6);
                    p.pi = s(1.8);
                }
            }
            out.push(p);
        }
    }
    out
}

fn tasks() -> Vec<Task> {
    let mut t = Vec::new();
    t.push(task(1, "special-function identities", |c| {
        gamma_identity_suite(c.seed, c.identity_trials)
    }));
    t.push(task(2, "highest weight vector identities", |c| {
        hwv_identity_suite(c.seed, c.identity_trials)
    }));

    t.push(task(3, "weighted gamma oracle", |_| {
        criterion_3_points()
            .into_iter()
            .map(|(m, a, k, sign)| {
                let kappa = WeightVector::new(k);
                let r = (|| -> Result<VerificationReport> {
                    let start = Instant::now();
                    let closed = log_mv_gamma_weighted(Algebra::Real, a, &kappa, sign)?;
                    let quad = quadrature_gamma_oracle(m, Algebra::Real, a, &kappa, sign)?;
                    Ok(VerificationReport::new("oracle/weighted-gamma")
                        .param("m", m)
                        .param("a", a)
                        .param("kappa", &kappa)
                        .param("sign", if sign == Sign::Plus { "+" } else { "-" })
                        .compare_log(closed, quad, 1e-5)
                        .timed(start.elapsed()))
                })();
                r.unwrap_or_else(|e| VerificationReport::failed("oracle/weighted-gamma", e))
            })
            .collect()
    }));

    for transform in Transform::ALL {
        for alg in Algebra::ALL {
            for (n, m) in jacobian_dims(transform, alg) {
                let idx = t.len();
                t.push(task(
                    4,
                    format!("jacobian {} β={} n={n} m={m}", transform.name(), alg.beta()),
                    move |c| {
                        let mut rng = RngStream::new(c.seed, stream(4, idx));
                        let reports = (0..c.jacobian_points)
                            .map(|_| {
                                TransformUnderTest::random(transform, alg, n, m, &mut rng)
                                    .and_then(|tut| jacobian_check(&tut))
                                    .unwrap_or_else(|e| {
                                        VerificationReport::failed(format!("jacobian/{}", transform.name()), e)
                                    })
                            })
                            .collect();
                        vec![worst(&format!("jacobian/{}", transform.name()), reports)]
                    },
                ));
            }
        }
    }

    for family in Family::ALL {
        for p in quadrature_cases(family) {
            t.push(task(5, format!("quadrature {family}"), move |c| {
                let b = Budget::new(0, c.seed, 0);
                one(
                    "normalization",
                    build(p.clone()).and_then(|s| check_normalization(&s, NormMethod::Quadrature, &b)),
                )
            }));
        }
        let idx = t.len();
        t.push(task(5, format!("importance {family}"), move |c| {
            let b = Budget::new(c.mc_draws, c.seed, stream(5, idx));
            let n = if family.kind() == Kind::Beta { 3 } else { 2 };
            one(
                "normalization",
                build(scaled_params(family, Algebra::Real, n))
                    .and_then(|s| check_normalization(&s, NormMethod::ImportanceMc, &b)),
            )
        }));
    }

    for alg in Algebra::ALL {
        for variant in [Variant::I, Variant::II] {
            t.push(task(6, format!("round trip β={} {variant:?}", alg.beta()), move |c| {
                [(2, 2), (3, 2), (4, 3)]
                    .into_iter()
                    .map(|(n, m)| {
                        theorem_roundtrip_check(c.seed, alg, n, m, variant, 200)
                            .unwrap_or_else(|e| VerificationReport::failed("gof/roundtrip", e))
                    })
                    .collect()
            }));
        }
    }
    let ks_cases: Vec<SpecParams> = vec![
        SpecParams::standard(Family::TRieszI, Algebra::Real, 1, 1).with_nu(1.0),
        SpecParams::standard(Family::RieszI, Algebra::Real, 1, 1)
            .with_a(2.5)
            .with_kappa(&[0.7]),
        {
            let mut p = SpecParams::standard(Family::RieszII, Algebra::Real, 1, 1)
                .with_a(3.0)
                .with_kappa(&[-0.5]);
            p.xi = Some(real(Algebra::Real, 1, 1, &[2.0]));
            p
        },
        benign_params(Family::KotzRieszI, Algebra::Complex, 2, 1),
        benign_params(Family::PearsonIIRieszII, Algebra::Real, 3, 1),
        benign_params(Family::TRieszII, Algebra::Quaternion, 2, 1),
        benign_params(Family::BetaRiesz2K, Algebra::Real, 2, 1),
    ];
    for p in ks_cases {
        let idx = t.len();
        t.push(task(6, format!("ks {}", p.family), move |c| {
            one(
                "gof/ks",
                build(p.clone()).and_then(|s| ks_check(&s, c.ks_draws, c.seed, stream(6, idx))),
            )
        }));
    }
    for family in [Family::RieszI, Family::RieszII] {
        let idx = t.len();
        t.push(task(6, format!("moment identity {family}"), move |c| {
            let tau = benign_weights(family.variant(), 2, 0.5);
            one(
                "gof/riesz-moment",
                build(scaled_params(family, Algebra::Real, 2))
                    .and_then(|s| riesz_moment_check(&s, &tau, c.mc_draws, c.seed, stream(6, idx))),
            )
        }));
    }
    for family in Family::ALL {
        let idx = t.len();
        t.push(task(6, format!("moments {family}"), move |c| {
            let n = if family.kind() == Kind::Beta { 3 } else { 2 };
            let stats = [GofStatistic::Trace, GofStatistic::Logdet, GofStatistic::Corner];
            build(benign_params(family, Algebra::Real, n, 2))
                .and_then(|s| moment_checks(&s, &stats, c.mc_draws, c.seed, stream(6, idx)))
                .unwrap_or_else(|e| vec![VerificationReport::failed(format!("gof/moments/{family}"), e)])
        }));
    }
    for family in [Family::PearsonIIRieszI, Family::PearsonIIRieszII] {
        let idx = t.len();
        t.push(task(6, format!("support {family}"), move |c| {
            one(
                "gof/pearson-support",
                build(benign_params(family, Algebra::Real, 2, 2))
                    .and_then(|s| pearson_support_check(&s, c.ks_draws, c.seed, stream(6, idx))),
            )
        }));
    }

    for family in Family::ALL {
        if family.variant() == Variant::II {
            continue;
        }
        let idx = t.len();
        t.push(task(7, format!("zero weights {:?}", family.kind()), move |c| {
            zero_weight_reports(family, c.seed, stream(7, idx))
        }));
    }
    t
}

/// Constants against the classical path and type I against type II, over
/// all algebras and a few shapes, with random scales.
fn zero_weight_reports(family: Family, seed: u64, stream: u64) -> Vec<VerificationReport> {
    let mut rng = RngStream::new(seed, stream);
    let mut constants = Vec::new();
    let mut pointwise = Vec::new();
    for alg in Algebra::ALL {
        for (n, m) in [(1, 1), (3, 2), (4, 3)] {
            let r = (|| -> Result<()> {
                let mut p = SpecParams::standard(family, alg, n, m);
                if p.nu.is_some() {
                    p.nu = Some((n + 1) as f64);
                }
                let pd = |rng: &mut RngStream, d: usize| -> Matrix {
                    let c: Vec<f64> = (0..(d + 1) * d * alg.beta()).map(|_| rng.normal()).collect();
                    let g = Matrix::from_coords(alg, d + 1, d, &c);
                    Hermitian::gram(&g)
                        .try_add(&Hermitian::identity(alg, d).scale(0.5))
                        .expect("same shape")
                        .into_matrix()
                };
                let gauss = |rng: &mut RngStream, r: usize, c: usize| {
                    let v: Vec<f64> = (0..r * c * alg.beta()).map(|_| rng.normal()).collect();
                    Matrix::from_coords(alg, r, c, &v)
                };
                match family.kind() {
                    Kind::KotzRiesz => {
                        p.mu = Some(gauss(&mut rng, n, m));
                        p.sigma = Some(pd(&mut rng, m));
                        p.theta = Some(pd(&mut rng, n));
                    }
                    Kind::Riesz => p.xi = Some(pd(&mut rng, m)),
                    Kind::Pearson => {}
                    Kind::TRiesz => {
                        p.mu = Some(gauss(&mut rng, n, m));
                        p.delta = Some(pd(&mut rng, n));
                        p.pi = Some(pd(&mut rng, m));
                    }
                    Kind::Beta => p.theta = Some(pd(&mut rng, m)),
                }
                let one = DistributionSpec::new(p)?;
                let two = one.with_variant(Variant::II)?;
                for s in [&one, &two] {
                    constants.push(
                        VerificationReport::new("zero-weight/constant")
                            .param("family", s.family())
                            .param("beta", alg.beta())
                            .param("m", m)
                            .compare_log(s.log_constant(), classical_log_constant(s)?, 1e-12),
                    );
                }
                for _ in 0..5 {
                    let x = sample(&mut rng, &one)?;
                    pointwise.push(
                        VerificationReport::new("zero-weight/type-i-vs-ii")
                            .param("beta", alg.beta())
                            .param("m", m)
                            .compare_log(one.logpdf(&x)?, two.logpdf(&x)?, 1e-12),
                    );
                }
                Ok(())
            })();
            if let Err(e) = r {
                constants.push(VerificationReport::failed("zero-weight/constant", e));
            }
        }
    }
    let kind = format!("{:?}", family.kind());
    vec![
        worst(&format!("zero-weight/constant/{kind}"), constants),
        worst(&format!("zero-weight/type-i-vs-ii/{kind}"), pointwise),
    ]
}

/// One suite report with its criterion tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub criterion: u8,
    pub task: String,
    #[serde(flatten)]
    pub report: VerificationReport,
}

/// Runs every task (concurrently) and returns the reports in task order.
pub fn run_suite(config: &SuiteConfig) -> Vec<SuiteEntry> {
    run_suite_filtered(config, |_| true)
}

/// Runs the tasks whose criterion passes `keep`.
pub fn run_suite_filtered(config: &SuiteConfig, keep: impl Fn(u8) -> bool) -> Vec<SuiteEntry> {
    let tasks: Vec<Task> = tasks().into_iter().filter(|t| keep(t.criterion)).collect();
    let results: Vec<Vec<SuiteEntry>> = tasks
        .par_iter()
        .map(|t| {
            (t.job)(config)
                .into_iter()
                .map(|report| SuiteEntry {
                    criterion: t.criterion,
                    task: t.name.clone(),
                    report,
                })
                .collect()
        })
        .collect();
    results.into_iter().flatten().collect()
}

/// Whether every report of the criterion passed (and there is at least one).
pub fn criterion_passed(entries: &[SuiteEntry], criterion: u8) -> bool {
    let mut any = false;
    for e in entries.iter().filter(|e| e.criterion == criterion) {
        any = true;
        if !e.report.pass {
            return false;
        }
    }
    any
}
