//! Randomized checks of the weighted gamma, beta and highest weight vector
//! identities. Every identity is evaluated by two independent formulas.

use std::time::Instant;

use rand::Rng;

use crate::algebra::{inverse_hermitian_pd, log_det_hermitian_pd, Algebra, Hermitian, Matrix, UpperTriangular};
use crate::hwv::{log_q_kappa, log_q_kappa_via_ldl, log_q_star_kappa, WeightVector};
use crate::samplers::RngStream;
use crate::specfun::{gen_pochhammer_signed, log_c_beta, log_k_beta, log_mv_gamma, log_mv_gamma_weighted, Sign};

use super::report::{worst, Metric, VerificationReport};

/// Tolerance of the gamma-function identities.
pub const GAMMA_TOL: f64 = 1e-10;
/// Tolerance of the highest weight vector identities.
pub const HWV_TOL: f64 = 1e-9;
/// Tolerance of the two `q_κ` routes.
pub const ROUTE_TOL: f64 = 1e-10;

pub const MAX_M: usize = 5;

fn int_weights(rng: &mut RngStream, m: usize, max: u32) -> WeightVector {
    WeightVector::new((0..m).map(|_| rng.random_range(0..=max) as f64).collect())
}

fn real_weights(rng: &mut RngStream, m: usize) -> WeightVector {
    WeightVector::new((0..m).map(|_| rng.random_range(-2.0..3.0)).collect())
}

/// Gram matrix of a Gaussian `(m+2) x m` matrix plus `0.1 I`.
pub fn random_pd(rng: &mut RngStream, alg: Algebra, m: usize) -> Hermitian {
    let r = m + 2;
    let coords: Vec<f64> = (0..r * m * alg.beta()).map(|_| rng.normal()).collect();
    let g = Matrix::from_coords(alg, r, m, &coords).scale(1.0 / (r as f64).sqrt());
    Hermitian::gram(&g)
        .try_add(&Hermitian::identity(alg, m).scale(0.1))
        .expect("same shape")
}

/// Upper-triangular matrix with diagonal in `[0.5, 2)`.
fn random_upper(rng: &mut RngStream, alg: Algebra, m: usize) -> Matrix {
    let mut b = Matrix::zeros(alg, m, m);
    for i in 0..m {
        for j in i..m {
            b[(i, j)] = if i == j {
                crate::algebra::Scalar::real(rng.random_range(0.5..2.0))
            } else {
                let c: Vec<f64> = (0..alg.beta()).map(|_| 0.5 * rng.normal()).collect();
                crate::algebra::Scalar::from_components(alg, &c).expect("beta components")
            };
        }
    }
    b
}

/// `a` at least 0.2 above `bound`.
fn random_a(rng: &mut RngStream, bound: f64) -> f64 {
    // Callers pass `(m−1)β/2 + max |k_i|`, which dominates every argument bound.
    bound + rng.random_range(0.2..6.0)
}

fn max_abs(k: &WeightVector) -> f64 {
    k.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn batch(
    name: &str,
    alg: Algebra,
    m: usize,
    trials: usize,
    rng: &mut RngStream,
    mut one: impl FnMut(&mut RngStream) -> crate::error::Result<VerificationReport>,
) -> VerificationReport {
    let start = Instant::now();
    let reports: Vec<VerificationReport> = (0..trials)
        .map(|_| one(rng).unwrap_or_else(|e| VerificationReport::failed(name, e)))
        .collect();
    let mut r = worst(name, reports).param("beta", alg.beta()).param("m", m);
    r.count = trials as u64;
    r.timed(start.elapsed())
}

/// One report per special-function identity per `(m, β)` batch.
pub fn gamma_identity_suite(seed: u64, trials: usize) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for (idx, alg) in Algebra::ALL.into_iter().enumerate() {
        for m in 1..=MAX_M {
            let mut rng = RngStream::new(seed, 0x1d00 + (idx * 16 + m) as u64);
            let b = alg.b();
            let base = (m - 1) as f64 * b / 2.0;

            out.push(batch("identity/gammagen1", alg, m, trials, &mut rng, |rng| {
                let kappa = int_weights(rng, m, 4);
                let a = random_a(rng, base);
                let lhs = log_mv_gamma_weighted(alg, a, &kappa, Sign::Plus)?;
                let (lp, sp) = gen_pochhammer_signed(alg, a, &kappa)?;
                let rhs = lp + log_mv_gamma(m, alg, a)?;
                Ok(VerificationReport::new("identity/gammagen1")
                    .param("a", a)
                    .param("kappa", &kappa)
                    .param("pochhammer_sign", sp)
                    .compare_log(lhs, if sp > 0.0 { rhs } else { f64::NAN }, GAMMA_TOL))
            }));

            out.push(batch("identity/gammagen2", alg, m, trials, &mut rng, |rng| {
                let kappa = int_weights(rng, m, 4);
                let a = random_a(rng, base + max_abs(&kappa));
                let lhs = log_mv_gamma_weighted(alg, a, &kappa, Sign::Minus)?;
                let (lp, sp) = gen_pochhammer_signed(alg, -a + base + 1.0, &kappa)?;
                let parity = if kappa.sum() % 2.0 == 0.0 { 1.0 } else { -1.0 };
                let rhs = log_mv_gamma(m, alg, a)? - lp;
                Ok(VerificationReport::new("identity/gammagen2")
                    .param("a", a)
                    .param("kappa", &kappa)
                    .compare_log(lhs, if parity * sp > 0.0 { rhs } else { f64::NAN }, GAMMA_TOL))
            }));

            out.push(batch("identity/c-beta", alg, m, trials, &mut rng, |rng| {
                let (kappa, tau) = (int_weights(rng, m, 3), int_weights(rng, m, 3));
                let a = random_a(rng, base);
                let c = random_a(rng, base);
                let lhs = log_c_beta(alg, a, &kappa, c, &tau)?;
                // Pochhammer form B[a, c] [a]_κ [c]_τ / [a+c]_{κ+τ}.
                let (pa, _) = gen_pochhammer_signed(alg, a, &kappa)?;
                let (pc, _) = gen_pochhammer_signed(alg, c, &tau)?;
                let (pac, _) = gen_pochhammer_signed(alg, a + c, &(&kappa + &tau))?;
                let beta = log_mv_gamma(m, alg, a)? + log_mv_gamma(m, alg, c)? - log_mv_gamma(m, alg, a + c)?;
                Ok(VerificationReport::new("identity/c-beta")
                    .param("a", a)
                    .param("b", c)
                    .compare_log(lhs, beta + pa + pc - pac, GAMMA_TOL))
            }));

            out.push(batch("identity/k-beta", alg, m, trials, &mut rng, |rng| {
                let (kappa, tau) = (int_weights(rng, m, 3), int_weights(rng, m, 3));
                let a = random_a(rng, base + max_abs(&kappa));
                let c = random_a(rng, base + max_abs(&tau));
                let lhs = log_k_beta(alg, a, &kappa, c, &tau)?;
                // Each Γ[x, −κ] = ±Γ[x] / [1 − x + (m−1)β/2]_κ; the signs cancel.
                let shift = |x: f64| 1.0 - x + base;
                let (pa, _) = gen_pochhammer_signed(alg, shift(a), &kappa)?;
                let (pc, _) = gen_pochhammer_signed(alg, shift(c), &tau)?;
                let (pac, _) = gen_pochhammer_signed(alg, shift(a + c), &(&kappa + &tau))?;
                let beta = log_mv_gamma(m, alg, a)? + log_mv_gamma(m, alg, c)? - log_mv_gamma(m, alg, a + c)?;
                Ok(VerificationReport::new("identity/k-beta")
                    .param("a", a)
                    .param("b", c)
                    .compare_log(lhs, beta - pa - pc + pac, GAMMA_TOL))
            }));

            out.push(batch("identity/beta-gamma-ratio", alg, m, trials, &mut rng, |rng| {
                let (kappa, tau) = (real_weights(rng, m), real_weights(rng, m));
                let a = random_a(rng, base + max_abs(&kappa));
                let c = random_a(rng, base + max_abs(&tau));
                let sum = &kappa + &tau;
                let lc = log_c_beta(alg, a, &kappa, c, &tau)?;
                let lk = log_k_beta(alg, a, &kappa, c, &tau)?;
                let g = |x, k: &WeightVector, s| log_mv_gamma_weighted(alg, x, k, s);
                let rc = g(a, &kappa, Sign::Plus)? + g(c, &tau, Sign::Plus)? - g(a + c, &sum, Sign::Plus)?;
                let rk = g(a, &kappa, Sign::Minus)? + g(c, &tau, Sign::Minus)? - g(a + c, &sum, Sign::Minus)?;
                let swap_c = log_c_beta(alg, c, &tau, a, &kappa)?;
                let swap_k = log_k_beta(alg, c, &tau, a, &kappa)?;
                let dev = [(lc, rc), (lk, rk), (lc, swap_c), (lk, swap_k)]
                    .iter()
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                Ok(VerificationReport::new("identity/beta-gamma-ratio")
                    .param("a", a)
                    .param("b", c)
                    .compare(dev, 0.0, Metric::Absolute, 0.0, 0.0))
            }));
        }
    }
    out
}

/// One report per highest weight vector identity per `(m, β)` batch.
pub fn hwv_identity_suite(seed: u64, trials: usize) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for (idx, alg) in Algebra::ALL.into_iter().enumerate() {
        for m in 1..=MAX_M {
            let mut rng = RngStream::new(seed, 0x2d00 + (idx * 16 + m) as u64);

            out.push(batch("identity/qk2", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let kappa = real_weights(rng, m);
                let lhs = log_q_kappa(&inverse_hermitian_pd(&a)?, &kappa)?;
                let rhs = log_q_star_kappa(&a, &-&kappa.reversed())?;
                Ok(VerificationReport::new("identity/qk2").compare_log(lhs, rhs, HWV_TOL))
            }));

            out.push(batch("identity/qk41", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let (kappa, tau) = (real_weights(rng, m), real_weights(rng, m));
                let lhs = log_q_kappa(&a, &(&kappa + &tau))?;
                let rhs = log_q_kappa(&a, &kappa)? + log_q_kappa(&a, &tau)?;
                Ok(VerificationReport::new("identity/qk41").compare_log(lhs, rhs, HWV_TOL))
            }));

            out.push(batch("identity/qk42", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let kappa = real_weights(rng, m);
                let p = rng.random_range(-3.0..3.0);
                let lhs = log_q_kappa(&a, &kappa.shifted(p))?;
                let rhs = p * log_det_hermitian_pd(&a)? + log_q_kappa(&a, &kappa)?;
                Ok(VerificationReport::new("identity/qk42").compare_log(lhs, rhs, HWV_TOL))
            }));

            out.push(batch("identity/qk5", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let kappa = real_weights(rng, m);
                let b = random_upper(rng, alg, m);
                let lhs = log_q_kappa(&a.congruence(&b), &kappa)?;
                let rhs = log_q_kappa(&Hermitian::gram(&b), &kappa)? + log_q_kappa(&a, &kappa)?;
                Ok(VerificationReport::new("identity/qk5").compare_log(lhs, rhs, HWV_TOL))
            }));

            out.push(batch("identity/qk6", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let kappa = real_weights(rng, m);
                let b = random_upper(rng, alg, m);
                let b_inv = crate::algebra::invert_upper_triangular(&UpperTriangular::new(b.clone())?)?.into_matrix();
                let lhs = log_q_kappa(&a.congruence(&b_inv), &kappa)?;
                let rhs = log_q_kappa(&Hermitian::gram(&b), &-&kappa)? + log_q_kappa(&a, &kappa)?;
                Ok(VerificationReport::new("identity/qk6").compare_log(lhs, rhs, HWV_TOL))
            }));

            out.push(batch("identity/minors-vs-ldl", alg, m, trials, &mut rng, |rng| {
                let a = random_pd(rng, alg, m);
                let kappa = real_weights(rng, m);
                let lhs = log_q_kappa(&a, &kappa)?;
                let rhs = log_q_kappa_via_ldl(&a, &kappa)?;
                Ok(VerificationReport::new("identity/minors-vs-ldl").compare_log(lhs, rhs, ROUTE_TOL))
            }));
        }
    }
    out
}

/// Both suites.
pub fn identity_suite(seed: u64, trials: usize) -> Vec<VerificationReport> {
    let mut out = gamma_identity_suite(seed, trials);
    out.extend(hwv_identity_suite(seed, trials));
    out
}
