use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{cholesky_lower, cholesky_upper, inverse_hermitian_pd, Algebra, Hermitian, Matrix};
use crate::error::Error;
use crate::quad::Quadrature;

const R: Algebra = Algebra::Real;

fn spec(p: SpecParams) -> DistributionSpec {
    DistributionSpec::new(p).unwrap()
}

fn scalar(x: f64) -> Matrix {
    Matrix::from_real(R, 1, 1, &[x])
}

fn random_matrix(rng: &mut ChaCha8Rng, alg: Algebra, rows: usize, cols: usize) -> Matrix {
    let coords: Vec<f64> = (0..rows * cols * alg.beta())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Matrix::from_coords(alg, rows, cols, &coords)
}

fn random_pd(rng: &mut ChaCha8Rng, alg: Algebra, m: usize) -> Hermitian {
    let x = random_matrix(rng, alg, m + 2, m);
    Hermitian::gram(&x)
        .try_add(&Hermitian::identity(alg, m).scale(0.3))
        .unwrap()
}

fn integrate_1d(spec: &DistributionSpec, lo: f64, hi: f64) -> f64 {
    let f = |x: f64| spec.logpdf(&scalar(x)).map(f64::exp).unwrap_or(0.0);
    let q = Quadrature::with_tol(1e-9);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => q.finite(lo, hi, f).unwrap().value,
        (true, false) => q.half_line(lo, f).unwrap().value,
        _ => q.real_line(f).unwrap().value,
    }
}

#[test]
fn kotz_riesz_scalar_examples() {
    let s = spec(SpecParams::standard(Family::KotzRieszI, R, 1, 1));
    assert!((s.logpdf(&scalar(0.0)).unwrap() + 0.5 * PI.ln()).abs() < 1e-14);
    let s = spec(SpecParams::standard(Family::KotzRieszI, R, 1, 1).with_kappa(&[1.0]));
    let expect = (2.0 / PI.sqrt()).ln() - 1.0;
    assert!((s.logpdf(&scalar(1.0)).unwrap() - expect).abs() < 1e-14);
    assert!((integrate_1d(&s, f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-8);
    // q_κ(0) = 0 with positive weight.
    assert_eq!(s.logpdf(&scalar(0.0)).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn kotz_riesz_zero_weight_is_matrix_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for alg in Algebra::ALL {
        let (n, m) = (3, 2);
        let mut p = SpecParams::standard(Family::KotzRieszII, alg, n, m);
        let sigma = random_pd(&mut rng, alg, m);
        let theta = random_pd(&mut rng, alg, n);
        let mu = random_matrix(&mut rng, alg, n, m);
        p.sigma = Some(sigma.as_matrix().clone());
        p.theta = Some(theta.as_matrix().clone());
        p.mu = Some(mu.clone());
        let s = spec(p);
        let b = alg.b();
        let y = random_matrix(&mut rng, alg, n, m);
        let c = &y - &mu;
        let inner = &(&(&inverse_hermitian_pd(&sigma).unwrap().into_matrix() * &c.adjoint())
            * &inverse_hermitian_pd(&theta).unwrap().into_matrix())
            * &c;
        let direct = (m * n) as f64 * b / 2.0 * (b / PI).ln()
            - n as f64 * b / 2.0 * crate::algebra::log_det_hermitian_pd(&sigma).unwrap()
            - m as f64 * b / 2.0 * crate::algebra::log_det_hermitian_pd(&theta).unwrap()
            - b * inner.trace_re();
        assert!((s.logpdf(&y).unwrap() - direct).abs() < 1e-11, "{alg}");
    }
}

#[test]
fn riesz_scalar_examples() {
    let s = spec(SpecParams::standard(Family::RieszI, R, 1, 1).with_a(1.0));
    assert!((s.logpdf(&scalar(1.0)).unwrap() + 1.0).abs() < 1e-14);
    let s = spec(
        SpecParams::standard(Family::RieszI, R, 1, 1)
            .with_a(1.0)
            .with_kappa(&[2.0]),
    );
    assert!((s.logpdf(&scalar(1.0)).unwrap() + 1.0 + 2f64.ln()).abs() < 1e-14);
    assert!((integrate_1d(&s, 0.0, f64::INFINITY) - 1.0).abs() < 1e-8);
    let s = spec(
        SpecParams::standard(Family::RieszII, R, 1, 1)
            .with_a(3.5)
            .with_kappa(&[1.5]),
    );
    assert!((integrate_1d(&s, 0.0, f64::INFINITY) - 1.0).abs() < 1e-8);
    assert!(matches!(
        s.logpdf(&scalar(-1.0)),
        Err(Error::NotPositiveDefinite { .. })
    ));
}

#[test]
fn pearson_scalar_is_uniform_at_nu_two() {
    let s = spec(SpecParams::standard(Family::PearsonIIRieszI, R, 1, 1).with_nu(2.0));
    for r in [-0.7, 0.0, 0.3] {
        assert!((s.logpdf(&scalar(r)).unwrap() - 0.5f64.ln()).abs() < 1e-14);
    }
    assert!(matches!(s.logpdf(&scalar(1.5)), Err(Error::Support(_))));
    let s = spec(
        SpecParams::standard(Family::PearsonIIRieszI, R, 1, 1)
            .with_nu(3.0)
            .with_kappa(&[0.5])
            .with_tau(&[1.0]),
    );
    assert!((integrate_1d(&s, -1.0, 1.0) - 1.0).abs() < 1e-8);
    assert_eq!(s.logpdf(&scalar(0.0)).unwrap(), f64::NEG_INFINITY);
}

#[test]
fn t_riesz_scalar_examples() {
    let s = spec(SpecParams::standard(Family::TRieszI, R, 1, 1).with_nu(1.0));
    assert!((s.logpdf(&scalar(0.0)).unwrap() + PI.ln()).abs() < 1e-14);
    let s = spec(
        SpecParams::standard(Family::TRieszI, R, 1, 1)
            .with_nu(3.0)
            .with_kappa(&[1.0])
            .with_tau(&[1.0]),
    );
    assert!((integrate_1d(&s, f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-8);
    // Negative τ: the density blows up at T = 0.
    let s = spec(
        SpecParams::standard(Family::TRieszI, R, 1, 1)
            .with_nu(3.0)
            .with_tau(&[-0.25]),
    );
    assert!(matches!(s.logpdf(&scalar(0.0)), Err(Error::Boundary(_))));
    let s = spec(
        SpecParams::standard(Family::TRieszII, R, 1, 1)
            .with_nu(6.0)
            .with_kappa(&[1.0])
            .with_tau(&[-1.0]),
    );
    assert!((integrate_1d(&s, f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-8);
}

#[test]
fn beta_scalar_examples() {
    let s = spec(SpecParams::standard(Family::BetaRiesz2C, R, 1, 1).with_nu(1.0));
    assert!((s.logpdf(&scalar(1.0)).unwrap() + (2.0 * PI).ln()).abs() < 1e-14);
    let s = spec(
        SpecParams::standard(Family::BetaRiesz2K, R, 1, 1)
            .with_nu(7.0)
            .with_kappa(&[1.0])
            .with_tau(&[-0.5]),
    );
    assert!((integrate_1d(&s, 0.0, f64::INFINITY) - 1.0).abs() < 1e-8);
}

fn weighted(family: Family, alg: Algebra, n: usize, m: usize, rng: &mut ChaCha8Rng) -> SpecParams {
    let mut p = SpecParams::standard(family, alg, n, m);
    let kappa: Vec<f64> = (0..m).map(|_| rng.random_range(-0.5..1.0)).collect();
    let tau: Vec<f64> = (0..m).map(|_| rng.random_range(-0.3..0.8)).collect();
    p = p.with_kappa(&kappa);
    if p.tau.is_some() {
        p = p.with_tau(&tau).with_nu(n as f64 + 4.0);
    }
    if p.a.is_some() {
        p = p.with_a(n as f64 + 2.5);
    }
    p
}

#[test]
fn t_riesz_general_is_standard_plus_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for family in [Family::TRieszI, Family::TRieszII] {
        for alg in Algebra::ALL {
            let (n, m) = (3, 2);
            let mut p = weighted(family, alg, n, m, &mut rng);
            let delta = random_pd(&mut rng, alg, n);
            let pi = random_pd(&mut rng, alg, m);
            let mu = random_matrix(&mut rng, alg, n, m);
            p.delta = Some(delta.as_matrix().clone());
            p.pi = Some(pi.as_matrix().clone());
            p.mu = Some(mu.clone());
            let s = spec(p);
            let b = alg.b();
            let right = match family.variant() {
                Variant::I => cholesky_upper(&pi).unwrap().into_matrix(),
                Variant::II => cholesky_lower(&pi).unwrap(),
            };
            let right_inv = invert_variant_factor(&right, family.variant()).unwrap();
            let u_delta = cholesky_upper(&delta).unwrap().into_matrix();
            for _ in 0..5 {
                let x = random_matrix(&mut rng, alg, n, m);
                let t = &(&u_delta * &(&x - &mu)) * &right_inv;
                let jac = m as f64 * b / 2.0 * crate::algebra::log_det_hermitian_pd(&delta).unwrap()
                    - n as f64 * b / 2.0 * crate::algebra::log_det_hermitian_pd(&pi).unwrap();
                let lhs = s.logpdf(&x).unwrap();
                let rhs = logpdf_t_riesz(&s, &t).unwrap() + jac;
                assert!((lhs - rhs).abs() < 1e-10, "{family} {alg}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn beta_nonstd_is_standard_plus_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for family in [Family::BetaRiesz2C, Family::BetaRiesz2K] {
        for alg in Algebra::ALL {
            let m = 3;
            let mut p = weighted(family, alg, 4, m, &mut rng);
            let theta = random_pd(&mut rng, alg, m);
            p.theta = Some(theta.as_matrix().clone());
            let s = spec(p);
            let f_inv =
                invert_variant_factor(&variant_factor(&theta, family.variant()).unwrap(), family.variant()).unwrap();
            let pexp = (m - 1) as f64 * alg.b() / 2.0 + 1.0;
            for _ in 0..5 {
                let z = random_pd(&mut rng, alg, m);
                let f = z.congruence(&f_inv);
                let lhs = s.logpdf(z.as_matrix()).unwrap();
                let rhs = logpdf_beta_riesz2(&s, f.as_matrix()).unwrap()
                    - pexp * crate::algebra::log_det_hermitian_pd(&theta).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "{family} {alg}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn identity_scales_match_standard_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut p = weighted(Family::TRieszII, Algebra::Complex, 3, 2, &mut rng);
    p.delta = Some(Matrix::identity(Algebra::Complex, 3));
    p.pi = Some(Matrix::identity(Algebra::Complex, 2));
    let s = spec(p);
    let x = random_matrix(&mut rng, Algebra::Complex, 3, 2);
    assert!((s.logpdf(&x).unwrap() - logpdf_t_riesz(&s, &x).unwrap()).abs() < 1e-13);

    let mut p = weighted(Family::TRieszI, R, 2, 2, &mut rng);
    let mu = random_matrix(&mut rng, R, 2, 2);
    p.mu = Some(mu.clone());
    let s = spec(p);
    let x = random_matrix(&mut rng, R, 2, 2);
    assert!((s.logpdf(&x).unwrap() - logpdf_t_riesz(&s, &(&x - &mu)).unwrap()).abs() < 1e-13);
}

#[test]
fn zero_weights_give_classical_constants_and_equal_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for family in Family::ALL {
        for alg in Algebra::ALL {
            let (n, m) = (4, 3);
            let mut p = SpecParams::standard(family, alg, n, m);
            if p.nu.is_some() {
                p.nu = Some(5.5);
            }
            match family.kind() {
                Kind::KotzRiesz => {
                    p.sigma = Some(random_pd(&mut rng, alg, m).into_matrix());
                    p.theta = Some(random_pd(&mut rng, alg, n).into_matrix());
                }
                Kind::Riesz => p.xi = Some(random_pd(&mut rng, alg, m).into_matrix()),
                _ => {}
            }
            let s = spec(p);
            let c = classical_log_constant(&s).unwrap();
            assert!((s.log_constant() - c).abs() < 1e-12, "{family} {alg}");
            let other = s.with_variant(match family.variant() {
                Variant::I => Variant::II,
                Variant::II => Variant::I,
            });
            let other = other.unwrap();
            let (r, cdim) = s.point_shape();
            let x = if family.is_hermitian_valued() {
                random_pd(&mut rng, alg, m).into_matrix()
            } else if family.kind() == Kind::Pearson {
                random_matrix(&mut rng, alg, r, cdim).scale(0.2)
            } else {
                random_matrix(&mut rng, alg, r, cdim)
            };
            assert!(
                (s.logpdf(&x).unwrap() - other.logpdf(&x).unwrap()).abs() < 1e-12,
                "{family} {alg}"
            );
        }
    }
}

#[test]
fn kr_type_two_uses_inverse_argument() {
    // m = 1: q_κ(Q^{-1}) = Q^{-k}.
    let s = spec(SpecParams::standard(Family::KotzRieszII, R, 3, 1).with_kappa(&[0.5]));
    let y = Matrix::from_real(R, 3, 1, &[0.5, -1.0, 0.25]);
    let q: f64 = 0.25 + 1.0 + 0.0625;
    let c = (1.5 - 0.5) * 1f64.ln() + crate::specfun::ln_gamma(1.5) - 1.5 * PI.ln() - crate::specfun::ln_gamma(1.0);
    let expect = c - q - 0.5 * q.ln();
    assert!((s.logpdf(&y).unwrap() - expect).abs() < 1e-13);
}
