use super::*;
use crate::algebra::{classify, Definiteness};
use crate::densities::{Family, SpecParams};
use crate::hwv::log_q_kappa;
use crate::specfun::log_mv_gamma_weighted;

fn spec(p: SpecParams) -> DistributionSpec {
    DistributionSpec::new(p).unwrap()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let s = spec(SpecParams::standard(Family::TRieszII, Algebra::Quaternion, 3, 2).with_nu(4.0));
    let a = sample_many(&s, 100, 7, 1).unwrap();
    let b = sample_many(&s, 100, 7, 1).unwrap();
    let c = sample_many(&s, 100, 7, 2).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let mut r1 = RngStream::new(7, 1);
    let mut r2 = RngStream::chunk(7, 1, 0);
    assert_eq!(r1.next_u64(), r2.next_u64());
}

#[test]
fn stiefel_frames_are_orthonormal() {
    let mut rng = RngStream::new(1, 0);
    for alg in Algebra::ALL {
        for (n, m) in [(1, 1), (3, 3), (5, 2)] {
            let h = sample_stiefel_uniform(&mut rng, alg, n, m).unwrap();
            let g = &h.adjoint() * &h;
            assert!(g.max_abs_diff(&Matrix::identity(alg, m)) < 1e-12, "{alg} {n}x{m}");
        }
    }
    assert!(sample_stiefel_uniform(&mut rng, Algebra::Real, 1, 2).is_err());
}

#[test]
fn pearson_draws_stay_in_the_ball() {
    for family in [Family::PearsonIIRieszI, Family::PearsonIIRieszII] {
        let s = spec(
            SpecParams::standard(family, Algebra::Complex, 3, 2)
                .with_nu(3.0)
                .with_kappa(&[0.5, -0.2])
                .with_tau(&[0.3, 0.1]),
        );
        for r in sample_many(&s, 2000, 3, 0).unwrap() {
            let inner = Hermitian::identity(Algebra::Complex, 2)
                .try_sub(&Hermitian::gram(&r))
                .unwrap();
            assert_eq!(classify(&inner), Definiteness::PositiveDefinite);
        }
    }
}

#[test]
fn pearson_route_reproduces_t_riesz_draw() {
    for variant in [Variant::I, Variant::II] {
        for alg in Algebra::ALL {
            let family = match variant {
                Variant::I => Family::TRieszI,
                Variant::II => Family::TRieszII,
            };
            let s = spec(
                SpecParams::standard(family, alg, 3, 2)
                    .with_nu(8.0)
                    .with_kappa(&[1.0, 0.0])
                    .with_tau(&[0.2, 0.4]),
            );
            let mut rng = RngStream::new(9, 0);
            for _ in 0..20 {
                let (x, u) = pair(&mut rng, &s).unwrap();
                let direct = divide_by_factor(&x, &u, variant).unwrap();
                let uu = Hermitian::gram(&u);
                // The root is the variant factor of U.
                assert!(variant_factor(&uu, variant).unwrap().max_abs_diff(&u) < 1e-12 * u.max_abs());
                let r = right_divide(&x, &uu.try_add(&Hermitian::gram(&x)).unwrap(), variant).unwrap();
                let inner = Hermitian::identity(alg, 2).try_sub(&Hermitian::gram(&r)).unwrap();
                let via_r = right_divide(&r, &inner, variant).unwrap();
                assert!(direct.max_abs_diff(&via_r) < 1e-10 * direct.max_abs().max(1.0));
            }
        }
    }
}

#[test]
fn zero_weight_draws_do_not_favour_a_column() {
    // With zero weights and identity scales the densities are invariant under
    // T ↦ TQ, so the first column carries half the mass on average. A plain
    // triangular division gets this wrong at m = 2.
    let corner = |x: &Matrix| {
        let col = |j| (0..x.rows()).map(|i| x[(i, j)].norm_sqr()).sum::<f64>();
        col(0) / (col(0) + col(1))
    };
    for family in [
        Family::TRieszI,
        Family::TRieszII,
        Family::BetaRiesz2C,
        Family::BetaRiesz2K,
    ] {
        let s = spec(SpecParams::standard(family, Algebra::Real, 3, 2).with_nu(8.0));
        let vals: Vec<f64> = sample_many(&s, 100_000, 3, 0)
            .unwrap()
            .iter()
            .map(|x| match family.kind() {
                Kind::Beta => x[(0, 0)].re() / (x[(0, 0)].re() + x[(1, 1)].re()),
                _ => corner(x),
            })
            .collect();
        let (mean, se) = mean_se(&vals);
        assert!((mean - 0.5).abs() < 4.0 * se, "{family}: {mean} ± {se}");
    }
}

#[test]
fn riesz_moment_identity_small_run() {
    // E[q_τ(V)] = β^{−Στ} Γ_m[a, κ+τ] / Γ_m[a, κ] for type I, Ξ = I.
    let alg = Algebra::Complex;
    let kappa = WeightVector::new(vec![0.5, -0.25]);
    let tau = WeightVector::new(vec![0.5, 0.25]);
    let a = 3.0;
    let s = spec(
        SpecParams::standard(Family::RieszI, alg, 2, 2)
            .with_a(a)
            .with_kappa(kappa.as_slice()),
    );
    let vals: Vec<f64> = sample_many(&s, 200_000, 5, 0)
        .unwrap()
        .into_iter()
        .map(|v| log_q_kappa(&Hermitian::symmetrized(v), &tau).unwrap().exp())
        .collect();
    let (mean, se) = mean_se(&vals);
    let expect = (-tau.sum() * alg.b().ln() + log_mv_gamma_weighted(alg, a, &(&kappa + &tau), Sign::Plus).unwrap()
        - log_mv_gamma_weighted(alg, a, &kappa, Sign::Plus).unwrap())
    .exp();
    assert!((mean - expect).abs() < 4.0 * se, "{mean} ± {se} vs {expect}");
}

#[test]
fn exponential_reduction_mean() {
    let s = spec(SpecParams::standard(Family::RieszI, Algebra::Real, 1, 1).with_a(1.0));
    let vals: Vec<f64> = sample_many(&s, 100_000, 2, 0)
        .unwrap()
        .iter()
        .map(|v| v[(0, 0)].re())
        .collect();
    let (mean, se) = mean_se(&vals);
    assert!((mean - 1.0).abs() < 4.0 * se);
}

#[test]
fn affine_identity_map() {
    let mut rng = RngStream::new(4, 0);
    let t = gaussian_matrix(&mut rng, Algebra::Quaternion, 3, 2, 1.0);
    let s = affine_transform_sample(
        &t,
        &Matrix::zeros(Algebra::Quaternion, 3, 2),
        &Hermitian::identity(Algebra::Quaternion, 3),
        &Hermitian::identity(Algebra::Quaternion, 2),
        Variant::II,
    )
    .unwrap();
    assert_eq!(s, t);
    let s = affine_transform_sample(
        &Matrix::from_real(Algebra::Real, 1, 1, &[2.0]),
        &Matrix::from_real(Algebra::Real, 1, 1, &[1.0]),
        &Hermitian::from_diag(Algebra::Real, &[4.0]),
        &Hermitian::from_diag(Algebra::Real, &[9.0]),
        Variant::I,
    )
    .unwrap();
    assert!((s[(0, 0)].re() - (2.0 * 3.0 / 2.0 + 1.0)).abs() < 1e-15);
}

#[test]
fn nonpositive_shape_is_rejected() {
    let mut rng = RngStream::new(0, 0);
    let r = sample_riesz_bartlett(
        &mut rng,
        Algebra::Real,
        0.5,
        &WeightVector::new(vec![1.0]),
        &Hermitian::identity(Algebra::Real, 1),
        Variant::II,
    );
    assert!(matches!(r, Err(Error::Domain(_))));
}
