//! Algebraic invariants of the scalar, matrix and highest-weight-vector code,
//! checked on random inputs.

use approx::assert_relative_eq;
use proptest::prelude::*;

use triesz::algebra::{
    cholesky_lower, cholesky_upper, inverse_hermitian_pd, log_det_hermitian_pd, Algebra, Hermitian, Matrix, Scalar,
};
use triesz::hwv::{log_q_kappa, log_q_kappa_of_inverse, log_q_kappa_via_ldl, log_q_star_kappa, WeightVector};

fn algebra() -> impl Strategy<Value = Algebra> {
    prop::sample::select(Algebra::ALL.to_vec())
}

fn scalar(alg: Algebra) -> impl Strategy<Value = Scalar> {
    prop::collection::vec(-2.0..2.0f64, alg.beta()).prop_map(move |c| Scalar::from_components(alg, &c).unwrap())
}

/// A well-conditioned positive definite matrix `X*X + I/2`.
fn pd(alg: Algebra, m: usize) -> impl Strategy<Value = Hermitian> {
    prop::collection::vec(-1.5..1.5f64, m * m * alg.beta()).prop_map(move |c| {
        let x = Matrix::from_coords(alg, m, m, &c);
        Hermitian::gram(&x)
            .try_add(&Hermitian::identity(alg, m).scale(0.5))
            .unwrap()
    })
}

fn weights(m: usize) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(-2.0..2.0f64, m).prop_map(WeightVector::new)
}

/// Algebra, dimension, a PD matrix and two weight vectors.
fn case() -> impl Strategy<Value = (Algebra, Hermitian, WeightVector, WeightVector)> {
    (algebra(), 1usize..=5).prop_flat_map(|(alg, m)| (Just(alg), pd(alg, m), weights(m), weights(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scalar_norm_is_multiplicative(
        (x, y) in algebra().prop_flat_map(|a| (scalar(a), scalar(a)))
    ) {
        assert_relative_eq!((x * y).norm(), x.norm() * y.norm(), max_relative = 1e-12, epsilon = 1e-14);
    }

    #[test]
    fn scalar_product_is_associative_and_conjugation_reverses_it(
        (x, y, z) in algebra().prop_flat_map(|a| (scalar(a), scalar(a), scalar(a)))
    ) {
        let d = (x * y) * z - x * (y * z);
        prop_assert!(d.norm() < 1e-12);
        let c = (x * y).conj() - y.conj() * x.conj();
        prop_assert!(c.norm() < 1e-12);
    }

    #[test]
    fn cholesky_factors_reproduce_the_matrix((_, a, _, _) in case()) {
        let u = cholesky_upper(&a).unwrap().into_matrix();
        prop_assert!(u.is_upper_triangular());
        prop_assert!(Hermitian::gram(&u).as_matrix().max_abs_diff(a.as_matrix()) < 1e-10);
        let l = cholesky_lower(&a).unwrap();
        prop_assert!(l.is_lower_triangular());
        prop_assert!(Hermitian::gram(&l).as_matrix().max_abs_diff(a.as_matrix()) < 1e-10);
    }

    #[test]
    fn inverse_is_a_two_sided_inverse((alg, a, _, _) in case()) {
        let inv = inverse_hermitian_pd(&a).unwrap();
        let id = Matrix::identity(alg, a.dim());
        prop_assert!((a.as_matrix() * inv.as_matrix()).max_abs_diff(&id) < 1e-9);
        prop_assert!((inv.as_matrix() * a.as_matrix()).max_abs_diff(&id) < 1e-9);
    }

    #[test]
    fn minor_and_pivot_routes_agree((_, a, k, _) in case()) {
        assert_relative_eq!(
            log_q_kappa(&a, &k).unwrap(),
            log_q_kappa_via_ldl(&a, &k).unwrap(),
            max_relative = 1e-10,
            epsilon = 1e-10
        );
    }

    #[test]
    fn weights_add_under_multiplication((_, a, k, t) in case()) {
        let lhs = log_q_kappa(&a, &k).unwrap() + log_q_kappa(&a, &t).unwrap();
        assert_relative_eq!(lhs, log_q_kappa(&a, &(&k + &t)).unwrap(), max_relative = 1e-10, epsilon = 1e-10);
    }

    #[test]
    fn constant_weights_give_a_determinant_power((_, a, _, _) in case(), p in -2.0..2.0f64) {
        let k = WeightVector::constant(a.dim(), p);
        assert_relative_eq!(
            log_q_kappa(&a, &k).unwrap(),
            p * log_det_hermitian_pd(&a).unwrap(),
            max_relative = 1e-10,
            epsilon = 1e-10
        );
    }

    #[test]
    fn scaling_multiplies_by_a_power((_, a, k, _) in case(), c in 0.1..10.0f64) {
        assert_relative_eq!(
            log_q_kappa(&a.scale(c), &k).unwrap(),
            k.sum() * c.ln() + log_q_kappa(&a, &k).unwrap(),
            max_relative = 1e-10,
            epsilon = 1e-10
        );
    }

    #[test]
    fn upper_congruence_factors(
        (a, b, k) in case().prop_flat_map(|(alg, a, k, _)| { let m = a.dim(); (Just(a), pd(alg, m), Just(k)) })
    ) {
        // q_κ(T* A T) = q_κ(T* T) q_κ(A) for upper triangular T.
        let t = cholesky_upper(&b).unwrap().into_matrix();
        let lhs = log_q_kappa(&a.congruence(&t), &k).unwrap();
        let rhs = log_q_kappa(&Hermitian::gram(&t), &k).unwrap() + log_q_kappa(&a, &k).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-9);
    }

    #[test]
    fn inverse_shortcut_matches_explicit_inverse((_, a, k, _) in case()) {
        let inv = inverse_hermitian_pd(&a).unwrap();
        assert_relative_eq!(
            log_q_kappa_of_inverse(&a, &k).unwrap(),
            log_q_kappa(&inv, &k).unwrap(),
            max_relative = 1e-9,
            epsilon = 1e-9
        );
    }

    #[test]
    fn star_is_q_of_the_reversed_matrix((_, a, k, _) in case()) {
        assert_relative_eq!(
            log_q_star_kappa(&a, &k).unwrap(),
            log_q_kappa(&a.reversed(), &k).unwrap(),
            max_relative = 1e-10,
            epsilon = 1e-10
        );
    }
}
