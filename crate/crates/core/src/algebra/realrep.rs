use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::decomp::Hermitian;
use super::matrix::Matrix;
use super::scalar::Scalar;

/// Real `βr x βc` matrix of `x ↦ A x`, with `𝔄^c` identified with `ℝ^{βc}`
/// through the component order of [`Scalar`].
pub fn real_representation(a: &Matrix) -> DMatrix<f64> {
    let alg = a.algebra();
    let b = alg.beta();
    let mut out = DMatrix::zeros(b * a.rows(), b * a.cols());
    let mut basis = [0.0; 4];
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let q = a[(i, j)];
            for c in 0..b {
                basis.fill(0.0);
                basis[c] = 1.0;
                let e = Scalar::from_components(alg, &basis[..b]).expect("beta components");
                let col = (q * e).components(alg).to_vec();
                for (r, v) in col.into_iter().enumerate() {
                    out[(b * i + r, b * j + c)] = v;
                }
            }
        }
    }
    out
}

/// Leading principal minors `log |A_1|, ..., log |A_m|`, each from its own LU
/// factorization of the real representation (`det ρ(A_p) = |A_p|^β`).
/// A nonpositive minor means `A` is not positive definite.
pub fn log_leading_minors_lu(a: &Hermitian) -> Result<Vec<f64>> {
    let b = a.algebra().b();
    let full = real_representation(a.as_matrix());
    let bi = a.algebra().beta();
    (1..=a.dim())
        .map(|p| {
            let d = full.view((0, 0), (bi * p, bi * p)).clone_owned().lu().determinant();
            if d > 0.0 && d.is_finite() {
                Ok(d.ln() / b)
            } else {
                Err(Error::NotPositiveDefinite { index: p - 1, pivot: d })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    #[test]
    fn representation_is_multiplicative() {
        let h = Algebra::Quaternion;
        let a = Matrix::from_coords(h, 2, 2, &(0..16).map(|x| (x as f64 * 0.37).sin()).collect::<Vec<_>>());
        let b = Matrix::from_coords(h, 2, 1, &(0..8).map(|x| (x as f64 * 0.91).cos()).collect::<Vec<_>>());
        let lhs = real_representation(&(&a * &b));
        let rhs = real_representation(&a) * real_representation(&b);
        assert!((lhs - rhs).abs().max() < 1e-14);
    }

    #[test]
    fn minors_of_diagonal() {
        for alg in Algebra::ALL {
            let d = Hermitian::from_diag(alg, &[2.0, 3.0]);
            let m = log_leading_minors_lu(&d).unwrap();
            assert!((m[0] - 2f64.ln()).abs() < 1e-14 && (m[1] - 6f64.ln()).abs() < 1e-14);
        }
        let bad = Hermitian::from_diag(Algebra::Real, &[2.0, -3.0]);
        assert!(matches!(
            log_leading_minors_lu(&bad),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
    }
}
