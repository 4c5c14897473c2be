//! Highest weight vectors `q_κ(A)`: weighted products of the leading
//! principal minors of a positive definite matrix.

use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

use crate::algebra::{ldl_decompose, log_leading_minors_lu, log_trailing_pivots, Hermitian};
use crate::error::{Error, Result};

/// Weight vector `κ = (k_1, ..., k_m)`. No ordering is imposed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Self {
        WeightVector(weights)
    }

    pub fn zeros(m: usize) -> Self {
        WeightVector(vec![0.0; m])
    }

    pub fn constant(m: usize, p: f64) -> Self {
        WeightVector(vec![p; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `κ* = (k_m, ..., k_1)`.
    pub fn reversed(&self) -> Self {
        WeightVector(self.0.iter().rev().copied().collect())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0.0)
    }

    pub fn is_integer(&self) -> bool {
        self.0.iter().all(|k| k.fract() == 0.0)
    }

    /// `κ + p`, adding `p` to every weight.
    pub fn shifted(&self, p: f64) -> Self {
        WeightVector(self.0.iter().map(|k| k + p).collect())
    }

    fn check_dim(&self, m: usize) -> Result<()> {
        if self.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "weight vector has {} entries for a {m}x{m} matrix",
                self.len()
            )));
        }
        Ok(())
    }
}

impl Add for &WeightVector {
    type Output = WeightVector;
    fn add(self, rhs: &WeightVector) -> WeightVector {
        assert_eq!(self.len(), rhs.len(), "weight vectors of different length");
        WeightVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Neg for &WeightVector {
    type Output = WeightVector;
    fn neg(self) -> WeightVector {
        WeightVector(self.0.iter().map(|k| -k).collect())
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        WeightVector(v)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// `Σ k_i ℓ_i` where `ℓ_i` are log pivots.
pub fn weighted_log_pivots(kappa: &WeightVector, log_pivots: &[f64]) -> f64 {
    kappa.0.iter().zip(log_pivots).map(|(k, l)| k * l).sum()
}

/// `log q_κ(A) = k_m log|A_m| + Σ_{i<m} (k_i − k_{i+1}) log|A_i|`, with each
/// leading minor computed by its own determinant. This is the reference
/// route; [`log_q_kappa_via_ldl`] is the fast one.
pub fn log_q_kappa(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    let m = a.dim();
    kappa.check_dim(m)?;
    let k = kappa.as_slice();
    Ok(log_leading_minors_lu(a)?
        .into_iter()
        .enumerate()
        .map(|(i, lm)| {
            let w = if i + 1 < m { k[i] - k[i + 1] } else { k[i] };
            w * lm
        })
        .sum())
}

pub fn q_kappa(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    log_q_kappa(a, kappa).map(f64::exp)
}

/// `log ∏ λ_i^{k_i}` with `λ` the diagonal of `A = L* D L`, `L` unit upper.
pub fn log_q_kappa_via_ldl(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    kappa.check_dim(a.dim())?;
    let (_, d) = ldl_decompose(a)?;
    Ok(kappa.0.iter().zip(&d).map(|(k, l)| k * l.ln()).sum())
}

pub fn q_kappa_via_ldl(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    log_q_kappa_via_ldl(a, kappa).map(f64::exp)
}

/// `log q*_κ(A) = log ∏ λ_i^{k_{m−i+1}}` where `λ_i` are the pivots of the
/// factorization that runs from the last row upward (`A = L* D L` with `L`
/// unit lower), so that `q*_κ(A) = q_κ(JAJ)` for the reversal `J`.
pub fn log_q_star_kappa(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    kappa.check_dim(a.dim())?;
    let p = log_trailing_pivots(a)?;
    Ok(weighted_log_pivots(&kappa.reversed(), &p))
}

pub fn q_star_kappa(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    log_q_star_kappa(a, kappa).map(f64::exp)
}

/// `log q_κ(A^{-1})` without forming the inverse: `−Σ k_i log μ_i` with `μ`
/// the trailing pivots of `A`.
pub fn log_q_kappa_of_inverse(a: &Hermitian, kappa: &WeightVector) -> Result<f64> {
    kappa.check_dim(a.dim())?;
    Ok(-weighted_log_pivots(kappa, &log_trailing_pivots(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Matrix};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn q_kappa_examples() {
        let i3 = Hermitian::identity(Algebra::Quaternion, 3);
        assert_eq!(q_kappa(&i3, &WeightVector::new(vec![3.0, -1.0, 0.5])).unwrap(), 1.0);

        let d = Hermitian::from_diag(Algebra::Real, &[2.0, 3.0]);
        assert!(close(
            q_kappa(&d, &WeightVector::constant(2, 2.0)).unwrap(),
            36.0,
            1e-14
        ));
        assert!(close(
            q_kappa(&d, &WeightVector::new(vec![2.0, 1.0])).unwrap(),
            12.0,
            1e-14
        ));
    }

    #[test]
    fn ldl_route_examples() {
        let d = Hermitian::from_diag(Algebra::Real, &[2.0, 3.0]);
        assert!(close(
            q_kappa_via_ldl(&d, &WeightVector::new(vec![2.0, 1.0])).unwrap(),
            12.0,
            1e-14
        ));
        let i = Hermitian::identity(Algebra::Complex, 4);
        assert_eq!(
            q_kappa_via_ldl(&i, &WeightVector::new(vec![1.0, 2.0, 3.0, 4.0])).unwrap(),
            1.0
        );
        let a = Hermitian::new(Matrix::from_real(Algebra::Real, 2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(close(
            q_kappa_via_ldl(&a, &WeightVector::new(vec![1.0, 0.0])).unwrap(),
            2.0,
            1e-14
        ));
    }

    #[test]
    fn q_star_examples() {
        let i = Hermitian::identity(Algebra::Real, 3);
        assert_eq!(q_star_kappa(&i, &WeightVector::new(vec![1.0, 5.0, -2.0])).unwrap(), 1.0);
        let d = Hermitian::from_diag(Algebra::Real, &[2.0, 3.0]);
        assert!(close(
            q_star_kappa(&d, &WeightVector::new(vec![2.0, 1.0])).unwrap(),
            18.0,
            1e-14
        ));
        let a = Hermitian::new(Matrix::from_real(Algebra::Real, 2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let p = WeightVector::constant(2, 1.5);
        assert!(close(q_star_kappa(&a, &p).unwrap(), 3f64.powf(1.5), 1e-14));
    }

    #[test]
    fn inverse_identity_on_a_small_case() {
        // A^{-1} = [[2,-1],[-1,2]]/3, so q_(1,0)(A^{-1}) = 2/3.
        let a = Hermitian::new(Matrix::from_real(Algebra::Real, 2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let k = WeightVector::new(vec![1.0, 0.0]);
        let lhs = q_star_kappa(&a, &-&k.reversed()).unwrap();
        assert!(close(lhs, 2.0 / 3.0, 1e-14));
        assert!(close(log_q_kappa_of_inverse(&a, &k).unwrap().exp(), 2.0 / 3.0, 1e-14));
    }

    #[test]
    fn dimension_mismatch() {
        let d = Hermitian::from_diag(Algebra::Real, &[2.0, 3.0]);
        assert!(matches!(
            q_kappa(&d, &WeightVector::zeros(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
