use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the associative normed division algebras, identified by its real
/// dimension `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Algebra {
    Real,
    Complex,
    Quaternion,
}

impl Algebra {
    pub const ALL: [Algebra; 3] = [Algebra::Real, Algebra::Complex, Algebra::Quaternion];

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(Algebra::Real),
            2 => Ok(Algebra::Complex),
            4 => Ok(Algebra::Quaternion),
            other => Err(Error::InvalidBeta(other)),
        }
    }

    /// Real dimension of the algebra.
    pub fn beta(self) -> usize {
        match self {
            Algebra::Real => 1,
            Algebra::Complex => 2,
            Algebra::Quaternion => 4,
        }
    }

    /// `beta` as a float, for use in exponents.
    pub fn b(self) -> f64 {
        self.beta() as f64
    }
}

impl TryFrom<u32> for Algebra {
    type Error = Error;
    fn try_from(beta: u32) -> Result<Self> {
        Algebra::from_beta(beta)
    }
}

impl From<Algebra> for u32 {
    fn from(alg: Algebra) -> u32 {
        alg.beta() as u32
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta={}", self.beta())
    }
}

/// An element of R, C or H stored as quaternion components `(1, i, j, k)`.
///
/// Reals and complex numbers are the sub-algebras with trailing components
/// equal to zero, so a single quaternion product serves all three algebras.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Scalar(pub(crate) [f64; 4]);

impl Scalar {
    pub const ZERO: Scalar = Scalar([0.0; 4]);
    pub const ONE: Scalar = Scalar([1.0, 0.0, 0.0, 0.0]);

    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Scalar([re, i, j, k])
    }

    pub const fn real(re: f64) -> Self {
        Scalar([re, 0.0, 0.0, 0.0])
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Scalar([re, im, 0.0, 0.0])
    }

    /// Builds a scalar from exactly `beta` components.
    pub fn from_components(alg: Algebra, components: &[f64]) -> Result<Self> {
        if components.len() != alg.beta() {
            return Err(Error::ComponentCount {
                beta: alg.beta(),
                got: components.len(),
            });
        }
        let mut c = [0.0; 4];
        c[..components.len()].copy_from_slice(components);
        Ok(Scalar(c))
    }

    /// The `beta` components meaningful in `alg`.
    pub fn components(&self, alg: Algebra) -> &[f64] {
        &self.0[..alg.beta()]
    }

    pub fn re(&self) -> f64 {
        self.0[0]
    }

    /// Whether every component beyond the first `beta` is zero.
    pub fn lives_in(&self, alg: Algebra) -> bool {
        self.0[alg.beta()..].iter().all(|&c| c == 0.0)
    }

    pub fn conj(self) -> Self {
        let [a, b, c, d] = self.0;
        Scalar([a, -b, -c, -d])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute imaginary component.
    pub fn imag_abs_max(&self) -> f64 {
        self.0[1..].iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }

    pub fn scale(self, s: f64) -> Self {
        let [a, b, c, d] = self.0;
        Scalar([a * s, b * s, c * s, d * s])
    }

    /// Two-sided inverse, `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self.conj().scale(1.0 / n))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

/// Algebra product `x * y`; multiplication order matters for quaternions.
pub fn scalar_mul(x: Scalar, y: Scalar) -> Scalar {
    x * y
}

impl Mul for Scalar {
    type Output = Scalar;

    #[inline]
    fn mul(self, rhs: Scalar) -> Scalar {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = rhs.0;
        Scalar([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

impl Add for Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, rhs: Scalar) -> Scalar {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Scalar(out)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    #[inline]
    fn sub(self, rhs: Scalar) -> Scalar {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Scalar(out)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(-1.0)
    }
}

impl AddAssign for Scalar {
    #[inline]
    fn add_assign(&mut self, rhs: Scalar) {
        *self = *self + rhs;
    }
}

impl SubAssign for Scalar {
    #[inline]
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = *self - rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}")?;
        for (v, unit) in [(b, "i"), (c, "j"), (d, "k")] {
            if v != 0.0 {
                write!(f, "{}{}{unit}", if v < 0.0 { "-" } else { "+" }, v.abs())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Scalar = Scalar::new(0.0, 1.0, 0.0, 0.0);
    const J: Scalar = Scalar::new(0.0, 0.0, 1.0, 0.0);
    const K: Scalar = Scalar::new(0.0, 0.0, 0.0, 1.0);

    #[test]
    fn real_product() {
        assert_eq!(Scalar::real(2.0) * Scalar::real(3.0), Scalar::real(6.0));
    }

    #[test]
    fn quaternion_basis_relations() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(J * I, -K);
        assert_eq!(I * I, -Scalar::ONE);
        assert_eq!(I * J * K, -Scalar::ONE);
    }

    #[test]
    fn complex_conjugate_pair() {
        let z = Scalar::complex(1.0, 1.0);
        assert_eq!(z * z.conj(), Scalar::real(2.0));
    }

    #[test]
    fn beta_validation() {
        assert!(Algebra::from_beta(3).is_err());
        assert!(Algebra::from_beta(8).is_err());
        assert_eq!(Algebra::from_beta(4).unwrap(), Algebra::Quaternion);
        assert!(Scalar::from_components(Algebra::Complex, &[1.0]).is_err());
    }

    #[test]
    fn inverse_is_two_sided() {
        let q = Scalar::new(1.0, -2.0, 0.5, 3.0);
        let qi = q.inv().unwrap();
        for p in [q * qi, qi * q] {
            assert!((p - Scalar::ONE).norm() < 1e-15);
        }
        assert!(Scalar::ZERO.inv().is_none());
    }
}
