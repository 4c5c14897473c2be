use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

use super::scalar::{Algebra, Scalar};

/// Dense row-major matrix over one of the division algebras.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    alg: Algebra,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(alg: Algebra, rows: usize, cols: usize) -> Self {
        Matrix {
            alg,
            rows,
            cols,
            data: vec![Scalar::ZERO; rows * cols],
        }
    }

    pub fn identity(alg: Algebra, n: usize) -> Self {
        let mut out = Self::zeros(alg, n, n);
        for i in 0..n {
            out[(i, i)] = Scalar::ONE;
        }
        out
    }

    /// Real diagonal matrix.
    pub fn from_diag(alg: Algebra, diag: &[f64]) -> Self {
        let mut out = Self::zeros(alg, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            out[(i, i)] = Scalar::real(d);
        }
        out
    }

    /// Builds a matrix from row-major scalars, rejecting components outside `alg`.
    pub fn from_scalars(alg: Algebra, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| !s.lives_in(alg)) {
            return Err(Error::Domain(format!(
                "entry {bad} is not an element of the {alg} algebra"
            )));
        }
        Ok(Matrix { alg, rows, cols, data })
    }

    /// Real matrix from row-major values, embedded in `alg`.
    pub fn from_real(alg: Algebra, rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_real: wrong number of values");
        Matrix {
            alg,
            rows,
            cols,
            data: values.iter().map(|&v| Scalar::real(v)).collect(),
        }
    }

    /// Inverse of [`Matrix::coords`]: `beta * rows * cols` real coordinates,
    /// row-major, components of each entry adjacent.
    pub fn from_coords(alg: Algebra, rows: usize, cols: usize, coords: &[f64]) -> Self {
        let b = alg.beta();
        assert_eq!(coords.len(), b * rows * cols, "from_coords: wrong coordinate count");
        let data = coords
            .chunks_exact(b)
            .map(|c| Scalar::from_components(alg, c).expect("chunk length equals beta"))
            .collect();
        Matrix { alg, rows, cols, data }
    }

    pub fn coords(&self) -> Vec<f64> {
        self.data
            .iter()
            .flat_map(|s| s.components(self.alg).iter().copied())
            .collect()
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.alg, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Matrix product with dimension and algebra checks.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.alg != rhs.alg {
            return Err(Error::AlgebraMismatch {
                left: self.alg.beta(),
                right: rhs.alg.beta(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.alg, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Scalar::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(Scalar, Scalar) -> Scalar) -> Result<Matrix> {
        if self.alg != rhs.alg {
            return Err(Error::AlgebraMismatch {
                left: self.alg.beta(),
                right: rhs.alg.beta(),
            });
        }
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            alg: self.alg,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            data: self.data.iter().map(|x| x.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// Left multiplication of every entry by a scalar.
    pub fn left_scale(&self, s: Scalar) -> Matrix {
        Matrix {
            data: self.data.iter().map(|&x| s * x).collect(),
            ..self.clone()
        }
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Scalar::norm_sqr).sum::<f64>().sqrt()
    }

    /// Largest entry norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, s| acc.max(s.norm()))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |acc, (&a, &b)| acc.max((a - b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Scalar::is_finite)
    }

    /// Leading `p x p` block.
    pub fn leading(&self, p: usize) -> Matrix {
        self.block(0, 0, p, p)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Matrix::zeros(self.alg, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    /// `J A J` with `J` the exchange matrix: reverses row and column order.
    pub fn reversed(&self) -> Matrix {
        let mut out = Matrix::zeros(self.alg, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(self.rows - 1 - i, self.cols - 1 - j)] = self[(i, j)];
            }
        }
        out
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Matrix) -> Matrix {
        assert_eq!(self.cols, below.cols, "vstack: column mismatch");
        assert_eq!(self.alg, below.alg, "vstack: algebra mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Matrix {
            alg: self.alg,
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    /// Whether all entries strictly below the diagonal are zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)] == Scalar::ZERO))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == Scalar::ZERO))
    }

    /// Largest entry of `A - A*`.
    pub fn hermitian_residue(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape or algebra mismatch; use the `try_*` and
// `matmul` methods for checked arithmetic.
impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).unwrap_or_else(|e| panic!("matrix product: {e}"))
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("matrix sum: {e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("matrix difference: {e}"))
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
