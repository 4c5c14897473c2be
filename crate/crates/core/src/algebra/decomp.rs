use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::scalar::{Algebra, Scalar};

/// Entrywise tolerance on `A - A*` when validating Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// A failing pivot within this multiple of the Frobenius norm counts as zero.
pub const PIVOT_TOL: f64 = 1e-13;

/// A square matrix equal to its adjoint.
///
/// Construction symmetrizes exactly after the tolerance check, so the stored
/// matrix has a real diagonal and mirrored off-diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(Matrix);

impl Hermitian {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let residue = a.hermitian_residue();
        if !(residue <= HERMITIAN_TOL * a.max_abs().max(1.0)) {
            return Err(Error::NotHermitian(residue));
        }
        Ok(Self::symmetrized(a))
    }

    /// Averages `A` with `A*` without checking the residue.
    pub fn symmetrized(a: Matrix) -> Self {
        let n = a.rows();
        let mut out = a;
        for i in 0..n {
            let d = out[(i, i)].re();
            out[(i, i)] = Scalar::real(d);
            for j in i + 1..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()).scale(0.5);
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Hermitian(out)
    }

    /// `X* X`.
    pub fn gram(x: &Matrix) -> Self {
        Self::symmetrized(&x.adjoint() * x)
    }

    /// `B* A B`.
    pub fn congruence(&self, b: &Matrix) -> Self {
        Self::symmetrized(&(&b.adjoint() * &self.0) * b)
    }

    pub fn identity(alg: Algebra, m: usize) -> Self {
        Hermitian(Matrix::identity(alg, m))
    }

    pub fn from_diag(alg: Algebra, diag: &[f64]) -> Self {
        Hermitian(Matrix::from_diag(alg, diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn algebra(&self) -> Algebra {
        self.0.algebra()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn reversed(&self) -> Self {
        Hermitian(self.0.reversed())
    }

    pub fn try_add(&self, rhs: &Hermitian) -> Result<Self> {
        Ok(Self::symmetrized(self.0.try_add(&rhs.0)?))
    }

    pub fn try_sub(&self, rhs: &Hermitian) -> Result<Self> {
        Ok(Self::symmetrized(self.0.try_sub(&rhs.0)?))
    }

    pub fn scale(&self, s: f64) -> Self {
        Hermitian(self.0.scale(s))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace_re()
    }

    /// Real `beta * (m + m(m-1)/2)`-vector: diagonal first, then the upper
    /// off-diagonal entries row by row with all their components.
    pub fn coords(&self) -> Vec<f64> {
        let alg = self.algebra();
        let m = self.dim();
        let mut out: Vec<f64> = (0..m).map(|i| self.0[(i, i)].re()).collect();
        for i in 0..m {
            for j in i + 1..m {
                out.extend_from_slice(self.0[(i, j)].components(alg));
            }
        }
        out
    }

    pub fn from_coords(alg: Algebra, m: usize, coords: &[f64]) -> Self {
        let b = alg.beta();
        assert_eq!(
            coords.len(),
            m + b * m * (m - 1) / 2,
            "Hermitian::from_coords: wrong length"
        );
        let mut a = Matrix::zeros(alg, m, m);
        for i in 0..m {
            a[(i, i)] = Scalar::real(coords[i]);
        }
        let mut rest = coords[m..].chunks_exact(b);
        for i in 0..m {
            for j in i + 1..m {
                let s = Scalar::from_components(alg, rest.next().expect("length checked"))
                    .expect("chunk length equals beta");
                a[(i, j)] = s;
                a[(j, i)] = s.conj();
            }
        }
        Hermitian(a)
    }
}

/// Square upper-triangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperTriangular {
    m: Matrix,
    positive_diagonal: bool,
}

impl UpperTriangular {
    /// Checks shape and the zero pattern; the positive-diagonal flag is
    /// derived from the entries.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "triangular matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_upper_triangular() {
            return Err(Error::NotUpperTriangular);
        }
        let positive_diagonal = (0..m.rows()).all(|i| m[(i, i)].imag_abs_max() == 0.0 && m[(i, i)].re() > 0.0);
        Ok(UpperTriangular { m, positive_diagonal })
    }

    pub fn has_positive_diagonal(&self) -> bool {
        self.positive_diagonal
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_re(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re()).collect()
    }
}

/// Outcome of running the Cholesky recursion as far as it goes.
#[derive(Clone, Debug, PartialEq)]
pub enum Definiteness {
    PositiveDefinite,
    /// Pivot `index` vanished within tolerance; earlier pivots were positive.
    Singular {
        index: usize,
    },
    Indefinite {
        index: usize,
        pivot: f64,
    },
}

fn cholesky_core(a: &Matrix) -> std::result::Result<Matrix, (usize, f64, Matrix)> {
    let m = a.rows();
    let mut t = Matrix::zeros(a.algebra(), m, m);
    for i in 0..m {
        let mut d = a[(i, i)].re();
        for k in 0..i {
            d -= t[(k, i)].norm_sqr();
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err((i, d, t));
        }
        let tii = d.sqrt();
        t[(i, i)] = Scalar::real(tii);
        for j in i + 1..m {
            let mut s = a[(i, j)];
            for k in 0..i {
                s -= t[(k, i)].conj() * t[(k, j)];
            }
            t[(i, j)] = s.scale(1.0 / tii);
        }
    }
    Ok(t)
}

/// `u(A)`: the upper-triangular `T` with positive real diagonal and `A = T* T`.
pub fn cholesky_upper(a: &Hermitian) -> Result<UpperTriangular> {
    match cholesky_core(a.as_matrix()) {
        Ok(t) => Ok(UpperTriangular {
            m: t,
            positive_diagonal: true,
        }),
        Err((index, pivot, _)) => Err(Error::NotPositiveDefinite { index, pivot }),
    }
}

/// `l(A)`: the lower-triangular `L` with positive real diagonal and `A = L* L`.
pub fn cholesky_lower(a: &Hermitian) -> Result<Matrix> {
    let u = cholesky_upper(&a.reversed()).map_err(|e| match e {
        Error::NotPositiveDefinite { index, pivot } => Error::NotPositiveDefinite {
            index: a.dim() - 1 - index,
            pivot,
        },
        other => other,
    })?;
    Ok(u.as_matrix().reversed())
}

/// `A = L* diag(D) L` with `L` unit upper triangular; `D_i = t_ii^2`.
pub fn ldl_decompose(a: &Hermitian) -> Result<(UpperTriangular, Vec<f64>)> {
    let t = cholesky_upper(a)?;
    let m = t.dim();
    let diag = t.diagonal_re();
    let mut l = t.into_matrix();
    for i in 0..m {
        let inv = 1.0 / diag[i];
        for j in i..m {
            l[(i, j)] = l[(i, j)].scale(inv);
        }
    }
    Ok((
        UpperTriangular::new(l).expect("scaled Cholesky factor stays upper triangular"),
        diag.iter().map(|d| d * d).collect(),
    ))
}

/// Logs of the Cholesky pivots `t_ii^2` of `A = T* T`; the leading minor
/// `|A_p|` is the product of the first `p`.
pub fn log_leading_pivots(a: &Hermitian) -> Result<Vec<f64>> {
    Ok(cholesky_upper(a)?.diagonal_re().iter().map(|t| 2.0 * t.ln()).collect())
}

/// Logs of the pivots `l_ii^2` of `A = L* L`, `L` lower; the trailing minor
/// on rows `p..m` is the product of pivots `p..m`.
pub fn log_trailing_pivots(a: &Hermitian) -> Result<Vec<f64>> {
    let mut p = log_leading_pivots(&a.reversed()).map_err(|e| match e {
        Error::NotPositiveDefinite { index, pivot } => Error::NotPositiveDefinite {
            index: a.dim() - 1 - index,
            pivot,
        },
        other => other,
    })?;
    p.reverse();
    Ok(p)
}

pub fn leading_principal_minor_dets(a: &Hermitian) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    Ok(log_leading_pivots(a)?
        .into_iter()
        .map(|lp| {
            acc += lp;
            acc.exp()
        })
        .collect())
}

pub fn log_det_hermitian_pd(a: &Hermitian) -> Result<f64> {
    Ok(log_leading_pivots(a)?.iter().sum())
}

pub fn det_hermitian_pd(a: &Hermitian) -> Result<f64> {
    log_det_hermitian_pd(a).map(f64::exp)
}

/// Runs the Cholesky recursion and reports where, if anywhere, it stops.
pub fn classify(a: &Hermitian) -> Definiteness {
    let m = a.as_matrix();
    match cholesky_core(m) {
        Ok(_) => Definiteness::PositiveDefinite,
        Err((index, pivot, _)) => {
            if pivot.abs() <= PIVOT_TOL * m.frobenius_norm() {
                Definiteness::Singular { index }
            } else {
                Definiteness::Indefinite { index, pivot }
            }
        }
    }
}

pub fn invert_upper_triangular(t: &UpperTriangular) -> Result<UpperTriangular> {
    let a = t.as_matrix();
    let m = a.rows();
    let mut x = Matrix::zeros(a.algebra(), m, m);
    let mut dinv = Vec::with_capacity(m);
    for i in 0..m {
        dinv.push(a[(i, i)].inv().ok_or(Error::SingularMatrix)?);
    }
    for j in 0..m {
        x[(j, j)] = dinv[j];
        for i in (0..j).rev() {
            let mut s = Scalar::ZERO;
            for k in i + 1..=j {
                s += a[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -(dinv[i] * s);
        }
    }
    if !x.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(UpperTriangular {
        m: x,
        positive_diagonal: t.positive_diagonal,
    })
}

/// Inverse of a lower-triangular matrix, through the adjoint.
pub fn invert_lower_triangular(l: &Matrix) -> Result<Matrix> {
    if !l.is_lower_triangular() {
        return Err(Error::Domain("matrix is not lower triangular".into()));
    }
    let u = UpperTriangular::new(l.adjoint())?;
    Ok(invert_upper_triangular(&u)?.into_matrix().adjoint())
}

/// `A^{-1} = T^{-1} T^{-*}` for `A = T* T`.
pub fn inverse_hermitian_pd(a: &Hermitian) -> Result<Hermitian> {
    let ti = invert_upper_triangular(&cholesky_upper(a)?)?.into_matrix();
    Ok(Hermitian::symmetrized(&ti * &ti.adjoint()))
}
