//! Finite-difference Jacobian determinants of the change-of-variables
//! propositions: linear maps `Y = AXB + C`, Hermitian congruence
//! `Y = AXA* + C`, inversion `Y = S^{-1} + C` and the polar/Cholesky map
//! `X = V₁ u(S)`.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{cholesky_upper, inverse_hermitian_pd, log_det_hermitian_pd, Algebra, Hermitian, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::samplers::{sample_stiefel_uniform, RngStream};

use super::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// `Y = AXB + C` on `n x m` matrices.
    Linear,
    /// `Y = AXA* + C` on Hermitian `m x m` matrices.
    Congruence,
    /// `Y = S^{-1} + C` on positive definite `m x m` matrices.
    Inverse,
    /// `X = V₁ u(S)`: `n x m` matrices against `S = X*X` and a Stiefel chart.
    Polar,
    /// `S = T*T` for upper-triangular `T` with positive diagonal.
    Triangular,
}

impl Transform {
    pub const ALL: [Transform; 5] = [
        Transform::Linear,
        Transform::Congruence,
        Transform::Inverse,
        Transform::Polar,
        Transform::Triangular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Transform::Linear => "linear",
            Transform::Congruence => "congruence",
            Transform::Inverse => "inverse",
            Transform::Polar => "polar-cholesky",
            Transform::Triangular => "triangular",
        }
    }

    /// Real dimension of the domain.
    pub fn dimension(self, alg: Algebra, n: usize, m: usize) -> usize {
        let b = alg.beta();
        match self {
            Transform::Linear | Transform::Polar => b * n * m,
            _ => m + b * m * (m - 1) / 2,
        }
    }
}

/// A transform with fixed constants and an evaluation point.
#[derive(Clone, Debug)]
pub struct TransformUnderTest {
    pub transform: Transform,
    pub alg: Algebra,
    pub n: usize,
    pub m: usize,
    /// `[A, B, C]`, `[A, C]`, `[C]`, `[H]` (an `n x n` unitary) or `[]`.
    pub constants: Vec<Matrix>,
    /// Real coordinates of the evaluation point.
    pub point: Vec<f64>,
}

fn gaussian(rng: &mut RngStream, alg: Algebra, r: usize, c: usize) -> Matrix {
    let coords: Vec<f64> = (0..r * c * alg.beta()).map(|_| rng.normal()).collect();
    Matrix::from_coords(alg, r, c, &coords)
}

/// Well-conditioned square matrix `I + G/(2√n)`.
fn near_identity(rng: &mut RngStream, alg: Algebra, n: usize) -> Matrix {
    &Matrix::identity(alg, n) + &gaussian(rng, alg, n, n).scale(0.5 / (n as f64).sqrt())
}

fn random_pd(rng: &mut RngStream, alg: Algebra, m: usize) -> Hermitian {
    let g = gaussian(rng, alg, m + 1, m).scale(1.0 / ((m + 1) as f64).sqrt());
    Hermitian::gram(&g)
        .try_add(&Hermitian::identity(alg, m).scale(0.5))
        .expect("same shape")
}

impl TransformUnderTest {
    pub fn random(transform: Transform, alg: Algebra, n: usize, m: usize, rng: &mut RngStream) -> Result<Self> {
        if m == 0 || (matches!(transform, Transform::Linear | Transform::Polar) && n < m) {
            return Err(Error::Domain(format!("invalid dimensions n={n}, m={m}")));
        }
        let (constants, point) = match transform {
            Transform::Linear => {
                let c = vec![
                    near_identity(rng, alg, n),
                    near_identity(rng, alg, m),
                    gaussian(rng, alg, n, m),
                ];
                (c, gaussian(rng, alg, n, m).coords())
            }
            Transform::Congruence => {
                let c = vec![near_identity(rng, alg, m), random_pd(rng, alg, m).into_matrix()];
                let x = Hermitian::symmetrized(gaussian(rng, alg, m, m));
                (c, x.coords())
            }
            Transform::Inverse => (
                vec![random_pd(rng, alg, m).into_matrix()],
                random_pd(rng, alg, m).coords(),
            ),
            Transform::Polar => {
                let h = sample_stiefel_uniform(rng, alg, n, n)?;
                (vec![h], random_pd(rng, alg, m).coords())
            }
            Transform::Triangular => {
                let t = cholesky_upper(&random_pd(rng, alg, m))?;
                (vec![], triangular_coords(t.as_matrix()))
            }
        };
        Ok(TransformUnderTest {
            transform,
            alg,
            n,
            m,
            constants,
            point,
        })
    }

    /// The map on real coordinates.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (alg, n, m) = (self.alg, self.n, self.m);
        let c = &self.constants;
        Ok(match self.transform {
            Transform::Linear => {
                let x = Matrix::from_coords(alg, n, m, x);
                (&(&(&c[0] * &x) * &c[1]) + &c[2]).coords()
            }
            Transform::Congruence => {
                let x = Hermitian::from_coords(alg, m, x);
                let y = &(&(&c[0] * x.as_matrix()) * &c[0].adjoint()) + &c[1];
                Hermitian::symmetrized(y).coords()
            }
            Transform::Inverse => {
                let s = Hermitian::from_coords(alg, m, x);
                let y = &inverse_hermitian_pd(&s)?.into_matrix() + &c[0];
                Hermitian::symmetrized(y).coords()
            }
            Transform::Polar => polar_map(alg, n, m, &c[0], x)?.coords(),
            Transform::Triangular => Hermitian::gram(&triangular_from_coords(alg, m, x)).coords(),
        })
    }

    /// `log |J|` claimed by the change-of-variables formula at the point.
    pub fn log_formula(&self) -> Result<f64> {
        let (alg, n, m) = (self.alg, self.n as f64, self.m as f64);
        let b = alg.b();
        let c = &self.constants;
        Ok(match self.transform {
            Transform::Linear => {
                m * b / 2.0 * log_det_hermitian_pd(&Hermitian::gram(&c[0]))?
                    + n * b / 2.0 * log_det_hermitian_pd(&Hermitian::gram(&c[1]))?
            }
            Transform::Congruence => ((m - 1.0) * b / 2.0 + 1.0) * log_det_hermitian_pd(&Hermitian::gram(&c[0]))?,
            Transform::Inverse => {
                (-b * (m - 1.0) - 2.0) * log_det_hermitian_pd(&Hermitian::from_coords(alg, self.m, &self.point))?
            }
            Transform::Polar => {
                let s = Hermitian::from_coords(alg, self.m, &self.point);
                -m * 2f64.ln() + (b * (n - m + 1.0) / 2.0 - 1.0) * log_det_hermitian_pd(&s)?
            }
            Transform::Triangular => {
                let t = triangular_from_coords(alg, self.m, &self.point);
                m * 2f64.ln()
                    + (0..self.m)
                        .map(|i| (b * (m - 1.0 - i as f64) + 1.0) * t[(i, i)].re().ln())
                        .sum::<f64>()
            }
        })
    }

    /// Real coordinates of the point, extended by the zero Stiefel chart
    /// coordinates for the polar map.
    fn domain_point(&self) -> Vec<f64> {
        let mut x = self.point.clone();
        if self.transform == Transform::Polar {
            let extra = self.transform.dimension(self.alg, self.n, self.m) - x.len();
            x.extend(std::iter::repeat_n(0.0, extra));
        }
        x
    }
}

/// Diagonal (real) then strictly upper entries of an upper-triangular matrix.
fn triangular_coords(t: &Matrix) -> Vec<f64> {
    let alg = t.algebra();
    let m = t.rows();
    let mut out: Vec<f64> = (0..m).map(|i| t[(i, i)].re()).collect();
    for i in 0..m {
        for j in i + 1..m {
            out.extend_from_slice(t[(i, j)].components(alg));
        }
    }
    out
}

fn triangular_from_coords(alg: Algebra, m: usize, x: &[f64]) -> Matrix {
    let h = Hermitian::from_coords(alg, m, x).into_matrix();
    let mut t = Matrix::zeros(alg, m, m);
    for i in 0..m {
        for j in i..m {
            t[(i, j)] = h[(i, j)];
        }
    }
    t
}

/// `X = H C(ξ) E_m u(S)` with `C(ξ) = (I + K*K/4)^{-1} (I + K/2)²` the Cayley
/// transform of the skew-Hermitian `K` built from `ξ`. At `ξ = 0` the
/// differential `H* dV₁` equals `dK E_m`, so the chart coordinates carry the
/// Stiefel measure with unit density there.
fn polar_map(alg: Algebra, n: usize, m: usize, h: &Matrix, x: &[f64]) -> Result<Matrix> {
    let b = alg.beta();
    let hdim = m + b * m * (m - 1) / 2;
    let s = Hermitian::from_coords(alg, m, &x[..hdim]);
    let mut xi = x[hdim..].iter().copied();
    let mut k = Matrix::zeros(alg, n, n);
    let mut comps = [0.0; 4];
    let mut next = |len: usize, offset: usize, comps: &mut [f64; 4]| {
        comps.fill(0.0);
        for c in comps.iter_mut().skip(offset).take(len) {
            *c = xi.next().expect("chart coordinate count");
        }
        Scalar::from_components(alg, &comps[..b]).expect("beta components")
    };
    for j in 0..m {
        // Imaginary diagonal of the skew-Hermitian block.
        let d = next(b - 1, 1, &mut comps);
        k[(j, j)] = d;
        for i in j + 1..n {
            let z = next(b, 0, &mut comps);
            k[(i, j)] = z;
            k[(j, i)] = -z.conj();
        }
    }
    let id = Hermitian::identity(alg, n);
    let kk = Hermitian::gram(&k).scale(0.25);
    let left = inverse_hermitian_pd(&id.try_add(&kk)?)?.into_matrix();
    let half = &Matrix::identity(alg, n) + &k.scale(0.5);
    let cayley = &left * &(&half * &half);
    let v1 = (h * &cayley).block(0, 0, n, m);
    Ok(&v1 * cholesky_upper(&s)?.as_matrix())
}

/// `log |det J|` of `f` at `x` by central differences with step
/// `1e-6 · max(1, |x_i|)`, and the condition estimate of `J`.
pub fn fd_log_abs_det(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64]) -> Result<(f64, f64)> {
    let d = x.len();
    let mut jac = DMatrix::<f64>::zeros(d, d);
    let mut xp = x.to_vec();
    for j in 0..d {
        let h = 1e-6 * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        if fp.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "map returns {} coordinates for {d}",
                fp.len()
            )));
        }
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let sv = jac.clone().singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= 1e10) {
        return Err(Error::IllConditioned(cond));
    }
    let lu = jac.lu();
    let u = lu.u();
    Ok(((0..d).map(|i| u[(i, i)].abs().ln()).sum(), cond))
}

/// Compares the finite-difference determinant with the formula.
pub fn jacobian_check(t: &TransformUnderTest) -> Result<VerificationReport> {
    let start = Instant::now();
    let x = t.domain_point();
    let (fd, cond) = fd_log_abs_det(|p| t.apply(p), &x)?;
    let formula = t.log_formula()?;
    let r = VerificationReport::new(format!("jacobian/{}", t.transform.name()))
        .param("beta", t.alg.beta())
        .param("n", t.n)
        .param("m", t.m)
        .param("condition", cond)
        .count(2 * x.len() as u64)
        .compare_log(fd, formula, 1e-5);
    Ok(r.timed(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        // y = 2x·3: |J| = 6.
        let t = TransformUnderTest {
            transform: Transform::Linear,
            alg: Algebra::Real,
            n: 1,
            m: 1,
            constants: vec![
                Matrix::from_real(Algebra::Real, 1, 1, &[2.0]),
                Matrix::from_real(Algebra::Real, 1, 1, &[3.0]),
                Matrix::from_real(Algebra::Real, 1, 1, &[1.0]),
            ],
            point: vec![0.3],
        };
        assert!((t.log_formula().unwrap() - 6f64.ln()).abs() < 1e-14);
        assert!(jacobian_check(&t).unwrap().pass);
        // y = 1/s at s = 2: |J| = 1/4.
        let t = TransformUnderTest {
            transform: Transform::Inverse,
            alg: Algebra::Real,
            n: 1,
            m: 1,
            constants: vec![Matrix::from_real(Algebra::Real, 1, 1, &[0.0])],
            point: vec![2.0],
        };
        assert!((t.log_formula().unwrap() - 0.25f64.ln()).abs() < 1e-14);
        assert!(jacobian_check(&t).unwrap().pass);
    }

    #[test]
    fn random_points_pass() {
        let mut rng = RngStream::new(17, 0);
        for transform in Transform::ALL {
            for alg in Algebra::ALL {
                for (n, m) in [(1, 1), (3, 2), (2, 2)] {
                    let t = TransformUnderTest::random(transform, alg, n, m, &mut rng).unwrap();
                    let r = jacobian_check(&t).unwrap();
                    assert!(r.pass, "{r} {:?}", r.params);
                }
            }
        }
    }
}
