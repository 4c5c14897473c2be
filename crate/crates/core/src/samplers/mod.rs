//! Constructive samplers: a Bartlett-type Riesz sampler, uniform Stiefel
//! frames, and the Kotz-Riesz, T-Riesz, Pearson II-Riesz and beta-Riesz
//! constructions built from them.
//!
//! Type II constructions use the lower Cholesky factor wherever type I uses
//! the upper one: the type II densities are invariant only under congruence
//! by lower-triangular matrices.

mod output;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{cholesky_upper, invert_upper_triangular, Algebra, Hermitian, Matrix, Scalar};
use crate::densities::{cone_shift, invert_variant_factor, variant_factor, DistributionSpec, Kind, Variant};
use crate::error::{Error, Result};
use crate::hwv::WeightVector;
use crate::specfun::{weighted_gamma_arguments, Sign};

pub use output::{write_csv, write_jsonl, SampleHeader};

/// Deterministic random stream identified by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

/// Words of keystream reserved for each parallel chunk.
const CHUNK_WORDS: u128 = 1 << 40;
/// Draws per parallel chunk.
pub const CHUNK: usize = 1 << 16;

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// The same stream positioned at the start of chunk `index`.
    pub fn chunk(seed: u64, stream: u64, index: u64) -> Self {
        let mut s = RngStream::new(seed, stream);
        s.rng.set_word_pos(index as u128 * CHUNK_WORDS);
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Scalar whose `β` real components are i.i.d. `N(0, var)`.
fn gaussian_scalar(rng: &mut RngStream, alg: Algebra, var: f64) -> Scalar {
    let sd = var.sqrt();
    let mut c = [0.0; 4];
    for x in c.iter_mut().take(alg.beta()) {
        *x = sd * rng.normal();
    }
    Scalar::from_components(alg, &c[..alg.beta()]).expect("beta components")
}

fn gaussian_matrix(rng: &mut RngStream, alg: Algebra, rows: usize, cols: usize, var: f64) -> Matrix {
    let mut x = Matrix::zeros(alg, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            x[(i, j)] = gaussian_scalar(rng, alg, var);
        }
    }
    x
}

fn gamma(rng: &mut RngStream, shape: f64, rate: f64) -> Result<f64> {
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Domain(format!("gamma shape {shape}: {e}")))?;
    Ok(g.sample(rng))
}

/// Bartlett-type Riesz draw with scale `Ξ`.
///
/// Type I: `T` upper with `t_ii² ~ Gamma(a + k_i − (i−1)β/2, rate β)`,
/// `W = T*T`, `V = u(Ξ)* W u(Ξ)`. Type II: `t_ii² ~ Gamma(a − k_i − (m−i)β/2,
/// rate β)`, `W = T T*`, `V = l(Ξ)* W l(Ξ)`. Off-diagonal components are
/// `N(0, 1/(2β))` in both.
pub fn sample_riesz_bartlett(
    rng: &mut RngStream,
    alg: Algebra,
    a: f64,
    kappa: &WeightVector,
    xi: &Hermitian,
    variant: Variant,
) -> Result<Hermitian> {
    let factor = variant_factor(xi, variant)?;
    riesz_with_factor(rng, alg, a, kappa, &factor, variant)
}

fn riesz_shapes(alg: Algebra, a: f64, kappa: &WeightVector, variant: Variant) -> Result<Vec<f64>> {
    let sign = match variant {
        Variant::I => Sign::Plus,
        Variant::II => Sign::Minus,
    };
    let shapes = weighted_gamma_arguments(alg, a, kappa, sign);
    if let Some((i, s)) = shapes.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
        return Err(Error::Domain(format!("Bartlett gamma shape {s} ≤ 0 at i = {}", i + 1)));
    }
    Ok(shapes)
}

/// Bartlett root `R` of a standard Riesz draw `W = R* R`: `R = T` (type I,
/// so `R = u(W)`) or `R = T*` (type II, so `R = l(W)`). Using the root
/// directly avoids refactoring draws with tiny pivots.
fn riesz_root(rng: &mut RngStream, alg: Algebra, a: f64, kappa: &WeightVector, variant: Variant) -> Result<Matrix> {
    let m = kappa.len();
    let b = alg.b();
    let shapes = riesz_shapes(alg, a, kappa, variant)?;
    let mut t = Matrix::zeros(alg, m, m);
    for i in 0..m {
        t[(i, i)] = Scalar::real(gamma(rng, shapes[i], b)?.sqrt());
        for j in i + 1..m {
            t[(i, j)] = gaussian_scalar(rng, alg, 1.0 / (2.0 * b));
        }
    }
    Ok(match variant {
        Variant::I => t,
        Variant::II => t.adjoint(),
    })
}

fn riesz_with_factor(
    rng: &mut RngStream,
    alg: Algebra,
    a: f64,
    kappa: &WeightVector,
    factor: &Matrix,
    variant: Variant,
) -> Result<Hermitian> {
    let r = riesz_root(rng, alg, a, kappa, variant)?;
    Ok(Hermitian::gram(&(&r * factor)))
}

/// Uniform `n x m` Stiefel frame: Gram-Schmidt, run twice, on a Gaussian matrix.
pub fn sample_stiefel_uniform(rng: &mut RngStream, alg: Algebra, n: usize, m: usize) -> Result<Matrix> {
    if m == 0 || n < m {
        return Err(Error::Domain(format!(
            "Stiefel frame needs n ≥ m ≥ 1, got n={n}, m={m}"
        )));
    }
    let mut h = gaussian_matrix(rng, alg, n, m, 1.0);
    for j in 0..m {
        for _pass in 0..2 {
            for k in 0..j {
                // v ← v − h_k (h_k* v); scalars act on the right.
                let mut c = Scalar::ZERO;
                for i in 0..n {
                    c += h[(i, k)].conj() * h[(i, j)];
                }
                for i in 0..n {
                    let d = h[(i, k)] * c;
                    h[(i, j)] -= d;
                }
            }
        }
        let norm = (0..n).map(|i| h[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            h[(i, j)] = h[(i, j)].scale(1.0 / norm);
        }
    }
    Ok(h)
}

fn require(spec: &DistributionSpec, kind: Kind) -> Result<()> {
    if spec.kind() != kind {
        return Err(Error::Unsupported(format!(
            "{} is not a {kind:?} family",
            spec.family()
        )));
    }
    Ok(())
}

/// Standard Kotz-Riesz draw `X = H₁ R`, `R` the Bartlett root of a Riesz
/// draw `V` with shape `nβ/2`. `R = Q u(V)` for a unitary `Q` and `H₁ Q` is
/// again uniform, so this equals `H₁ u(V)` in law.
fn standard_kotz_riesz(
    rng: &mut RngStream,
    alg: Algebra,
    n: usize,
    kappa: &WeightVector,
    variant: Variant,
) -> Result<Matrix> {
    let m = kappa.len();
    let r = riesz_root(rng, alg, n as f64 * alg.b() / 2.0, kappa, variant)?;
    let h = sample_stiefel_uniform(rng, alg, n, m)?;
    Ok(&h * &r)
}

/// Kotz-Riesz draw `Y = μ + u(Θ)* X u(Σ)` with `X` standard.
pub fn sample_kotz_riesz(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Matrix> {
    require(spec, Kind::KotzRiesz)?;
    let x = standard_kotz_riesz(rng, spec.algebra(), spec.n(), spec.kappa(), spec.variant())?;
    let s = spec.scales.kr.as_ref().expect("Kotz-Riesz scales");
    Ok(&(&(&s.u_theta.adjoint() * &x) * &s.u_sigma) + &s.mu)
}

pub fn sample_riesz(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Hermitian> {
    require(spec, Kind::Riesz)?;
    let s = spec.scales.riesz.as_ref().expect("Riesz scales");
    riesz_with_factor(
        rng,
        spec.algebra(),
        spec.a().expect("validated"),
        spec.kappa(),
        &s.factor,
        spec.variant(),
    )
}

/// `X` Kotz-Riesz with weight `τ`, and the variant factor (`u(U)` or `l(U)`)
/// of `U` Riesz with shape `νβ/2`.
///
/// Dividing by a triangular root is not invariant under right rotations, so
/// `X f(U)⁻¹` picks up an extra `q_ρ` factor; the T-Riesz and beta draws
/// compensate by giving `U` the weight `κ − ρ`. Pearson's `U + X*X` absorbs
/// it and keeps `κ`.
fn pair(rng: &mut RngStream, spec: &DistributionSpec) -> Result<(Matrix, Matrix)> {
    let alg = spec.algebra();
    let kappa = match spec.kind() {
        Kind::Pearson => spec.kappa().clone(),
        _ => cone_shift(spec.kappa(), alg),
    };
    let u = riesz_root(
        rng,
        alg,
        spec.nu().expect("validated") * alg.b() / 2.0,
        &kappa,
        spec.variant(),
    )?;
    let x = standard_kotz_riesz(rng, alg, spec.n(), spec.tau(), spec.variant())?;
    Ok((x, u))
}

/// The shared draw `(X, U)` behind the T-Riesz, Pearson and beta constructions.
pub fn sample_pair(rng: &mut RngStream, spec: &DistributionSpec) -> Result<(Matrix, Hermitian)> {
    if !matches!(spec.kind(), Kind::Pearson | Kind::TRiesz | Kind::Beta) {
        return Err(Error::Unsupported(format!(
            "{} has no (X, U) construction",
            spec.family()
        )));
    }
    let (x, root) = pair(rng, spec)?;
    Ok((x, Hermitian::gram(&root)))
}

/// `X f(A)^{-1}` with `f` the variant's Cholesky factor.
fn right_divide(x: &Matrix, a: &Hermitian, variant: Variant) -> Result<Matrix> {
    divide_by_factor(x, &variant_factor(a, variant)?, variant)
}

fn divide_by_factor(x: &Matrix, f: &Matrix, variant: Variant) -> Result<Matrix> {
    Ok(x * &invert_variant_factor(f, variant)?)
}

/// Standard T-Riesz draw `T = X u(U)^{-1}` (type II: `l(U)`).
pub fn sample_t_riesz(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Matrix> {
    require(spec, Kind::TRiesz)?;
    let (x, u) = pair(rng, spec)?;
    divide_by_factor(&x, &u, spec.variant())
}

/// T-Riesz draw with the location and scales of the spec applied.
pub fn sample_t_riesz_general(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Matrix> {
    let t = sample_t_riesz(rng, spec)?;
    let s = spec.scales.t.as_ref().expect("T-Riesz scales");
    if !s.general {
        return Ok(t);
    }
    Ok(&(&(&s.u_delta_inv * &t) * &s.pi_factor) + &s.mu)
}

/// `R = X u(U + X*X)^{-1}` (type II: `l`).
pub fn sample_pearson2_riesz(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Matrix> {
    require(spec, Kind::Pearson)?;
    let (x, u) = pair(rng, spec)?;
    let sum = Hermitian::gram(&u).try_add(&Hermitian::gram(&x))?;
    right_divide(&x, &sum, spec.variant())
}

/// Standard beta-Riesz type II draw `F = T*T`.
pub fn sample_beta_riesz2(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Hermitian> {
    require(spec, Kind::Beta)?;
    let (x, u) = pair(rng, spec)?;
    Ok(Hermitian::gram(&divide_by_factor(&x, &u, spec.variant())?))
}

/// Nonstandardized draw `Z = u(Θ)* F u(Θ)` (k-variant: `l(Θ)`).
pub fn sample_beta_riesz2_nonstd(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Hermitian> {
    let f = sample_beta_riesz2(rng, spec)?;
    Ok(match spec.scales.beta.as_ref() {
        Some(s) => f.congruence(&s.factor),
        None => f,
    })
}

/// `S = u(Δ)^{-1} T u(Π) + μ` for type I, `u(Δ)^{-1} T l(Π) + μ` for type II.
pub fn affine_transform_sample(
    t: &Matrix,
    mu: &Matrix,
    delta: &Hermitian,
    pi: &Hermitian,
    variant: Variant,
) -> Result<Matrix> {
    if t.rows() != delta.dim() || t.cols() != pi.dim() || mu.shape() != t.shape() {
        return Err(Error::DimensionMismatch(format!(
            "T is {}x{}, μ is {}x{}, Δ is {}x{}, Π is {}x{}",
            t.rows(),
            t.cols(),
            mu.rows(),
            mu.cols(),
            delta.dim(),
            delta.dim(),
            pi.dim(),
            pi.dim()
        )));
    }
    let d = invert_upper_triangular(&cholesky_upper(delta)?)?.into_matrix();
    let p = variant_factor(pi, variant)?;
    (&d * t).matmul(&p)?.try_add(mu)
}

/// One draw from the spec's distribution, location and scales included.
pub fn sample(rng: &mut RngStream, spec: &DistributionSpec) -> Result<Matrix> {
    match spec.kind() {
        Kind::KotzRiesz => sample_kotz_riesz(rng, spec),
        Kind::Riesz => sample_riesz(rng, spec).map(Hermitian::into_matrix),
        Kind::Pearson => sample_pearson2_riesz(rng, spec),
        Kind::TRiesz => sample_t_riesz_general(rng, spec),
        Kind::Beta => sample_beta_riesz2_nonstd(rng, spec).map(Hermitian::into_matrix),
    }
}

/// Maps `count` draws through `f` in parallel chunks of [`CHUNK`]; chunk `c`
/// reads the keystream of `(seed, stream)` from its own fixed offset, so the
/// result depends only on the arguments.
pub fn map_draws<T: Send>(
    count: usize,
    seed: u64,
    stream: u64,
    f: impl Fn(&mut RngStream) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::chunk(seed, stream, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// `count` draws from the spec.
pub fn sample_many(spec: &DistributionSpec, count: usize, seed: u64, stream: u64) -> Result<Vec<Matrix>> {
    map_draws(count, seed, stream, |rng| sample(rng, spec))
}

/// Uniform draw in `[lo, hi)`, exposed for proposal samplers.
pub fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests;
