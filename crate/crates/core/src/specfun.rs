//! Log-space special functions: gamma, weighted multivariate gamma, generalized
//! Pochhammer symbols, c-/k-beta functions and Stiefel volumes.

use std::f64::consts::PI;

use crate::algebra::{Algebra, Hermitian, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::hwv::{log_q_kappa, log_q_kappa_of_inverse, WeightVector};
use crate::quad::Quadrature;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `log |Γ(x)|`; `+∞` at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return (PI / s.abs()).ln() - ln_gamma(1.0 - x);
    }
    // Small positive integers are exact.
    if x.fract() == 0.0 && x <= 21.0 {
        let mut f = 1.0_f64;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return f.ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Which weighted gamma function: `Γ_m[a, κ]` or `Γ_m[a, −κ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

fn pi_term(m: usize, alg: Algebra) -> f64 {
    (m * (m - 1)) as f64 * alg.b() / 4.0 * PI.ln()
}

/// Arguments `a + k_i − (i−1)β/2` (plus) or `a − k_i − (m−i)β/2` (minus) of
/// the gamma factors of the weighted multivariate gamma function.
pub fn weighted_gamma_arguments(alg: Algebra, a: f64, kappa: &WeightVector, sign: Sign) -> Vec<f64> {
    let m = kappa.len();
    let b = alg.b();
    kappa
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, k)| match sign {
            Sign::Plus => a + k - i as f64 * b / 2.0,
            Sign::Minus => a - k - (m - 1 - i) as f64 * b / 2.0,
        })
        .collect()
}

/// Every violated existence condition of `Γ_m[a, ±κ]`, phrased as the failing
/// inequality. `label` names the first argument (e.g. `"a"` or `"νβ/2"`).
pub fn weighted_gamma_violations(alg: Algebra, label: &str, a: f64, kappa: &WeightVector, sign: Sign) -> Vec<String> {
    let m = kappa.len();
    if m == 0 {
        return vec!["weight vector is empty".into()];
    }
    let mut out = Vec::new();
    if !a.is_finite() || kappa.as_slice().iter().any(|k| !k.is_finite()) {
        out.push(format!("{label} and the weights must be finite"));
        return out;
    }
    let base = (m - 1) as f64 * alg.b() / 2.0;
    let (bound, stated) = match sign {
        Sign::Plus => (base - kappa.last(), "Re({label}) > (m−1)β/2 − k_m"),
        Sign::Minus => (base + kappa.first(), "Re({label}) > (m−1)β/2 + k_1"),
    };
    let stated = stated.replace("{label}", label);
    if !(a > bound) {
        out.push(format!("{stated} violated: {a} ≤ {bound}"));
    }
    for (i, arg) in weighted_gamma_arguments(alg, a, kappa, sign).iter().enumerate() {
        if !(*arg > 0.0) {
            let term = match sign {
                Sign::Plus => "a + k_i − (i−1)β/2",
                Sign::Minus => "a − k_i − (m−i)β/2",
            };
            out.push(format!(
                "gamma argument {term} must be positive for {label}: {arg} ≤ 0 at i = {}",
                i + 1
            ));
        }
    }
    out
}

fn domain(violations: Vec<String>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain(violations.join("; ")))
    }
}

/// `log Γ_m^β[a] = (m(m−1)β/4) log π + Σ log Γ(a − (i−1)β/2)`.
pub fn log_mv_gamma(m: usize, alg: Algebra, a: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let bound = (m - 1) as f64 * alg.b() / 2.0;
    if !(a > bound) {
        return Err(Error::Domain(format!("Re(a) > (m−1)β/2 violated: {a} ≤ {bound}")));
    }
    let b = alg.b();
    Ok(pi_term(m, alg) + (0..m).map(|i| ln_gamma(a - i as f64 * b / 2.0)).sum::<f64>())
}

/// `log Γ_m^β[a, κ]` (plus) or `log Γ_m^β[a, −κ]` (minus).
pub fn log_mv_gamma_weighted(alg: Algebra, a: f64, kappa: &WeightVector, sign: Sign) -> Result<f64> {
    domain(weighted_gamma_violations(alg, "a", a, kappa, sign))?;
    let m = kappa.len();
    Ok(pi_term(m, alg)
        + weighted_gamma_arguments(alg, a, kappa, sign)
            .iter()
            .map(|&x| ln_gamma(x))
            .sum::<f64>())
}

/// `log |(x)_n|` and the sign of the rising factorial `x (x+1) ... (x+n−1)`.
pub fn pochhammer_signed(x: f64, n: u64) -> (f64, f64) {
    let mut log = 0.0;
    let mut sign = 1.0;
    for j in 0..n {
        let f = x + j as f64;
        if f < 0.0 {
            sign = -sign;
        }
        log += f.abs().ln();
    }
    (log, sign)
}

/// Generalized Pochhammer symbol `[a]_κ = ∏ (a − (i−1)β/2)_{k_i}` for
/// nonnegative integer weights, as `(log |value|, sign)`.
pub fn gen_pochhammer_signed(alg: Algebra, a: f64, kappa: &WeightVector) -> Result<(f64, f64)> {
    if !kappa.as_slice().iter().all(|k| *k >= 0.0 && k.fract() == 0.0) {
        return Err(Error::Domain(format!(
            "product form needs nonnegative integer weights, got {kappa}"
        )));
    }
    let b = alg.b();
    let mut log = 0.0;
    let mut sign = 1.0;
    for (i, &k) in kappa.as_slice().iter().enumerate() {
        let (l, s) = pochhammer_signed(a - i as f64 * b / 2.0, k as u64);
        log += l;
        sign *= s;
    }
    Ok((log, sign))
}

/// `log [a]_κ^β`. Integer weights use the product; other weights use
/// `Γ_m[a, κ] / Γ_m[a]`.
pub fn log_gen_pochhammer(m: usize, alg: Algebra, a: f64, kappa: &WeightVector) -> Result<f64> {
    if kappa.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has {} entries, m = {m}",
            kappa.len()
        )));
    }
    match gen_pochhammer_signed(alg, a, kappa) {
        Ok((log, sign)) if sign > 0.0 && log.is_finite() => Ok(log),
        Ok(_) => Err(Error::Domain(format!(
            "[{a}]_κ with κ = {kappa} is not positive; its logarithm is undefined"
        ))),
        Err(_) => Ok(log_mv_gamma_weighted(alg, a, kappa, Sign::Plus)? - log_mv_gamma(m, alg, a)?),
    }
}

fn check_same_len(kappa: &WeightVector, tau: &WeightVector) -> Result<()> {
    if kappa.len() != tau.len() {
        return Err(Error::DimensionMismatch(format!(
            "weight vectors of length {} and {}",
            kappa.len(),
            tau.len()
        )));
    }
    Ok(())
}

/// `log B_m^β[a, κ; b, τ] = log Γ_m[a,κ] + log Γ_m[b,τ] − log Γ_m[a+b, κ+τ]`.
pub fn log_c_beta(alg: Algebra, a: f64, kappa: &WeightVector, b: f64, tau: &WeightVector) -> Result<f64> {
    check_same_len(kappa, tau)?;
    Ok(
        log_mv_gamma_weighted(alg, a, kappa, Sign::Plus)? + log_mv_gamma_weighted(alg, b, tau, Sign::Plus)?
            - log_mv_gamma_weighted(alg, a + b, &(kappa + tau), Sign::Plus)?,
    )
}

/// `log B_m^β[a, −κ; b, −τ]` from the minus-sign weighted gammas.
pub fn log_k_beta(alg: Algebra, a: f64, kappa: &WeightVector, b: f64, tau: &WeightVector) -> Result<f64> {
    check_same_len(kappa, tau)?;
    Ok(
        log_mv_gamma_weighted(alg, a, kappa, Sign::Minus)? + log_mv_gamma_weighted(alg, b, tau, Sign::Minus)?
            - log_mv_gamma_weighted(alg, a + b, &(kappa + tau), Sign::Minus)?,
    )
}

/// `log Vol(V_{m,n}) = m log 2 + (mnβ/2) log π − log Γ_m^β[nβ/2]`.
pub fn log_stiefel_volume(n: usize, m: usize, alg: Algebra) -> Result<f64> {
    if m == 0 || n < m {
        return Err(Error::Domain(format!(
            "Stiefel manifold needs n ≥ m ≥ 1, got n={n}, m={m}"
        )));
    }
    let b = alg.b();
    let half = n as f64 * b / 2.0;
    Ok(m as f64 * 2f64.ln() + m as f64 * half * PI.ln() - log_mv_gamma(m, alg, half)?)
}

/// Integrates `etr{−A} |A|^{a−p} q_κ(A)` (plus) or with `q_κ(A^{-1})` (minus)
/// over the real positive definite cone for `m ∈ {1, 2}` and returns the log.
///
/// At `m = 2` the integration variables are the entries `a11, a22 > 0` and
/// `a12 ∈ (−√(a11 a22), √(a11 a22))`, so no Jacobian enters.
pub fn quadrature_gamma_oracle(m: usize, alg: Algebra, a: f64, kappa: &WeightVector, sign: Sign) -> Result<f64> {
    if alg != Algebra::Real || !(1..=2).contains(&m) {
        return Err(Error::Unsupported(format!(
            "quadrature oracle covers m ∈ {{1, 2}} with β = 1, got m = {m}, {alg}"
        )));
    }
    if kappa.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "weight vector length {} for m = {m}",
            kappa.len()
        )));
    }
    domain(weighted_gamma_violations(alg, "a", a, kappa, sign))?;
    let p = (m - 1) as f64 / 2.0 + 1.0;
    let log_integrand = |mat: Matrix| -> f64 {
        let h = Hermitian::symmetrized(mat);
        let q = match sign {
            Sign::Plus => log_q_kappa(&h, kappa),
            Sign::Minus => log_q_kappa_of_inverse(&h, kappa),
        };
        match (q, crate::algebra::log_det_hermitian_pd(&h)) {
            (Ok(q), Ok(ld)) => -h.trace() + (a - p) * ld + q,
            _ => f64::NEG_INFINITY,
        }
    };
    let quad = Quadrature::with_tol(1e-9);
    let total = if m == 1 {
        quad.half_line(0.0, |x| log_integrand(Matrix::from_real(alg, 1, 1, &[x])).exp())?
    } else {
        let inner_quad = Quadrature::with_tol(1e-10);
        let mut failure = None;
        let r = quad.half_line(0.0, |x11| {
            let outer = inner_quad.half_line(0.0, |x22| {
                let r = (x11 * x22).sqrt();
                match inner_quad.finite(-r, r, |x12| {
                    let mut mat = Matrix::from_diag(alg, &[x11, x22]);
                    mat[(0, 1)] = Scalar::real(x12);
                    mat[(1, 0)] = Scalar::real(x12);
                    log_integrand(mat).exp()
                }) {
                    Ok(v) => v.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            });
            outer.map(|v| v.value).unwrap_or(f64::NAN)
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        r
    };
    if !(total.value > 0.0) {
        return Err(Error::QuadratureFailure(format!(
            "nonpositive integral {}",
            total.value
        )));
    }
    Ok(total.value.ln())
}
