//! The λ-deformed Fock basis `|n⟩_λ = e^{λa}|n⟩ / √L_n(−λ²)`.
//!
//! The basis vectors are normalized but not orthogonal. Each one is a finite
//! superposition of `|0⟩ … |n⟩`, so the expansion matrix (column `n` holds
//! the standard components of `|n⟩_λ`) is upper triangular with a positive
//! diagonal `1/√L_n`.
//!
//! All sums below run over exactly the indices where every factorial
//! argument is nonnegative. With that convention every term of a given sum
//! carries the same power parity of `λ`, so sums are accumulated as
//! magnitudes in log space and the common sign is applied once.

use std::sync::{Arc, OnceLock};

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::oracle::{BasisTag, StateVector};
use crate::specfun::{laguerre0_log, log_factorial, LogValue};

/// A value of `λ` with its Laguerre table `ln L_n(−λ²)`, `n ≤ max_n`.
#[derive(Debug, Clone)]
pub struct LambdaBasis {
    lambda: f64,
    max_n: usize,
    log_laguerre: Vec<f64>,
    eta: f64,
    gram: OnceLock<Array2<f64>>,
    pub(crate) squeeze_radius: OnceLock<f64>,
}

impl LambdaBasis {
    pub fn new(lambda: f64, max_n: usize) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
        }
        if max_n == 0 {
            return Err(Error::InvalidParameter("max_n must be positive".into()));
        }
        let log_laguerre = (0..=max_n as u64)
            .map(|n| laguerre0_log(n, lambda))
            .collect();
        Ok(LambdaBasis {
            lambda,
            max_n,
            log_laguerre,
            eta: 1.0 / (1.0 + lambda * lambda),
            gram: OnceLock::new(),
            squeeze_radius: OnceLock::new(),
        })
    }

    pub fn shared(lambda: f64, max_n: usize) -> Result<Arc<Self>> {
        Self::new(lambda, max_n).map(Arc::new)
    }

    /// Build from `η ∈ (0, 1]` with `λ = √((1−η)/η) ≥ 0`.
    pub fn from_eta(eta: f64, max_n: usize) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} not in (0, 1]"
            )));
        }
        Self::new(((1.0 - eta) / eta).sqrt(), max_n)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `ln L_n(−λ²)`, from the table when `n ≤ max_n`.
    pub fn log_laguerre(&self, n: usize) -> f64 {
        self.log_laguerre
            .get(n)
            .copied()
            .unwrap_or_else(|| laguerre0_log(n as u64, self.lambda))
    }

    pub(crate) fn lambda_pow(&self, e: i64) -> LogValue {
        debug_assert!(e >= 0, "negative power of lambda");
        LogValue::powi_of(self.lambda, e as u64)
    }

    /// Coefficient of `|m⟩` in `|n⟩_λ`:
    /// `√(n!) λ^{n−m} / [(n−m)! √(m! L_n)]`, zero for `m > n`.
    pub fn ket_coeff(&self, n: usize, m: usize) -> LogValue {
        if m > n {
            return LogValue::ZERO;
        }
        let mag = 0.5 * log_factorial(n as u64)
            - log_factorial((n - m) as u64)
            - 0.5 * log_factorial(m as u64)
            - 0.5 * self.log_laguerre(n);
        self.lambda_pow((n - m) as i64) * LogValue::new(mag, 1)
    }

    /// Analytic Gram matrix `G_{mn} = ⟨m|n⟩_λ` for `m, n ≤ max_n`, cached.
    pub fn gram(&self) -> &Array2<f64> {
        self.gram
            .get_or_init(|| gram_matrix_analytic(self, self.max_n + 1))
    }
}

/// Coefficients of a state over `{|n⟩_λ}`.
#[derive(Debug, Clone)]
pub struct LambdaExpansion {
    pub basis: Arc<LambdaBasis>,
    pub coeffs: Array1<C64>,
}

impl LambdaExpansion {
    pub fn new(basis: Arc<LambdaBasis>, coeffs: Array1<C64>) -> Self {
        LambdaExpansion { basis, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `c† G c` with the analytic Gram matrix.
    pub fn norm_sqr(&self) -> f64 {
        gram_quadratic_form(&self.basis, &self.coeffs)
    }

    /// Standard-basis vector of dimension `dim` (at least `len()`).
    pub fn to_standard(&self, dim: usize) -> StateVector {
        expansion_to_standard(&self.basis, &self.coeffs, dim.max(self.len()))
    }

    /// Same coefficients tagged as a λ-basis `StateVector`.
    pub fn as_state_vector(&self) -> StateVector {
        StateVector {
            coeffs: self.coeffs.clone(),
            basis: BasisTag::Lambda(self.basis.lambda),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        LambdaExpansion {
            basis: self.basis.clone(),
            coeffs: self.coeffs.mapv(|c| c * s),
        }
    }
}

/// `|n⟩_λ` over the standard basis, in a space of dimension `dim`.
pub fn lambda_ket(n: usize, basis: &LambdaBasis, dim: usize) -> Result<StateVector> {
    if n >= dim {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: dim,
        });
    }
    let mut v = StateVector::zeros(dim);
    for m in 0..=n {
        v.coeffs[m] = C64::new(basis.ket_coeff(n, m).value(), 0.0);
    }
    Ok(v)
}

/// `e^{λa}|n⟩ / √L_n` by the finite exponential series (`a^{n+1}|n⟩ = 0`).
pub fn apply_t_operator(n: usize, basis: &LambdaBasis, dim: usize) -> Result<StateVector> {
    if n >= dim {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: dim,
        });
    }
    let lambda = basis.lambda();
    let mut term = vec![0.0; n + 1];
    term[n] = 1.0;
    let mut sum = term.clone();
    for j in 1..=n {
        // term ← (λ/j) a term
        let mut next = vec![0.0; n + 1];
        for k in 1..=n {
            next[k - 1] = term[k] * (k as f64).sqrt() * lambda / j as f64;
        }
        term = next;
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    let scale = (-0.5 * basis.log_laguerre(n)).exp();
    let mut v = StateVector::zeros(dim);
    for (m, s) in sum.into_iter().enumerate() {
        v.coeffs[m] = C64::new(s * scale, 0.0);
    }
    Ok(v)
}

/// `_λ⟨m|n⟩_λ = [L_m L_n]^{−1/2} Σ_k λ^{2k+m−n} √(n! m!) / [k!(n−k)!(m−n+k)!]`.
///
/// The arguments are ordered so that the result is exactly symmetric.
pub fn overlap_analytic(m: usize, n: usize, basis: &LambdaBasis) -> f64 {
    if m == n {
        return 1.0;
    }
    let (m, n) = if m < n { (m, n) } else { (n, m) };
    let (mi, ni) = (m as i64, n as i64);
    let k_lo = (ni - mi).max(0) as u64;
    let root = 0.5 * (log_factorial(n as u64) + log_factorial(m as u64));
    let sum = LogValue::sum((k_lo..=n as u64).map(|k| {
        let ki = k as i64;
        basis.lambda_pow(2 * ki + mi - ni)
            * LogValue::new(
                root - log_factorial(k)
                    - log_factorial((ni - ki) as u64)
                    - log_factorial((mi - ni + ki) as u64),
                1,
            )
    }));
    (sum * LogValue::new(-0.5 * (basis.log_laguerre(m) + basis.log_laguerre(n)), 1)).value()
}

/// Analytic Gram matrix of `|0⟩_λ … |size−1⟩_λ`.
pub fn gram_matrix_analytic(basis: &LambdaBasis, size: usize) -> Array2<f64> {
    let mut g = Array2::zeros((size, size));
    for m in 0..size {
        for n in m..size {
            let v = overlap_analytic(m, n, basis);
            g[[m, n]] = v;
            g[[n, m]] = v;
        }
    }
    g
}

/// Expansion matrix `E`: column `n` holds the standard components of `|n⟩_λ`.
pub fn expansion_matrix(basis: &LambdaBasis, size: usize) -> Array2<f64> {
    let mut e = Array2::zeros((size, size));
    for n in 0..size {
        for m in 0..=n {
            e[[m, n]] = basis.ket_coeff(n, m).value();
        }
    }
    e
}

/// Gram matrix `EᵀE` from raw coefficient dot products.
pub fn gram_matrix_from_kets(basis: &LambdaBasis, size: usize) -> Array2<f64> {
    let e = expansion_matrix(basis, size);
    e.t().dot(&e)
}

/// `c† G c` for λ-basis coefficients.
pub fn gram_quadratic_form(basis: &LambdaBasis, coeffs: &Array1<C64>) -> f64 {
    let size = coeffs.len();
    let owned;
    let g = if size <= basis.max_n() + 1 {
        basis.gram()
    } else {
        owned = gram_matrix_analytic(basis, size);
        &owned
    };
    let mut acc = 0.0;
    for m in 0..size {
        if coeffs[m] == C64::new(0.0, 0.0) {
            continue;
        }
        for n in 0..size {
            acc += (coeffs[m].conj() * coeffs[n]).re * g[[m, n]];
        }
    }
    acc
}

/// `Σ_n c_n |n⟩_λ` over the standard basis.
pub fn expansion_to_standard(basis: &LambdaBasis, coeffs: &Array1<C64>, dim: usize) -> StateVector {
    let dim = dim.max(coeffs.len());
    let mut v = StateVector::zeros(dim);
    for (n, c) in coeffs.iter().enumerate() {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        for m in 0..=n {
            v.coeffs[m] += c * basis.ket_coeff(n, m).value();
        }
    }
    v
}

/// Inverse basis change: solve the upper-triangular system `E c = v`.
pub fn standard_to_expansion(basis: &Arc<LambdaBasis>, v: &StateVector) -> LambdaExpansion {
    let v = v.to_standard();
    let size = v.dim();
    let e = expansion_matrix(basis, size);
    let mut c = Array1::<C64>::zeros(size);
    for m in (0..size).rev() {
        let mut acc = v.coeffs[m];
        for n in (m + 1)..size {
            acc -= c[n] * e[[m, n]];
        }
        c[m] = acc / e[[m, m]];
    }
    LambdaExpansion::new(basis.clone(), c)
}

/// Plain Cholesky factorization `G = LLᵀ`; `None` if a pivot is not positive.
pub fn cholesky(g: &Array2<f64>) -> Option<Array2<f64>> {
    let n = g.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = g[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[[j, j]] = d;
        for i in (j + 1)..n {
            let mut s = g[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / d;
        }
    }
    Some(l)
}

/// Positive-definiteness certificate for the analytic Gram matrix.
///
/// The expansion matrix `E` is upper triangular with diagonal `1/√L_n > 0`,
/// so `G = EᵀE` is its Cholesky factorization and `G` is positive definite
/// whenever the analytic entries reproduce `EᵀE`. This works even when the
/// smallest eigenvalue of `G` is far below double precision (large `λ`),
/// where a floating-point Cholesky of `G` itself breaks down.
#[derive(Debug, Clone, Copy)]
pub struct GramCertificate {
    pub symmetric: bool,
    pub min_factor_diagonal: f64,
    /// `max |G_analytic − EᵀE|`.
    pub factor_residual: f64,
    /// Whether a direct floating-point Cholesky of the analytic matrix succeeded.
    pub direct_cholesky: bool,
}

impl GramCertificate {
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        self.symmetric && self.min_factor_diagonal > 0.0 && self.factor_residual <= tol
    }
}

pub fn gram_certificate(basis: &LambdaBasis, size: usize) -> GramCertificate {
    let g = gram_matrix_analytic(basis, size);
    let e = expansion_matrix(basis, size);
    let from_factor = e.t().dot(&e);
    let symmetric = (0..size).all(|i| (0..size).all(|j| g[[i, j]] == g[[j, i]]));
    let min_factor_diagonal = (0..size).map(|i| e[[i, i]]).fold(f64::INFINITY, f64::min);
    let factor_residual = (&g - &from_factor)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    GramCertificate {
        symmetric,
        min_factor_diagonal,
        factor_residual,
        direct_cholesky: cholesky(&g).is_some(),
    }
}

/// Coefficient and target index of a ladder action on `|n⟩_λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderStep {
    pub coef: f64,
    pub index: usize,
}

/// `a|n⟩_λ = √n √(L_{n−1}/L_n) |n−1⟩_λ`; `None` for `a|0⟩_λ = 0`.
pub fn ladder_down(n: usize, basis: &LambdaBasis) -> Result<Option<LadderStep>> {
    if n > basis.max_n() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: basis.max_n(),
        });
    }
    if n == 0 {
        return Ok(None);
    }
    let coef =
        (n as f64).sqrt() * (0.5 * (basis.log_laguerre(n - 1) - basis.log_laguerre(n))).exp();
    Ok(Some(LadderStep { coef, index: n - 1 }))
}

/// `a†_λ|n⟩_λ = √(n+1) √(L_{n+1}/L_n) |n+1⟩_λ`.
pub fn ladder_up(n: usize, basis: &LambdaBasis) -> Result<LadderStep> {
    if n + 1 > basis.max_n() {
        return Err(Error::IndexOutOfRange {
            index: n + 1,
            limit: basis.max_n(),
        });
    }
    let coef =
        ((n + 1) as f64).sqrt() * (0.5 * (basis.log_laguerre(n + 1) - basis.log_laguerre(n))).exp();
    Ok(LadderStep { coef, index: n + 1 })
}

/// `√(n!/L_n)`, the scalar in `aⁿ|n⟩_λ = √(n!/L_n)|0⟩_λ`.
pub fn iterated_lowering_norm(n: usize, basis: &LambdaBasis) -> f64 {
    (0.5 * (log_factorial(n as u64) - basis.log_laguerre(n))).exp()
}

/// `Σ_l λ^{2l + shift} / [l! (top − l)! (shift + l)!]` over the `l` with
/// nonnegative factorial arguments.
///
/// Every term carries the sign of `λ^shift`, so the sum runs as a ratio
/// recurrence from the first term, rescaled to stay in range.
pub(crate) fn lambda_factorial_sum(basis: &LambdaBasis, top: i64, shift: i64) -> LogValue {
    if top < 0 {
        return LogValue::ZERO;
    }
    let lo = (-shift).max(0);
    if lo > top {
        return LogValue::ZERO;
    }
    let first = basis.lambda_pow(2 * lo + shift)
        * LogValue::new(
            -log_factorial(lo as u64)
                - log_factorial((top - lo) as u64)
                - log_factorial((shift + lo) as u64),
            1,
        );
    if first.is_zero() {
        // λ = 0: only a λ^0 term survives, and it is the first one
        return first;
    }
    const RESCALE: f64 = 1e250;
    let lam2 = basis.lambda * basis.lambda;
    let (mut term, mut sum, mut ln_scale) = (1.0f64, 1.0f64, 0.0f64);
    for l in lo..top {
        term *= lam2 * (top - l) as f64 / ((l + 1) as f64 * (shift + l + 1) as f64);
        sum += term;
        if sum > RESCALE {
            term /= RESCALE;
            sum /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    LogValue::new(first.ln_mag + ln_scale + sum.ln(), first.sign)
}

/// `_λ⟨m|(a†_λ)^k|n⟩_λ = (n+k)! √(m!/(n! L_n L_m)) Σ_l λ^{2l+m−n−k} / [l!(n+k−l)!(m−n−k+l)!]`.
pub fn matel_creation_power(m: usize, n: usize, k: usize, basis: &LambdaBasis) -> f64 {
    let (mi, ni, ki) = (m as i64, n as i64, k as i64);
    let sum = lambda_factorial_sum(basis, ni + ki, mi - ni - ki);
    let pre = log_factorial((n + k) as u64)
        + 0.5
            * (log_factorial(m as u64)
                - log_factorial(n as u64)
                - basis.log_laguerre(n)
                - basis.log_laguerre(m));
    (sum * LogValue::new(pre, 1)).value()
}

/// `_λ⟨m|a^k|n⟩_λ = √(m! n!/(L_n L_m)) Σ_l λ^{2l+m−n+k} / [l!(n−k−l)!(m−n+k+l)!]`.
///
/// Zero for `k > n`.
pub fn matel_annihilation_power(m: usize, n: usize, k: usize, basis: &LambdaBasis) -> f64 {
    if k > n {
        return 0.0;
    }
    let (mi, ni, ki) = (m as i64, n as i64, k as i64);
    let sum = lambda_factorial_sum(basis, ni - ki, mi - ni + ki);
    let pre = 0.5
        * (log_factorial(m as u64) + log_factorial(n as u64)
            - basis.log_laguerre(n)
            - basis.log_laguerre(m));
    (sum * LogValue::new(pre, 1)).value()
}

/// `_λ⟨m|(a†_λ)^r a^k|n⟩_λ = √(n!) [(n−k+r)!/(n−k)!] √(m!/(L_m L_n))
///  Σ_l λ^{2l+m−n+k−r} / [l!(n−k+r−l)!(m−n+k−r+l)!]`.
///
/// Zero for `k > n`.
pub fn matel_normal_ordered(m: usize, n: usize, r: usize, k: usize, basis: &LambdaBasis) -> f64 {
    if k > n {
        return 0.0;
    }
    let (mi, ni, ri, ki) = (m as i64, n as i64, r as i64, k as i64);
    let sum = lambda_factorial_sum(basis, ni - ki + ri, mi - ni + ki - ri);
    let pre = 0.5 * log_factorial(n as u64) + log_factorial((n - k + r) as u64)
        - log_factorial((n - k) as u64)
        + 0.5 * (log_factorial(m as u64) - basis.log_laguerre(m) - basis.log_laguerre(n));
    (sum * LogValue::new(pre, 1)).value()
}
