//! Coherent and squeezed states built on the λ-basis.
//!
//! `|α,λ⟩ = C_0 Σ αⁿ √L_n / √(n!) |n⟩_λ` is the canonical coherent state up to
//! the phase `e^{iλ Im α}`; `|ξ,λ⟩ = C_0 Σ ξⁿ √L_{2n} √((2n−1)!!/(2n)!!) |2n⟩_λ`
//! solves `(a − ξa†_λ)|ξ,λ⟩ = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{lambda_factorial_sum, LambdaBasis, LambdaExpansion};
use crate::oracle::{
    displacement_generator, expm_apply, lambda_squeeze_generator, squeeze_generator, stable_apply,
    StateVector,
};
use crate::specfun::{log_double_factorial, log_factorial, LogSumExp};

/// First truncation tried by [`Truncation::Auto`].
pub const AUTO_TRUNCATION_START: usize = 32;
/// Largest truncation [`Truncation::Auto`] will grow to.
pub const TRUNCATION_CAP: usize = 512;
/// Tail norm below which an automatic truncation is accepted.
pub const TAIL_TOL: f64 = 1e-14;
/// Relative increment at which the squeezed normalization series is cut.
pub const SQUEEZE_SERIES_TOL: f64 = 1e-13;
/// `|ξ|` must stay below this fraction of the estimated radius.
pub const SQUEEZE_GUARD_FACTOR: f64 = 0.95;
/// Number of phase rays used for the domain guard.
pub const GUARD_RAYS: usize = 8;

const SQUEEZE_SERIES_CAP: usize = 2000;
/// Increments may grow for a while before decaying; only a growth streak
/// this long, past `SQUEEZE_GROWTH_AFTER` terms, counts as divergence.
const SQUEEZE_GROWTH_STREAK: usize = 100;
const SQUEEZE_GROWTH_AFTER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Fixed(usize),
    Auto,
}

fn c64(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{−|α|²/2} Σ αⁿ/√(n!) |n⟩` truncated to `dim` levels.
pub fn canonical_coherent(alpha: C64, dim: usize) -> StateVector {
    let mut coeffs = Array1::zeros(dim);
    let (r, theta) = alpha.to_polar();
    for n in 0..dim {
        let mag = if n == 0 {
            (-0.5 * r * r).exp()
        } else if r == 0.0 {
            0.0
        } else {
            (-0.5 * r * r + n as f64 * r.ln() - 0.5 * log_factorial(n as u64)).exp()
        };
        coeffs[n] = C64::from_polar(mag, n as f64 * theta);
    }
    StateVector::standard(coeffs)
}

/// `ln C_0 = −λ Re α − |α|²/2`.
pub fn coherent_log_c0(alpha: C64, lambda: f64) -> f64 {
    -lambda * alpha.re - 0.5 * alpha.norm_sqr()
}

fn coherent_ln_abs(alpha: C64, basis: &LambdaBasis, n: usize) -> f64 {
    let r = alpha.norm();
    if n == 0 {
        return coherent_log_c0(alpha, basis.lambda());
    }
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    coherent_log_c0(alpha, basis.lambda()) + n as f64 * r.ln() + 0.5 * basis.log_laguerre(n)
        - 0.5 * log_factorial(n as u64)
}

/// `C_n = C_0 αⁿ √L_n / √(n!)`.
fn coherent_coeff(alpha: C64, basis: &LambdaBasis, n: usize) -> C64 {
    C64::from_polar(
        coherent_ln_abs(alpha, basis, n).exp(),
        n as f64 * alpha.arg(),
    )
}

/// Smallest truncation on the doubling ladder whose tail `Σ_{n≥N} |C_n|`
/// is below `TAIL_TOL`.
pub fn coherent_truncation(alpha: C64, basis: &LambdaBasis) -> Result<usize> {
    // The terms decay superexponentially once n ≫ |α|², so a finite horizon
    // beyond the cap bounds the tail.
    let horizon = TRUNCATION_CAP + 256;
    let ln_terms: Vec<f64> = (0..horizon)
        .map(|n| coherent_ln_abs(alpha, basis, n))
        .collect();
    if ln_terms[horizon - 1] > TAIL_TOL.ln() - 30.0 {
        return Err(Error::TruncationCap {
            cap: TRUNCATION_CAP,
            what: "lambda coherent state",
        });
    }
    let mut n = AUTO_TRUNCATION_START;
    while n <= TRUNCATION_CAP {
        let tail = ln_terms[n..].iter().copied().collect::<LogSumExp>().ln();
        if tail < TAIL_TOL.ln() {
            return Ok(n);
        }
        n *= 2;
    }
    Err(Error::TruncationCap {
        cap: TRUNCATION_CAP,
        what: "lambda coherent state",
    })
}

/// A λ-coherent state with its expansion over `|n⟩_λ`, `n < truncation`.
#[derive(Debug, Clone)]
pub struct LambdaCoherent {
    pub alpha: C64,
    pub expansion: LambdaExpansion,
    pub truncation: usize,
}

impl LambdaCoherent {
    pub fn basis(&self) -> &Arc<LambdaBasis> {
        &self.expansion.basis
    }

    pub fn c0(&self) -> C64 {
        self.expansion.coeffs[0]
    }

    pub fn to_standard(&self) -> StateVector {
        self.expansion.to_standard(self.truncation)
    }

    /// λ-basis norm through the analytic Gram matrix.
    pub fn lambda_norm(&self) -> f64 {
        self.expansion.norm_sqr().sqrt()
    }
}

pub fn lambda_coherent(
    alpha: C64,
    basis: &Arc<LambdaBasis>,
    truncation: Truncation,
) -> Result<LambdaCoherent> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    let n = match truncation {
        Truncation::Fixed(0) => {
            return Err(Error::InvalidParameter(
                "truncation must be positive".into(),
            ))
        }
        Truncation::Fixed(n) => n,
        Truncation::Auto => coherent_truncation(alpha, basis)?,
    };
    let coeffs = Array1::from_iter((0..n).map(|k| coherent_coeff(alpha, basis, k)));
    Ok(LambdaCoherent {
        alpha,
        expansion: LambdaExpansion::new(basis.clone(), coeffs),
        truncation: n,
    })
}

/// `⟨α,λ|β,λ⟩` from the double-sum kernel
/// `N Σ_{m,n} α*^m βⁿ Σ_k λ^{2k+m−n} / [k!(n−k)!(m−n+k)!]`.
pub fn coherent_overlap(alpha: C64, beta: C64, basis: &LambdaBasis) -> Result<C64> {
    let cutoff = coherent_truncation(alpha, basis)?.max(coherent_truncation(beta, basis)?);
    let lambda = basis.lambda();
    let ln_prefactor =
        -lambda * alpha.re - lambda * beta.re - 0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr();
    let (ra, ta) = alpha.to_polar();
    let (rb, tb) = beta.to_polar();
    let ln_pow = |r: f64, k: usize| {
        if k == 0 {
            0.0
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            k as f64 * r.ln()
        }
    };
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..cutoff {
        for n in 0..cutoff {
            let kernel = lambda_factorial_sum(basis, n as i64, m as i64 - n as i64);
            if kernel.is_zero() {
                continue;
            }
            let ln_mag = ln_prefactor + ln_pow(ra, m) + ln_pow(rb, n) + kernel.ln_mag;
            let phase = -(m as f64) * ta + n as f64 * tb;
            acc += C64::from_polar(f64::from(kernel.sign) * ln_mag.exp(), phase);
        }
    }
    Ok(acc)
}

/// `e^{iλ(Im β − Im α)} ⟨α|β⟩` with the canonical coherent-state overlap.
pub fn coherent_overlap_closed_form(alpha: C64, beta: C64, lambda: f64) -> C64 {
    let phase = C64::new(0.0, lambda * (beta.im - alpha.im)).exp();
    phase * (alpha.conj() * beta - 0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr()).exp()
}

/// `e^{iλ Im α} D(α)|0⟩` through the dense exponential, truncation-checked.
pub fn displaced_form(alpha: C64, basis: &LambdaBasis, dim: usize) -> Result<StateVector> {
    let v = stable_apply(dim, |d| {
        expm_apply(&displacement_generator(alpha, d)?, &StateVector::vacuum(d))
    })?;
    Ok(v.scaled(C64::new(0.0, basis.lambda() * alpha.im).exp()))
}

/// `e^{−it/2} |αe^{−it}, λ⟩`, kept normalized.
///
/// `H_λ` is not Hermitian, so multiplying each `C_n` by `e^{−i(n+½)t}`
/// (see [`evolve_coefficients`]) rescales the λ-norm by
/// `exp(λ(Re α(t) − Re α))`; the normalized family member is returned here.
pub fn evolve(state: &LambdaCoherent, t: f64) -> Result<LambdaCoherent> {
    let alpha_t = state.alpha * C64::new(0.0, -t).exp();
    let mut out = lambda_coherent(alpha_t, state.basis(), Truncation::Fixed(state.truncation))?;
    out.expansion = out.expansion.scaled(C64::new(0.0, -0.5 * t).exp());
    Ok(out)
}

/// `C_n ↦ C_n e^{−i(n+½)t}` applied literally to the expansion.
pub fn evolve_coefficients(state: &LambdaCoherent, t: f64) -> LambdaExpansion {
    let coeffs = Array1::from_iter(
        state
            .expansion
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * C64::new(0.0, -(n as f64 + 0.5) * t).exp()),
    );
    LambdaExpansion::new(state.basis().clone(), coeffs)
}

/// `ln √((2n−1)!!/(2n)!!)`.
fn ln_sqrt_dfact_ratio(n: usize) -> f64 {
    let n = n as i64;
    0.5 * (log_double_factorial(2 * n - 1).expect("n >= 0")
        - log_double_factorial(2 * n).expect("n >= 0"))
}

/// `C_0 Σ ξⁿ √((2n−1)!!/(2n)!!) |2n⟩` over `dim` standard levels.
pub fn squeezed_vacuum(xi: C64, dim: usize) -> Result<StateVector> {
    let r = xi.norm();
    if !(r < 1.0) {
        return Err(Error::InvalidParameter(format!("|xi| = {r} >= 1")));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let ln_r2 = 2.0 * r.ln();
    let mut norm = LogSumExp::default();
    let mut n = 0usize;
    loop {
        let ln_term = if n == 0 {
            0.0
        } else {
            n as f64 * ln_r2 + 2.0 * ln_sqrt_dfact_ratio(n)
        };
        norm.push(ln_term);
        if n > 0 && ln_term < norm.ln() + (1e-17f64).ln() {
            break;
        }
        n += 1;
        if n > 1_000_000 {
            return Err(Error::Divergent("squeezed vacuum normalization"));
        }
    }
    let ln_c0 = -0.5 * norm.ln();
    let mut coeffs = Array1::zeros(dim);
    let theta = xi.arg();
    for k in 0..dim.div_ceil(2) {
        let ln_mag = if k == 0 {
            ln_c0
        } else {
            ln_c0 + k as f64 * r.ln() + ln_sqrt_dfact_ratio(k)
        };
        coeffs[2 * k] = C64::from_polar(ln_mag.exp(), k as f64 * theta);
    }
    Ok(StateVector::standard(coeffs))
}

/// Incremental partial sums of the unnormalized λ-squeezed series
/// `Σ_{n<K} ξⁿ √L_{2n} √((2n−1)!!/(2n)!!) |2n⟩_λ`, accumulated over the
/// standard basis. `partial_norm_sqr()` after `K` steps is the `K × K`
/// square partial sum of the `C_0^{−2}` series.
#[derive(Debug, Clone)]
pub struct SqueezeSeries {
    xi: C64,
    lambda: f64,
    vector: Vec<C64>,
    norm_sqr: f64,
    terms: usize,
}

impl SqueezeSeries {
    pub fn new(xi: C64, lambda: f64) -> Self {
        SqueezeSeries {
            xi,
            lambda,
            vector: Vec::new(),
            norm_sqr: 0.0,
            terms: 0,
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn partial_norm_sqr(&self) -> f64 {
        self.norm_sqr
    }

    /// Standard-basis image of the current partial sum.
    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    /// Add the next term `ξⁿ √L_{2n} √(…) |2n⟩_λ` and return the new partial sum.
    pub fn push_term(&mut self) -> f64 {
        let n = self.terms;
        let top = 2 * n;
        self.vector.resize(top + 1, c64(0.0));
        let (r, theta) = self.xi.to_polar();
        let ln_head = if n == 0 {
            0.0
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            n as f64 * r.ln() + ln_sqrt_dfact_ratio(n) + 0.5 * log_factorial(top as u64)
        };
        let phase = C64::from_polar(1.0, n as f64 * theta);
        let ln_lam = self.lambda.abs().ln();
        let mut cross = c64(0.0);
        let mut own = 0.0;
        if ln_head > f64::NEG_INFINITY {
            // √L_{2n} cancels against the 1/√L_{2n} inside |2n⟩_λ.
            let m_lo = if self.lambda == 0.0 { top } else { 0 };
            for m in m_lo..=top {
                let ln_mag = if n == 0 {
                    0.0
                } else {
                    ln_head
                        + if top == m {
                            0.0
                        } else {
                            (top - m) as f64 * ln_lam
                        }
                        - log_factorial((top - m) as u64)
                        - 0.5 * log_factorial(m as u64)
                };
                let sign = if self.lambda < 0.0 && (top - m) % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                let w = phase * (sign * ln_mag.exp());
                cross += self.vector[m].conj() * w;
                own += w.norm_sqr();
                self.vector[m] += w;
            }
        }
        self.norm_sqr += 2.0 * cross.re + own;
        self.terms += 1;
        self.norm_sqr
    }
}

/// Parameters of the convergence-radius scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusScan {
    pub r_min: f64,
    pub r_max: f64,
    pub factor: f64,
    /// Number of partial sums spanned by the Cauchy test.
    pub window: usize,
    pub threshold: f64,
    /// Series terms examined per grid point before declaring divergence.
    pub max_terms: usize,
}

impl Default for RadiusScan {
    fn default() -> Self {
        RadiusScan {
            r_min: 0.01,
            r_max: 2.0,
            factor: 1.05,
            window: 20,
            threshold: 1e-12,
            max_terms: 1500,
        }
    }
}

impl RadiusScan {
    pub fn grid(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = self.r_min;
        while r <= self.r_max * (1.0 + 1e-12) {
            out.push(r);
            r *= self.factor;
        }
        out
    }

    /// Whether the partial sums at `|ξ| = r` pass the Cauchy test within `max_terms`.
    pub fn converges_at(&self, r: f64, phase: f64, lambda: f64) -> bool {
        let mut series = SqueezeSeries::new(C64::from_polar(r, phase), lambda);
        let mut sums = Vec::with_capacity(self.max_terms);
        for _ in 0..self.max_terms {
            let s = series.push_term();
            if !s.is_finite() {
                return false;
            }
            sums.push(s);
            let k = sums.len();
            if k > self.window && (s - sums[k - 1 - self.window]).abs() <= self.threshold * s.abs()
            {
                return true;
            }
        }
        false
    }
}

/// Largest grid radius along `ξ = r e^{i·phase}` for which the `C_0^{−2}`
/// partial sums pass the Cauchy test (and all smaller grid points do too).
pub fn radius_estimate(basis: &LambdaBasis, phase: f64) -> f64 {
    radius_estimate_with(basis.lambda(), phase, &RadiusScan::default())
}

pub fn radius_estimate_with(lambda: f64, phase: f64, scan: &RadiusScan) -> f64 {
    let mut last = 0.0;
    for r in scan.grid() {
        if !scan.converges_at(r, phase, lambda) {
            return last;
        }
        last = r;
    }
    last
}

/// Minimum of [`radius_estimate`] over `GUARD_RAYS` equally spaced phases; cached on the basis.
pub fn radius_guard(basis: &LambdaBasis) -> f64 {
    *basis.squeeze_radius.get_or_init(|| {
        (0..GUARD_RAYS)
            .into_par_iter()
            .map(|j| radius_estimate(basis, 2.0 * PI * j as f64 / GUARD_RAYS as f64))
            .reduce(|| f64::INFINITY, f64::min)
    })
}

fn check_squeeze_domain(xi: C64, basis: &LambdaBasis) -> Result<()> {
    let radius = radius_guard(basis);
    let guard = SQUEEZE_GUARD_FACTOR * radius;
    if !(xi.norm() < guard) {
        return Err(Error::Domain {
            xi: xi.norm(),
            radius,
            guard,
        });
    }
    Ok(())
}

/// Triple-sum series for `C_0^{−2}`, cut when the square partial sums settle.
/// Returns `(C_0^{-2}, number of terms)`.
pub fn squeezed_norm_series(xi: C64, basis: &LambdaBasis) -> Result<(f64, usize)> {
    let (r, theta) = xi.to_polar();
    let ln_r = r.ln();
    let ln_term = |n: usize, m: usize| -> (f64, i8) {
        // ξⁿ ξ*^m (2n−1)!!(2m−1)!! Σ_k λ^{2k+2m−2n}/[k!(2n−k)!(2m−2n+k)!]
        let inner = lambda_factorial_sum(basis, 2 * n as i64, 2 * m as i64 - 2 * n as i64);
        if inner.is_zero() {
            return (f64::NEG_INFINITY, 0);
        }
        let pow = if n + m == 0 {
            0.0
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            (n + m) as f64 * ln_r
        };
        let ln = pow
            + log_double_factorial(2 * n as i64 - 1).expect("n >= 0")
            + log_double_factorial(2 * m as i64 - 1).expect("m >= 0")
            + inner.ln_mag;
        (ln, inner.sign)
    };
    let mut total = 0.0;
    let mut settled = 0;
    let mut last_inc = f64::INFINITY;
    let mut growing = 0;
    for k in 0..SQUEEZE_SERIES_CAP {
        // new border of the k × k square: T_{k,k} + 2 Re Σ_{j<k} T_{k,j}
        let (ln, s) = ln_term(k, k);
        let mut inc = f64::from(s) * ln.exp();
        for j in 0..k {
            let (ln, s) = ln_term(k, j);
            inc += 2.0 * f64::from(s) * ln.exp() * ((k as f64 - j as f64) * theta).cos();
        }
        total += inc;
        if !total.is_finite() {
            return Err(Error::Divergent("lambda squeezed normalization"));
        }
        let mag = inc.abs();
        if k > 0 && mag <= SQUEEZE_SERIES_TOL * total.abs() {
            settled += 1;
            if settled >= 3 {
                return Ok((total, k + 1));
            }
        } else {
            settled = 0;
        }
        if k > 0 && mag >= last_inc {
            growing += 1;
        } else {
            growing = 0;
        }
        if growing >= SQUEEZE_GROWTH_STREAK && k >= SQUEEZE_GROWTH_AFTER {
            return Err(Error::Divergent("lambda squeezed normalization"));
        }
        last_inc = mag;
    }
    Err(Error::Divergent("lambda squeezed normalization"))
}

/// `C_0` of the λ-squeezed state from the triple-sum series.
pub fn squeezed_norm_constant(xi: C64, basis: &LambdaBasis) -> Result<f64> {
    check_squeeze_domain(xi, basis)?;
    let (inv_sq, _) = squeezed_norm_series(xi, basis)?;
    Ok(inv_sq.powf(-0.5))
}

/// Unnormalized λ-basis coefficients `ξⁿ √L_{2n} √((2n−1)!!/(2n)!!)` on `|2n⟩_λ`, `n < terms`.
pub fn squeezed_raw_coeffs(xi: C64, basis: &LambdaBasis, terms: usize) -> Array1<C64> {
    let len = if terms == 0 { 0 } else { 2 * terms - 1 };
    let mut coeffs = Array1::zeros(len);
    let (r, theta) = xi.to_polar();
    for n in 0..terms {
        let ln_mag = if n == 0 {
            0.0
        } else {
            n as f64 * r.ln() + 0.5 * basis.log_laguerre(2 * n) + ln_sqrt_dfact_ratio(n)
        };
        coeffs[2 * n] = C64::from_polar(ln_mag.exp(), n as f64 * theta);
    }
    coeffs
}

/// Number of terms after which `Σ |C_0 ξⁿ √L_{2n} √(…)|` (each `|2n⟩_λ` has
/// unit norm) is below `TAIL_TOL`.
fn squeezed_support_terms(xi: C64, basis: &LambdaBasis, c0: f64) -> Result<usize> {
    let r = xi.norm();
    if r == 0.0 {
        return Ok(1);
    }
    let ln_abs = |n: usize| {
        c0.ln() + n as f64 * r.ln() + 0.5 * basis.log_laguerre(2 * n) + ln_sqrt_dfact_ratio(n)
    };
    // Past the peak the terms decay at least geometrically; bound the tail by
    // the next term over (1 − ratio).
    for n in 1..4 * TRUNCATION_CAP {
        let (cur, next) = (ln_abs(n), ln_abs(n + 1));
        let ratio = (next - cur).exp();
        if ratio < 1.0 && cur - (1.0 - ratio).ln() < TAIL_TOL.ln() {
            return Ok(n);
        }
    }
    Err(Error::TruncationCap {
        cap: 4 * TRUNCATION_CAP,
        what: "lambda squeezed state",
    })
}

/// `C_0` through the Gram quadratic form of the unnormalized coefficients.
pub fn squeezed_norm_constant_gram(xi: C64, basis: &LambdaBasis, terms: usize) -> f64 {
    let coeffs = squeezed_raw_coeffs(xi, basis, terms);
    let size = coeffs.len();
    let mut acc = 0.0;
    for m in (0..size).step_by(2) {
        for n in (0..size).step_by(2) {
            acc += (coeffs[m].conj() * coeffs[n]).re * crate::fock::overlap_analytic(m, n, basis);
        }
    }
    acc.powf(-0.5)
}

/// A λ-squeezed state `|ξ,λ⟩` with support on even λ-basis indices.
#[derive(Debug, Clone)]
pub struct LambdaSqueezed {
    pub xi: C64,
    pub expansion: LambdaExpansion,
    pub norm_constant: f64,
    /// Number of series terms `n` (support `|0⟩_λ … |2(terms−1)⟩_λ`).
    pub terms: usize,
}

impl LambdaSqueezed {
    pub fn basis(&self) -> &Arc<LambdaBasis> {
        &self.expansion.basis
    }

    /// Standard-basis image, padded to `dim` (at least the support size).
    pub fn to_standard(&self, dim: usize) -> StateVector {
        let mut series = SqueezeSeries::new(self.xi, self.basis().lambda());
        for _ in 0..self.terms {
            series.push_term();
        }
        let v = Array1::from_iter(series.vector().iter().map(|c| c * self.norm_constant));
        StateVector::standard(v).resized(dim.max(series.vector().len()))
    }

    pub fn support_dim(&self) -> usize {
        self.expansion.len()
    }
}

pub fn lambda_squeezed(xi: C64, basis: &Arc<LambdaBasis>) -> Result<LambdaSqueezed> {
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("xi = {xi}")));
    }
    check_squeeze_domain(xi, basis)?;
    let (inv_sq, _) = squeezed_norm_series(xi, basis)?;
    let norm_constant = inv_sq.powf(-0.5);
    let terms = squeezed_support_terms(xi, basis, norm_constant)?;
    let coeffs = squeezed_raw_coeffs(xi, basis, terms).mapv(|c| c * norm_constant);
    Ok(LambdaSqueezed {
        xi,
        expansion: LambdaExpansion::new(basis.clone(), coeffs),
        norm_constant,
        terms,
    })
}

/// `C_0 e^{ξλ²/2} S(ξ) D(ξλ)|0⟩` through dense exponentials.
///
/// `D(β)|0⟩ = e^{−|β|²/2} e^{βa†}|0⟩`, so this vector has norm
/// `e^{−|ξλ|²/2}`; it is the λ-squeezed state up to that scalar.
pub fn squeezed_operator_form(xi: C64, basis: &LambdaBasis, dim: usize) -> Result<StateVector> {
    let c0 = squeezed_norm_constant(xi, basis)?;
    let lambda = basis.lambda();
    let v = stable_apply(dim, |d| {
        let displaced = expm_apply(
            &displacement_generator(xi * lambda, d)?,
            &StateVector::vacuum(d),
        )?;
        expm_apply(&squeeze_generator(xi, d)?, &displaced)
    })?;
    Ok(v.scaled(c0 * (xi * lambda * lambda * 0.5).exp()))
}

/// `C_0 exp(ξ(a†_λ)²/2)|0⟩` through the dense exponential.
pub fn squeezed_exponential_form(xi: C64, basis: &LambdaBasis, dim: usize) -> Result<StateVector> {
    let c0 = squeezed_norm_constant(xi, basis)?;
    let lambda = basis.lambda();
    let v = stable_apply(dim, |d| {
        expm_apply(
            &lambda_squeeze_generator(xi, lambda, d)?,
            &StateVector::vacuum(d),
        )
    })?;
    Ok(v.scaled(c64(c0)))
}
