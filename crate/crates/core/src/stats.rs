//! Photon statistics over the standard and λ bases, and quadrature variances.
//!
//! `P_λ(m) = |_λ⟨m|ψ⟩|²` is a projection magnitude onto a non-orthogonal
//! family; it is never renormalized, and `prob_sum` is reported alongside.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{matel_annihilation_power, matel_normal_ordered, LambdaBasis, LambdaExpansion};
use crate::oracle::{build_ladders, StateVector};
use crate::specfun::log_factorial;

/// Mean below which the Mandel parameter is reported as undefined.
pub const MEAN_FLOOR: f64 = 1e-12;
/// Tail level for `m² P(m)` at which the moment sums stop.
pub const MOMENT_TAIL: f64 = 1e-12;
/// Consecutive sub-tail terms required before stopping.
pub const MOMENT_RUN: usize = 20;
/// Norm tolerance for states handed to [`quadrature_variances`].
pub const NORMALIZATION_TOL: f64 = 1e-8;

const MOMENT_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatBasis {
    Standard,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatisticsReport {
    pub mean: f64,
    pub second_moment: f64,
    /// `None` when the mean vanishes.
    pub mandel_q: Option<f64>,
    pub prob_sum: f64,
    pub basis: StatBasis,
}

impl StatisticsReport {
    fn from_sums(mean: f64, second_moment: f64, prob_sum: f64, basis: StatBasis) -> Self {
        let mandel_q = (mean > MEAN_FLOOR).then(|| (second_moment - mean * mean) / mean - 1.0);
        StatisticsReport {
            mean,
            second_moment,
            mandel_q,
            prob_sum,
            basis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureReport {
    pub var_x: f64,
    pub var_p: f64,
    pub product: f64,
}

/// `P_λ(m)` for the λ-coherent state `|α,λ⟩`.
///
/// The double sum over `n, p ≤ m` factorizes as `|S|²` with
/// `S = Σ_n λ^{m−n} αⁿ / [(m−n)! n!]`, times `m! e^{−|α|²} / L_m`.
pub fn p_lambda(m: usize, alpha: C64, basis: &LambdaBasis) -> f64 {
    let lambda = basis.lambda();
    let mut s = C64::new(0.0, 0.0);
    for n in 0..=m {
        let lam = if m == n {
            1.0
        } else {
            lambda.powi((m - n) as i32)
        };
        let a = if n == 0 {
            C64::new(1.0, 0.0)
        } else {
            alpha.powu(n as u32)
        };
        let inv = (-log_factorial((m - n) as u64) - log_factorial(n as u64)).exp();
        s += a * (lam * inv);
    }
    let ln_pre = log_factorial(m as u64) - alpha.norm_sqr() - basis.log_laguerre(m);
    s.norm_sqr() * ln_pre.exp()
}

/// Running moment sums with the `m² P(m)` tail stop.
#[derive(Default)]
struct MomentAccumulator {
    p: f64,
    m1: f64,
    m2: f64,
    quiet: usize,
    peak: f64,
}

impl MomentAccumulator {
    /// Returns `true` once the tail has been quiet for `MOMENT_RUN` terms.
    fn push(&mut self, m: usize, p: f64) -> bool {
        let mf = m as f64;
        self.p += p;
        self.m1 += mf * p;
        self.m2 += mf * mf * p;
        let w = mf * mf * p;
        self.peak = self.peak.max(p);
        if w < MOMENT_TAIL && p <= self.peak {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= MOMENT_RUN
    }

    fn report(&self, basis: StatBasis) -> StatisticsReport {
        StatisticsReport::from_sums(self.m1, self.m2, self.p, basis)
    }
}

/// Moments of `|α,λ⟩` from [`p_lambda`].
pub fn lambda_coherent_moments(alpha: C64, basis: &LambdaBasis) -> Result<StatisticsReport> {
    let mut acc = MomentAccumulator::default();
    // the distribution peaks near |λ+α|², keep summing until past it
    let floor = ((basis.lambda() + alpha).norm_sqr() * 2.0) as usize + MOMENT_RUN;
    for m in 0..MOMENT_CAP {
        if acc.push(m, p_lambda(m, alpha, basis)) && m >= floor {
            return Ok(acc.report(StatBasis::Lambda));
        }
    }
    Err(Error::TruncationCap {
        cap: MOMENT_CAP,
        what: "photon-number moments",
    })
}

/// `_λ⟨m|ψ⟩` for a standard-basis vector.
pub fn lambda_projection(m: usize, state: &StateVector, basis: &LambdaBasis) -> C64 {
    let v = state.to_standard();
    let top = m.min(v.dim().saturating_sub(1));
    if v.dim() == 0 {
        return C64::new(0.0, 0.0);
    }
    (0..=top)
        .map(|j| v.coeffs[j] * basis.ket_coeff(m, j).value())
        .sum()
}

/// All nonzero `_λ⟨m|ψ⟩` at once, from `⟨m|e^{λa†}|ψ⟩ / √L_m`.
///
/// The Taylor action of `e^{λa†}` is summed until a term falls below
/// `1e-17` of the running maximum.
pub fn lambda_projections(state: &StateVector, basis: &LambdaBasis) -> Vec<C64> {
    let v = state.to_standard();
    let lambda = basis.lambda();
    let mut phi: Vec<C64> = v.coeffs.to_vec();
    if lambda != 0.0 {
        let mut term = phi.clone();
        for k in 1..MOMENT_CAP {
            let mut next = vec![C64::new(0.0, 0.0); term.len() + 1];
            let s = lambda / k as f64;
            for (j, t) in term.iter().enumerate() {
                next[j + 1] = t * (s * ((j + 1) as f64).sqrt());
            }
            phi.resize(next.len(), C64::new(0.0, 0.0));
            let mut term_max = 0.0f64;
            for (p, t) in phi.iter_mut().zip(&next) {
                *p += t;
                term_max = term_max.max(t.norm());
            }
            term = next;
            let phi_max = phi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if term_max <= 1e-17 * phi_max && k as f64 > lambda.abs() {
                break;
            }
        }
    }
    for (m, p) in phi.iter_mut().enumerate() {
        *p *= (-0.5 * basis.log_laguerre(m)).exp();
    }
    phi
}

/// Which projections define `P(m)` in [`number_moments`].
#[derive(Debug, Clone, Copy)]
pub enum MomentBasis<'a> {
    Standard,
    Lambda(&'a LambdaBasis),
}

/// `⟨m̂⟩`, `⟨m̂²⟩`, Mandel `Q` with `P(m) = |⟨m|ψ⟩|²` or `|_λ⟨m|ψ⟩|²`.
pub fn number_moments(state: &StateVector, basis: MomentBasis<'_>) -> Result<StatisticsReport> {
    let v = state.to_standard();
    let mut acc = MomentAccumulator::default();
    match basis {
        MomentBasis::Standard => {
            for (m, c) in v.coeffs.iter().enumerate() {
                acc.push(m, c.norm_sqr());
            }
            Ok(acc.report(StatBasis::Standard))
        }
        MomentBasis::Lambda(b) => {
            let proj = lambda_projections(&v, b);
            let mut quiet = false;
            for (m, z) in proj.iter().enumerate() {
                quiet = acc.push(m, z.norm_sqr());
            }
            if !quiet {
                return Err(Error::TruncationCap {
                    cap: proj.len(),
                    what: "photon-number moments",
                });
            }
            Ok(acc.report(StatBasis::Lambda))
        }
    }
}

fn check_normalized(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(norm));
    }
    Ok(())
}

fn report_from_expectations(a: C64, a2: C64, n: f64) -> QuadratureReport {
    let var_x = a2.re + n + 0.5 - 2.0 * a.re * a.re;
    let var_p = -a2.re + n + 0.5 - 2.0 * a.im * a.im;
    QuadratureReport {
        var_x,
        var_p,
        product: var_x * var_p,
    }
}

/// `(Δx)²`, `(Δp)²` with `x = (a+a†)/√2`, `p = (a−a†)/(i√2)` from dense
/// ladder matrices.
pub fn quadrature_variances(state: &StateVector) -> Result<QuadratureReport> {
    let v = state.to_standard();
    check_normalized(v.norm())?;
    let dim = v.dim().max(2);
    let v = v.resized(dim);
    let ladders = build_ladders(dim, 0.0)?;
    let av = ladders.a.apply(&v)?;
    let a = v.inner(&av);
    let a2 = v.inner(&ladders.a.apply(&av)?);
    let n = av.inner(&av).re;
    Ok(report_from_expectations(a, a2, n))
}

/// Same variances from the λ-basis matrix elements, with `a† = a†_λ − λ`.
pub fn quadrature_variances_matel(state: &LambdaExpansion) -> Result<QuadratureReport> {
    check_normalized(state.norm_sqr().sqrt())?;
    let basis = &state.basis;
    let c = &state.coeffs;
    let expect = |f: &dyn Fn(usize, usize) -> f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (m, cm) in c.iter().enumerate() {
            if *cm == C64::new(0.0, 0.0) {
                continue;
            }
            for (n, cn) in c.iter().enumerate() {
                if *cn == C64::new(0.0, 0.0) {
                    continue;
                }
                acc += cm.conj() * cn * f(m, n);
            }
        }
        acc
    };
    let a = expect(&|m, n| matel_annihilation_power(m, n, 1, basis));
    let a2 = expect(&|m, n| matel_annihilation_power(m, n, 2, basis));
    let lam_dag_a = expect(&|m, n| matel_normal_ordered(m, n, 1, 1, basis));
    let n = (lam_dag_a - a * basis.lambda()).re;
    Ok(report_from_expectations(a, a2, n))
}

/// `P(m)` values `m < len` in the requested basis, for dumps and tests.
pub fn distribution(state: &StateVector, basis: MomentBasis<'_>, len: usize) -> Array1<f64> {
    let v = state.to_standard();
    Array1::from_iter((0..len).map(|m| match basis {
        MomentBasis::Standard => v.coeffs.get(m).map_or(0.0, |c| c.norm_sqr()),
        MomentBasis::Lambda(b) => lambda_projection(m, &v, b).norm_sqr(),
    }))
}

/// `ln` of the Poisson weight `e^{−μ} μ^m / m!`.
pub fn poisson_ln(m: usize, mu: f64) -> f64 {
    if mu == 0.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mu + m as f64 * mu.ln() - log_factorial(m as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::lambda_ket;
    use crate::states::{
        canonical_coherent, lambda_coherent, lambda_squeezed, squeezed_vacuum, Truncation,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn basis(lambda: f64) -> Arc<LambdaBasis> {
        LambdaBasis::shared(lambda, 64).unwrap()
    }

    #[test]
    fn p_lambda_examples() {
        let b0 = basis(0.0);
        for m in 0..10 {
            let p = p_lambda(m, C64::new(1.3, 0.0), &b0);
            assert!((p - poisson_ln(m, 1.69).exp()).abs() <= 1e-14);
        }
        assert_eq!(p_lambda(0, C64::new(0.0, 0.0), &basis(1.0)), 1.0);
    }

    #[test]
    fn p_lambda_matches_vector_projection() {
        for &(alpha, lam) in &[
            (C64::new(1.0, 0.0), 1.0),
            (C64::new(-0.5, 1.2), 2.0),
            (C64::new(2.0, -1.0), 0.3),
        ] {
            let b = basis(lam);
            let v = canonical_coherent(alpha, 80);
            for m in 0..25 {
                let k = lambda_ket(m, &b, 80).unwrap();
                let direct = k.inner(&v).norm_sqr();
                let p = p_lambda(m, alpha, &b);
                assert!(
                    (p - direct).abs() <= 1e-9 * direct.max(1e-300),
                    "m={m}: {p} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn poisson_limit() {
        for &alpha in &[C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.7, 1.1)] {
            let b = basis(1e-8);
            for m in 0..=20 {
                let p = p_lambda(m, alpha, &b);
                assert!((p - poisson_ln(m, alpha.norm_sqr()).exp()).abs() <= 1e-6);
            }
        }
        let r = lambda_coherent_moments(C64::new(1.5, 0.0), &basis(0.0)).unwrap();
        assert!(r.mandel_q.unwrap().abs() <= 1e-8);
    }

    #[test]
    fn canonical_coherent_is_poissonian() {
        let v = canonical_coherent(C64::new(1.2, -0.5), 80);
        let r = number_moments(&v, MomentBasis::Standard).unwrap();
        assert_abs_diff_eq!(r.mean, 1.69, epsilon = 1e-10);
        assert!(r.mandel_q.unwrap().abs() <= 1e-9);
    }

    #[test]
    fn vacuum_has_undefined_q() {
        let r = number_moments(&StateVector::vacuum(4), MomentBasis::Standard).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!(r.mandel_q.is_none());
        let r = number_moments(&StateVector::vacuum(4), MomentBasis::Lambda(&basis(1.0))).unwrap();
        assert!(
            r.mandel_q.is_some(),
            "λ-basis vacuum has a nonzero mean for λ ≠ 0"
        );
    }

    #[test]
    fn lambda_coherent_moment_routes_agree() {
        let b = basis(1.0);
        let alpha = C64::new(1.0, 0.0);
        let direct = lambda_coherent_moments(alpha, &b).unwrap();
        let cs = lambda_coherent(alpha, &b, Truncation::Auto).unwrap();
        let projected = number_moments(&cs.to_standard(), MomentBasis::Lambda(&b)).unwrap();
        assert!((direct.mean - projected.mean).abs() <= 1e-10);
        assert!((direct.second_moment - projected.second_moment).abs() <= 1e-9);
        assert!(direct.mandel_q.unwrap() < 0.0);
        assert!(direct.second_moment * direct.prob_sum >= direct.mean * direct.mean - 1e-12);
    }

    #[test]
    fn projection_routes_agree() {
        let b = basis(1.5);
        let s = lambda_squeezed(C64::from_polar(0.4, 0.3), &b).unwrap();
        let v = s.to_standard(0);
        let all = lambda_projections(&v, &b);
        for m in 0..v.dim() + 40 {
            let one = lambda_projection(m, &v, &b);
            let got = all.get(m).copied().unwrap_or_default();
            assert!((got - one).norm() <= 1e-12 * one.norm().max(1e-3), "m={m}");
        }
    }

    #[test]
    fn quadrature_examples() {
        let r = quadrature_variances(&StateVector::vacuum(3)).unwrap();
        assert_abs_diff_eq!(r.var_x, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.var_p, 0.5, epsilon = 1e-15);
        let r = quadrature_variances(&canonical_coherent(C64::new(1.0, -2.0), 120)).unwrap();
        assert_abs_diff_eq!(r.var_x, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(r.var_p, 0.5, epsilon = 1e-10);
        for &xi in &[0.1, 0.5, 0.8] {
            let r =
                quadrature_variances(&squeezed_vacuum(C64::new(xi, 0.0), 400).unwrap()).unwrap();
            assert_abs_diff_eq!(r.product, 0.25, epsilon = 1e-8);
            assert!(r.var_p < 0.5);
        }
        let bad = StateVector::vacuum(3).scaled(C64::new(2.0, 0.0));
        assert!(matches!(
            quadrature_variances(&bad),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn quadrature_routes_agree() {
        for &(xi, lam) in &[
            (C64::new(0.2, 0.0), 0.5),
            (C64::from_polar(0.3, PI / 4.0), 1.0),
        ] {
            let b = LambdaBasis::shared(lam, 64).unwrap();
            let s = lambda_squeezed(xi, &b).unwrap();
            let dense = quadrature_variances(&s.to_standard(0)).unwrap();
            let matel = quadrature_variances_matel(&s.expansion).unwrap();
            assert!((dense.var_x - matel.var_x).abs() <= 1e-8 * dense.var_x);
            assert!((dense.var_p - matel.var_p).abs() <= 1e-8 * dense.var_p);
        }
        let b = basis(2.0);
        let cs = lambda_coherent(C64::new(0.5, 0.5), &b, Truncation::Fixed(30)).unwrap();
        let dense = quadrature_variances(&cs.to_standard()).unwrap();
        let matel = quadrature_variances_matel(&cs.expansion).unwrap();
        assert!((dense.var_x - matel.var_x).abs() <= 1e-8);
    }

    #[test]
    fn squeezed_statistics_signs() {
        let b = basis(1.0);
        let s = lambda_squeezed(C64::new(0.3, 0.0), &b).unwrap();
        let v = s.to_standard(0);
        let lam = number_moments(&v, MomentBasis::Lambda(&b)).unwrap();
        let std = number_moments(&v, MomentBasis::Standard).unwrap();
        assert!(lam.mandel_q.unwrap() < 0.0);
        assert!(std.mandel_q.unwrap() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn moments_satisfy_cauchy_schwarz(re in -2.0f64..2.0, im in -2.0f64..2.0, lam in -3.0f64..3.0) {
            let b = LambdaBasis::new(lam, 16).unwrap();
            let r = lambda_coherent_moments(C64::new(re, im), &b).unwrap();
            // Cauchy–Schwarz for the unnormalized weights
            prop_assert!(r.second_moment * r.prob_sum >= r.mean * r.mean * (1.0 - 1e-12) - 1e-12);
        }

        #[test]
        fn p_lambda_is_nonnegative(m in 0usize..40, re in -3.0f64..3.0, lam in -3.0f64..3.0) {
            let b = LambdaBasis::new(lam, 40).unwrap();
            prop_assert!(p_lambda(m, C64::new(re, 0.0), &b) >= 0.0);
        }
    }
}
