//! The quadratic-spectrum Hamiltonian `H' = H²`, its nonlinear coherent
//! states, and the generalized `Zⁿ/√C(n)` family.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{lambda_ket, LambdaBasis};
use crate::oracle::{OperatorMatrix, StateVector};
use crate::specfun::{log_factorial, LogSumExp};
use crate::states::{Truncation, AUTO_TRUNCATION_START, TAIL_TOL, TRUNCATION_CAP};

/// `(n + ½)²`.
pub fn nonlinear_spectrum(n: usize) -> f64 {
    let e = n as f64 + 0.5;
    e * e
}

/// `ω = 2(1 + 2|α|²)`.
pub fn classical_frequency(alpha: C64) -> f64 {
    2.0 * (1.0 + 2.0 * alpha.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Coefficients `αⁿ/(n!)^{3/2}`.
    F1,
    /// Coefficients `αⁿ/n!`.
    F2,
    Canonical,
    PensonSolomon,
}

impl Family {
    pub fn parse(name: &str) -> Result<Family> {
        match name {
            "f1" => Ok(Family::F1),
            "f2" => Ok(Family::F2),
            "canonical" => Ok(Family::Canonical),
            _ => Err(Error::InvalidParameter(format!("unknown family `{name}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::F1 => "f1",
            Family::F2 => "f2",
            Family::Canonical => "canonical",
            Family::PensonSolomon => "penson_solomon",
        }
    }

    /// `ln C(n)` for the named families: `(n!)³`, `(n!)²`, `n!`.
    pub fn log_c(self, n: usize) -> Result<f64> {
        let lf = log_factorial(n as u64);
        match self {
            Family::F1 => Ok(3.0 * lf),
            Family::F2 => Ok(2.0 * lf),
            Family::Canonical => Ok(lf),
            Family::PensonSolomon => Err(Error::InvalidParameter(
                "penson_solomon needs an explicit C(n)".into(),
            )),
        }
    }

    /// `f(n)` in the annihilator `a·f(n̂)` whose eigenvectors the series are.
    pub fn encoded_nonlinearity(self, n: usize) -> Result<f64> {
        match self {
            Family::F1 => Ok(n as f64),
            Family::F2 => Ok((n as f64).sqrt()),
            Family::Canonical => Ok(1.0),
            Family::PensonSolomon => Err(Error::InvalidParameter(
                "no fixed nonlinearity for penson_solomon".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearCS {
    pub alpha: C64,
    pub family: Family,
    pub coeffs: Vec<C64>,
    pub norm_constant: f64,
}

impl NonlinearCS {
    pub fn state(&self) -> StateVector {
        StateVector::standard(Array1::from(self.coeffs.clone()))
    }
}

/// `N_C^{−1/2} Σ Zⁿ/√C(n) |n⟩` with `ln C(n)` supplied by `log_c`.
///
/// The truncation must leave a tail `Σ_{n≥N} |Z|^{2n}/C(n)` below
/// `TAIL_TOL²` relative to the kept sum; growing term ratios over the window
/// mark a divergent sequence.
pub fn penson_solomon_cs<F>(z: C64, log_c: F, truncation: Truncation) -> Result<NonlinearCS>
where
    F: Fn(usize) -> f64,
{
    generalized_cs(z, &log_c, truncation, Family::PensonSolomon)
}

pub fn nonlinear_cs(family: Family, alpha: C64, truncation: Truncation) -> Result<NonlinearCS> {
    if family == Family::PensonSolomon {
        return Err(Error::InvalidParameter(
            "use penson_solomon_cs for an explicit C(n)".into(),
        ));
    }
    let log_c = |n: usize| family.log_c(n).expect("named family");
    generalized_cs(alpha, &log_c, truncation, family)
}

fn generalized_cs(
    z: C64,
    log_c: &dyn Fn(usize) -> f64,
    truncation: Truncation,
    family: Family,
) -> Result<NonlinearCS> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("Z = {z}")));
    }
    let (r, theta) = z.to_polar();
    let ln_term = |n: usize| {
        let c = log_c(n);
        if !c.is_finite() {
            return f64::NAN;
        }
        if n == 0 {
            -c
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            2.0 * n as f64 * r.ln() - c
        }
    };
    let tail_ok = |n: usize| -> Result<bool> {
        // Window past n: decreasing ratios bound the tail geometrically.
        let (a, b) = (ln_term(n), ln_term(n + 1));
        if a.is_nan() || b.is_nan() {
            return Err(Error::InvalidParameter(
                "C(n) must be positive and finite".into(),
            ));
        }
        if a == f64::NEG_INFINITY {
            return Ok(true);
        }
        let ratio = (b - a).exp();
        if ratio >= 1.0 {
            return Ok(false);
        }
        let head: LogSumExp = (0..n).map(ln_term).collect();
        Ok(a - (1.0 - ratio).ln() - head.ln() < 2.0 * TAIL_TOL.ln())
    };
    let n = match truncation {
        Truncation::Fixed(0) => {
            return Err(Error::InvalidParameter(
                "truncation must be positive".into(),
            ))
        }
        Truncation::Fixed(n) => {
            if !tail_ok(n)? {
                return Err(Error::Divergent("generalized coherent state tail"));
            }
            n
        }
        Truncation::Auto => {
            let mut n = AUTO_TRUNCATION_START;
            loop {
                if tail_ok(n)? {
                    break n;
                }
                n *= 2;
                if n > TRUNCATION_CAP {
                    return Err(Error::Divergent("generalized coherent state tail"));
                }
            }
        }
    };
    let ln_norm: LogSumExp = (0..n).map(ln_term).collect();
    let ln_c0 = -0.5 * ln_norm.ln();
    let coeffs = (0..n)
        .map(|k| C64::from_polar((ln_c0 + 0.5 * ln_term(k)).exp(), k as f64 * theta))
        .collect();
    Ok(NonlinearCS {
        alpha: z,
        family,
        coeffs,
        norm_constant: ln_c0.exp(),
    })
}

/// `a·f(n̂)` on `dim` levels for the family's encoded nonlinearity.
pub fn encoded_annihilator(family: Family, dim: usize) -> Result<OperatorMatrix> {
    let mut m = OperatorMatrix::zeros(dim);
    for n in 1..dim {
        m.entries[[n - 1, n]] = C64::new((n as f64).sqrt() * family.encoded_nonlinearity(n)?, 0.0);
    }
    Ok(m)
}

/// The operators as printed: `(n̂+2)a` for f1, `a√(n̂+2)` for f2, `a` otherwise.
pub fn printed_annihilator(family: Family, dim: usize) -> Result<OperatorMatrix> {
    let mut m = OperatorMatrix::zeros(dim);
    for n in 1..dim {
        let s = (n as f64).sqrt();
        let v = match family {
            // (n̂+2) acts after a, on |n−1⟩
            Family::F1 => (n as f64 + 1.0) * s,
            Family::F2 => s * (n as f64 + 2.0).sqrt(),
            Family::Canonical => s,
            Family::PensonSolomon => {
                return Err(Error::InvalidParameter(
                    "no printed operator for penson_solomon".into(),
                ))
            }
        };
        m.entries[[n - 1, n]] = C64::new(v, 0.0);
    }
    Ok(m)
}

/// `r_n = coeff_n · λ · √n / coeff_{n−1}` over the `|m⟩_λ` expansion, `n = 1..=m`.
pub fn identify_bound_state_nonlinearity(m: usize, basis: &LambdaBasis) -> Result<Vec<f64>> {
    if m > 0 && basis.lambda() == 0.0 {
        return Err(Error::InvalidParameter(
            "ratios undefined at lambda = 0".into(),
        ));
    }
    let ket = lambda_ket(m, basis, m + 1)?;
    Ok((1..=m)
        .map(|n| ket.coeffs[n].re * basis.lambda() * (n as f64).sqrt() / ket.coeffs[n - 1].re)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{eigen_residual, number_operator};
    use crate::states::canonical_coherent;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectrum_and_frequency_examples() {
        assert_eq!(nonlinear_spectrum(0), 0.25);
        assert_eq!(nonlinear_spectrum(1), 2.25);
        let h = number_operator(8).add(&OperatorMatrix::identity(8).scale(C64::new(0.5, 0.0)));
        let h2 = h.dot(&h);
        for n in 0..7 {
            assert_abs_diff_eq!(
                h2.entries[[n, n]].re,
                nonlinear_spectrum(n),
                epsilon = 1e-14
            );
        }
        assert_eq!(classical_frequency(C64::new(0.0, 0.0)), 2.0);
        assert_eq!(classical_frequency(C64::new(0.6, 0.8)), 6.0);
        assert_abs_diff_eq!(
            classical_frequency(C64::new(0.5f64.sqrt(), 0.0)),
            4.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn family_examples() {
        let f1 = nonlinear_cs(Family::F1, C64::new(0.0, 0.0), Truncation::Auto).unwrap();
        assert_eq!(f1.coeffs[0], C64::new(1.0, 0.0));
        assert!(f1.coeffs[1..].iter().all(|c| c.norm() == 0.0));

        let f2 = nonlinear_cs(Family::F2, C64::new(1.0, 0.0), Truncation::Auto).unwrap();
        let sum: f64 = (0..40).map(|n| (-2.0 * log_factorial(n)).exp()).sum();
        assert_abs_diff_eq!(f2.norm_constant, sum.powf(-0.5), epsilon = 1e-15);
        for n in 0..20 {
            let expect = f2.norm_constant * (-log_factorial(n as u64)).exp();
            assert_abs_diff_eq!(f2.coeffs[n].re, expect, epsilon = 1e-15);
        }

        let f1 = nonlinear_cs(Family::F1, C64::new(1.0, 0.0), Truncation::Fixed(30)).unwrap();
        for n in 1..30 {
            let ratio = f1.coeffs[n].re / f1.coeffs[n - 1].re;
            assert!((ratio - (n as f64).powf(-1.5)).abs() <= 1e-12 * ratio);
        }
    }

    #[test]
    fn families_are_normalized_eigenvectors() {
        for family in [Family::F1, Family::F2, Family::Canonical] {
            for alpha in [C64::new(1.0, 0.0), C64::new(-0.6, 1.4), C64::new(2.5, 0.5)] {
                let cs = nonlinear_cs(family, alpha, Truncation::Auto).unwrap();
                let v = cs.state();
                assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-10);
                let op = encoded_annihilator(family, v.dim()).unwrap();
                assert!(eigen_residual(&op, &v, alpha).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn printed_operators_miss_the_series() {
        let alpha = C64::new(1.0, 0.0);
        for family in [Family::F1, Family::F2] {
            let v = nonlinear_cs(family, alpha, Truncation::Auto)
                .unwrap()
                .state();
            let op = printed_annihilator(family, v.dim()).unwrap();
            assert!(eigen_residual(&op, &v, alpha).unwrap() > 1e-2);
        }
    }

    #[test]
    fn penson_solomon_reductions() {
        let z = C64::new(0.9, -0.4);
        let canon =
            penson_solomon_cs(z, |n| log_factorial(n as u64), Truncation::Fixed(64)).unwrap();
        assert!(canon.state().max_abs_diff(&canonical_coherent(z, 64)) <= 1e-12);
        for family in [Family::F1, Family::F2] {
            let ps = penson_solomon_cs(z, |n| family.log_c(n).unwrap(), Truncation::Auto).unwrap();
            let named = nonlinear_cs(family, z, Truncation::Auto).unwrap();
            assert!(ps.state().max_abs_diff(&named.state()) <= 1e-12);
        }
        let vac = penson_solomon_cs(C64::new(0.0, 0.0), |n| n as f64, Truncation::Auto).unwrap();
        assert_eq!(vac.coeffs[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn divergent_sequence_is_rejected() {
        // C(n) = 1: geometric series with ratio |Z|² = 4
        let err = penson_solomon_cs(C64::new(2.0, 0.0), |_| 0.0, Truncation::Auto).unwrap_err();
        assert!(matches!(err, Error::Divergent(_)));
        let err =
            penson_solomon_cs(C64::new(0.5, 0.0), |_| f64::NAN, Truncation::Auto).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn bound_state_ratios() {
        let b = LambdaBasis::new(0.7, 4).unwrap();
        assert!(identify_bound_state_nonlinearity(0, &b).unwrap().is_empty());
        let r = identify_bound_state_nonlinearity(1, &b).unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-15);
        let b1 = LambdaBasis::new(1.0, 4).unwrap();
        let r = identify_bound_state_nonlinearity(2, &b1).unwrap();
        assert_abs_diff_eq!(r[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 1.0, epsilon = 1e-14);
        for &lam in &[0.5, 1.0, 2.0] {
            let b = LambdaBasis::new(lam, 24).unwrap();
            for m in 0..=20 {
                let r = identify_bound_state_nonlinearity(m, &b).unwrap();
                for (i, v) in r.iter().enumerate() {
                    let expect = (m - i) as f64;
                    assert!((v - expect).abs() <= 1e-10 * expect);
                }
            }
        }
        assert!(identify_bound_state_nonlinearity(2, &LambdaBasis::new(0.0, 4).unwrap()).is_err());
    }
}
