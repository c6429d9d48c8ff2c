//! Scalar special functions in log space.
//!
//! Every factorial ratio and Laguerre value that shows up in the basis,
//! state and matrix-element formulas is evaluated here, as a natural log
//! plus a sign, so that `λ` up to ~5 with indices in the hundreds never
//! overflows.

use std::ops::{Div, Mul};
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest `n` whose factorial is summed exactly from integers.
pub const EXACT_FACTORIAL_MAX: u64 = 20;

const LOG_FACTORIAL_TABLE_LEN: usize = 8192;

/// A real number stored as `sign * exp(ln_mag)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_mag: f64,
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln_mag: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogValue = LogValue {
        ln_mag: 0.0,
        sign: 1,
    };

    pub fn new(ln_mag: f64, sign: i8) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue {
                ln_mag,
                sign: sign.signum(),
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                ln_mag: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// `x^k` for integer `k >= 0`, with `0^0 = 1`.
    pub fn powi_of(x: f64, k: u64) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if x == 0.0 {
            return Self::ZERO;
        }
        let sign = if x < 0.0 && k % 2 == 1 { -1 } else { 1 };
        LogValue {
            ln_mag: k as f64 * x.abs().ln(),
            sign,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_mag.exp()
        }
    }

    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "square root of a negative LogValue");
        if self.sign == 0 {
            Self::ZERO
        } else {
            LogValue {
                ln_mag: 0.5 * self.ln_mag,
                sign: 1,
            }
        }
    }

    /// Sum of arbitrary-sign terms, scaled by the largest magnitude.
    pub fn sum<I: IntoIterator<Item = LogValue>>(terms: I) -> LogValue {
        let terms: Vec<LogValue> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(max) = terms.iter().map(|t| t.ln_mag).reduce(f64::max) else {
            return Self::ZERO;
        };
        let scaled: f64 = terms
            .iter()
            .map(|t| f64::from(t.sign) * (t.ln_mag - max).exp())
            .sum();
        LogValue::from_f64(scaled).mul_exp(max)
    }

    fn mul_exp(self, ln: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogValue {
                ln_mag: self.ln_mag + ln,
                sign: self.sign,
            }
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            LogValue::ZERO
        } else {
            LogValue {
                ln_mag: self.ln_mag + rhs.ln_mag,
                sign: self.sign * rhs.sign,
            }
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(rhs.sign != 0, "division of LogValue by zero");
        if self.sign == 0 {
            LogValue::ZERO
        } else {
            LogValue {
                ln_mag: self.ln_mag - rhs.ln_mag,
                sign: self.sign * rhs.sign,
            }
        }
    }
}

/// Running `ln Σ exp(x_i)` over positive terms, tracking the maximum.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.max {
            self.scaled = self.scaled * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        } else {
            self.scaled += (ln_term - self.max).exp();
        }
    }

    pub fn ln(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// `n!` as an integer, for `n <= 20`.
pub fn factorial_exact(n: u64) -> Option<u64> {
    if n > EXACT_FACTORIAL_MAX {
        return None;
    }
    Some((1..=n).product())
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..LOG_FACTORIAL_TABLE_LEN as u64)
            .map(log_factorial_uncached)
            .collect()
    })
}

fn log_factorial_uncached(n: u64) -> f64 {
    match factorial_exact(n) {
        Some(f) => (f as f64).ln(),
        None => ln_gamma(n as f64 + 1.0),
    }
}

/// `ln(n!)`: exact integer product up to 20!, log-gamma beyond.
pub fn log_factorial(n: u64) -> f64 {
    log_factorial_table()
        .get(n as usize)
        .copied()
        .unwrap_or_else(|| log_factorial_uncached(n))
}

/// `ln(n!!)` with `(-1)!! = 0!! = 1`.
pub fn log_double_factorial(n: i64) -> Result<f64> {
    if n < -1 {
        return Err(Error::InvalidParameter(format!("double factorial of {n}")));
    }
    if n <= 0 {
        return Ok(0.0);
    }
    let n = n as u64;
    let half = n / 2;
    Ok(if n.is_multiple_of(2) {
        // (2k)!! = 2^k k!
        half as f64 * std::f64::consts::LN_2 + log_factorial(half)
    } else {
        // (2k+1)!! = (2k+1)! / (2^k k!)
        log_factorial(n) - half as f64 * std::f64::consts::LN_2 - log_factorial(half)
    })
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        log_factorial(n) - log_factorial(k) - log_factorial(n - k)
    }
}

/// `ln L_n^{(0)}(-λ²) = ln Σ_k C(n,k) λ^{2k} / k!`.
///
/// Every term is positive, so the sum is accumulated in log space with
/// max tracking. Exactly `0.0` at `λ = 0`.
pub fn laguerre0_log(n: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ln_l2 = 2.0 * lambda.abs().ln();
    (0..=n)
        .map(|k| log_binomial(n, k) + k as f64 * ln_l2 - log_factorial(k))
        .collect::<LogSumExp>()
        .ln()
}

/// `L_n^{(0)}(-λ²)` as a plain float.
pub fn laguerre0(n: u64, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
    }
    let v = laguerre0_log(n, lambda).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("L_n(-lambda^2)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Direct polynomial evaluation by the three-term recurrence, as an
    // independent route.
    fn laguerre_recurrence(n_max: usize, x: f64) -> Vec<f64> {
        let mut l = vec![1.0, 1.0 - x];
        for n in 1..n_max {
            let next = ((2 * n + 1) as f64 - x) * l[n] - n as f64 * l[n - 1];
            l.push(next / (n + 1) as f64);
        }
        l.truncate(n_max + 1);
        l
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert_relative_eq!(log_factorial(5), (1.0f64 * 2.0 * 3.0 * 4.0 * 5.0).ln());
        assert_relative_eq!(log_factorial(5), 4.787491742782046, epsilon = 1e-12);
    }

    #[test]
    fn log_factorial_matches_integers() {
        for n in 0..=18u64 {
            let exact = factorial_exact(n).unwrap() as f64;
            let rel = (log_factorial(n).exp() - exact).abs() / exact;
            assert!(rel <= 1e-14, "n = {n}: rel err {rel:e}");
        }
    }

    #[test]
    fn log_factorial_crossover_is_continuous() {
        for n in 15..40u64 {
            let step = log_factorial(n + 1) - log_factorial(n);
            assert_relative_eq!(step, ((n + 1) as f64).ln(), max_relative = 1e-12);
        }
        // beyond the cached table
        let n = LOG_FACTORIAL_TABLE_LEN as u64 + 3;
        assert_relative_eq!(
            log_factorial(n + 1) - log_factorial(n),
            ((n + 1) as f64).ln(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn double_factorial_conventions() {
        assert_eq!(log_double_factorial(-1).unwrap(), 0.0);
        assert_eq!(log_double_factorial(0).unwrap(), 0.0);
        assert_relative_eq!(
            log_double_factorial(6).unwrap(),
            48f64.ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_double_factorial(7).unwrap(),
            105f64.ln(),
            max_relative = 1e-14
        );
        assert!(log_double_factorial(-2).is_err());
        for n in 1..60i64 {
            let lhs = log_double_factorial(n).unwrap();
            let rhs = (n as f64).ln() + log_double_factorial(n - 2).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-13);
        }
    }

    #[test]
    fn laguerre_small_cases() {
        assert_eq!(laguerre0(0, 2.7).unwrap(), 1.0);
        for &lam in &[0.0, 0.3, 1.0, 2.5, -1.7] {
            assert_relative_eq!(
                laguerre0(1, lam).unwrap(),
                1.0 + lam * lam,
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(laguerre0(2, 1.0).unwrap(), 3.5, max_relative = 1e-14);
        assert_eq!(laguerre0(37, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn laguerre_matches_three_term_recurrence() {
        for &lam in &[0.05, 0.5, 1.0, 2.0, 3.3, 4.0] {
            let reference = laguerre_recurrence(60, -lam * lam);
            for (n, r) in reference.iter().enumerate() {
                let v = laguerre0(n as u64, lam).unwrap();
                assert!(
                    (v - r).abs() <= 1e-12 * r.abs(),
                    "n={n} λ={lam}: {v} vs {r}"
                );
            }
        }
    }

    #[test]
    fn laguerre_overflow_is_signalled() {
        assert!(matches!(laguerre0(5000, 50.0), Err(Error::Overflow(_))));
        assert!(laguerre0_log(5000, 50.0).is_finite());
    }

    #[test]
    fn log_value_arithmetic() {
        let a = LogValue::from_f64(-3.0);
        let b = LogValue::from_f64(2.5);
        assert_relative_eq!((a * b).value(), -7.5, max_relative = 1e-15);
        assert_relative_eq!((a / b).value(), -1.2, max_relative = 1e-15);
        assert!((a * LogValue::ZERO).is_zero());
        assert_relative_eq!(
            LogValue::powi_of(-2.0, 3).value(),
            -8.0,
            max_relative = 1e-15
        );
        assert_eq!(LogValue::powi_of(0.0, 0).value(), 1.0);
        let s = LogValue::sum([a, b, LogValue::from_f64(0.25)]);
        assert_relative_eq!(s.value(), -0.25, max_relative = 1e-14);
        assert!(LogValue::sum([]).is_zero());
    }

    proptest! {
        #[test]
        fn laguerre_even_in_lambda(n in 0u64..120, lam in -5.0f64..5.0) {
            prop_assert_eq!(laguerre0_log(n, lam), laguerre0_log(n, -lam));
        }

        #[test]
        fn laguerre_ratio_at_least_one(n in 0u64..150, lam in -5.0f64..5.0) {
            let d = laguerre0_log(n + 1, lam) - laguerre0_log(n, lam);
            prop_assert!(d >= -1e-12);
            prop_assert!(laguerre0_log(n, lam) >= 0.0);
        }

        #[test]
        fn log_factorial_monotone(n in 0u64..10_000) {
            prop_assert!(log_factorial(n + 1) >= log_factorial(n));
        }
    }
}
