//! Oracle-equivalence and invariant suites behind `lfock verify`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::appendix::{
    encoded_annihilator, identify_bound_state_nonlinearity, nonlinear_cs, nonlinear_spectrum,
    penson_solomon_cs, Family,
};
use crate::error::{Error, Result};
use crate::fock::{
    apply_t_operator, gram_certificate, iterated_lowering_norm, ladder_down, ladder_up, lambda_ket,
    matel_annihilation_power, matel_creation_power, matel_normal_ordered, overlap_analytic,
    LambdaBasis,
};
use crate::oracle::{build_ladders, eigen_residual, number_operator, OperatorMatrix, StateVector};
use crate::specfun::log_factorial;
use crate::states::{
    canonical_coherent, coherent_overlap, coherent_overlap_closed_form, displaced_form, evolve,
    lambda_coherent, lambda_squeezed, radius_estimate, squeezed_exponential_form,
    squeezed_norm_constant_gram, squeezed_norm_series, squeezed_operator_form, squeezed_vacuum,
    Truncation,
};
use crate::stats::{
    lambda_coherent_moments, p_lambda, poisson_ln, quadrature_variances, quadrature_variances_matel,
};

pub const SUITES: [&str; 10] = [
    "overlaps",
    "ladders",
    "matel",
    "coherent",
    "evolution",
    "poisson",
    "squeezed",
    "quadratures",
    "radius",
    "appendix",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    /// Largest error among the tolerance checks.
    pub max_err: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_owned(),
            checks: 0,
            max_err: 0.0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, what: impl FnOnce() -> String, err: f64, tol: f64) {
        self.checks += 1;
        if err.is_nan() || err > self.max_err {
            self.max_err = if err.is_nan() { f64::NAN } else { err };
        }
        if !(err <= tol) {
            self.failures
                .push(format!("{}: error {err:e} > {tol:e}", what()));
        }
    }

    fn require(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    let scale = got.abs().max(want.abs());
    if scale == 0.0 {
        0.0
    } else {
        (got - want).abs() / scale
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Run one suite by name, or every suite for `all`.
pub fn run(name: &str) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_suite(s)).collect();
    }
    run_suite(name).map(|r| vec![r])
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "overlaps" => overlaps(),
        "ladders" => ladders(),
        "matel" => matel(),
        "coherent" => coherent(),
        "evolution" => evolution(),
        "poisson" => poisson(),
        "squeezed" => squeezed(),
        "quadratures" => quadratures(),
        "radius" => radius(),
        "appendix" => appendix(),
        _ => Err(Error::InvalidParameter(format!(
            "unknown suite `{name}` (expected all, {})",
            SUITES.join(", ")
        ))),
    }
}

const BASIS_LAMBDAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 3.0];

fn overlaps() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("overlaps");
    for lam in BASIS_LAMBDAS {
        let b = LambdaBasis::new(lam, 40)?;
        let kets: Vec<StateVector> = (0..=40)
            .map(|n| lambda_ket(n, &b, 41))
            .collect::<Result<_>>()?;
        for (n, k) in kets.iter().enumerate() {
            r.check(
                || format!("λ={lam} n={n} ket norm"),
                (k.norm() - 1.0).abs(),
                1e-12,
            );
            let t = apply_t_operator(n, &b, 41)?;
            r.check(
                || format!("λ={lam} n={n} T-operator route"),
                t.max_abs_diff(k),
                1e-12,
            );
        }
        for m in 0..=40 {
            for n in 0..=40 {
                let d = kets[m].inner(&kets[n]).re;
                r.check(
                    || format!("λ={lam} ⟨{m}|{n}⟩"),
                    (overlap_analytic(m, n, &b) - d).abs(),
                    1e-10,
                );
            }
        }
        let cert = gram_certificate(&b, 41);
        r.require(
            || format!("λ={lam}: Gram not certified SPD ({cert:?})"),
            cert.is_positive_definite(1e-10),
        );
    }
    Ok(r)
}

fn ladders() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("ladders");
    for lam in [0.3, 1.0, 2.0] {
        let b = LambdaBasis::new(lam, 40)?;
        let dim = 33;
        let l = build_ladders(dim, lam)?;
        let number = l.a_dag_lambda.dot(&l.a);
        for n in 0..=30 {
            let ket = lambda_ket(n, &b, dim)?;
            let up = ladder_up(n, &b)?;
            let want = lambda_ket(up.index, &b, dim)?.scaled(c(up.coef));
            let got = l.a_dag_lambda.apply(&ket)?;
            r.check(
                || format!("λ={lam} a†_λ|{n}⟩"),
                got.max_abs_diff(&want) / up.coef.max(1.0),
                1e-10,
            );
            let got = l.a.apply(&ket)?;
            let err = match ladder_down(n, &b)? {
                None => got.norm(),
                Some(d) => got.max_abs_diff(&lambda_ket(d.index, &b, dim)?.scaled(c(d.coef))),
            };
            r.check(|| format!("λ={lam} a|{n}⟩"), err, 1e-10);
            let err = number.apply(&ket)?.max_abs_diff(&ket.scaled(c(n as f64)));
            r.check(
                || format!("λ={lam} a†_λa|{n}⟩ = {n}|{n}⟩"),
                err / (n.max(1) as f64),
                1e-10,
            );
            let product: f64 = (1..=n)
                .map(|k| ladder_down(k, &b).map(|s| s.map_or(0.0, |s| s.coef)))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .product();
            r.check(
                || format!("λ={lam} iterated lowering n={n}"),
                rel_err(product, iterated_lowering_norm(n, &b)),
                1e-10,
            );
        }
    }
    Ok(r)
}

fn matel() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("matel");
    let dim = 20;
    for lam in [0.3, 1.0, 2.0] {
        let b = LambdaBasis::new(lam, 20)?;
        let l = build_ladders(dim, lam)?;
        let kets: Vec<StateVector> = (0..=12)
            .map(|n| lambda_ket(n, &b, dim))
            .collect::<Result<_>>()?;
        let me = |op: &OperatorMatrix, m: usize, n: usize| -> Result<f64> {
            Ok(kets[m].inner(&op.apply(&kets[n])?).re)
        };
        let pows_dag: Vec<OperatorMatrix> = (0..=3).map(|k| l.a_dag_lambda.pow(k)).collect();
        let pows_a: Vec<OperatorMatrix> = (0..=3).map(|k| l.a.pow(k)).collect();
        for m in 0..=12 {
            for n in 0..=12 {
                for k in 0..=3usize {
                    // (a†_λ)^k|n⟩_λ stays inside the block for n + k < dim
                    let got = matel_creation_power(m, n, k, &b);
                    let want = me(&pows_dag[k], m, n)?;
                    r.check(
                        || format!("λ={lam} ⟨{m}|a†_λ^{k}|{n}⟩"),
                        rel_err(got, want),
                        1e-9,
                    );
                    let got = matel_annihilation_power(m, n, k, &b);
                    let want = me(&pows_a[k], m, n)?;
                    r.check(
                        || format!("λ={lam} ⟨{m}|a^{k}|{n}⟩"),
                        rel_err(got, want),
                        1e-9,
                    );
                    for rr in 0..=3usize {
                        let got = matel_normal_ordered(m, n, rr, k, &b);
                        let want = me(&pows_dag[rr].dot(&pows_a[k]), m, n)?;
                        r.check(
                            || format!("λ={lam} ⟨{m}|a†_λ^{rr}a^{k}|{n}⟩"),
                            rel_err(got, want),
                            1e-9,
                        );
                    }
                }
            }
        }
    }
    Ok(r)
}

const COHERENT_ALPHAS: [C64; 3] = [C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(1.0, 1.0)];

fn coherent() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("coherent");
    for lam in [0.5, 2.0] {
        let b = LambdaBasis::shared(lam, 64)?;
        for alpha in COHERENT_ALPHAS {
            let cs = lambda_coherent(alpha, &b, Truncation::Auto)?;
            let v = cs.to_standard();
            let d = displaced_form(alpha, &b, cs.truncation)?;
            r.check(
                || format!("λ={lam} α={alpha} displaced overlap"),
                1.0 - v.overlap_modulus(&d),
                1e-10,
            );
            r.check(
                || format!("λ={lam} α={alpha} displaced components"),
                v.max_abs_diff(&d.resized(v.dim())),
                1e-9,
            );
            let l = build_ladders(cs.truncation, lam)?;
            r.check(
                || format!("λ={lam} α={alpha} eigen residual"),
                eigen_residual(&l.a, &v, alpha)?,
                1e-9,
            );
            r.check(
                || format!("λ={lam} α={alpha} λ-norm"),
                (cs.lambda_norm() - 1.0).abs(),
                1e-10,
            );
            for beta in COHERENT_ALPHAS {
                let k = coherent_overlap(alpha, beta, &b)?;
                let want = coherent_overlap_closed_form(alpha, beta, lam);
                r.check(
                    || format!("λ={lam} ⟨{alpha}|{beta}⟩ kernel"),
                    (k - want).norm(),
                    1e-9,
                );
            }
        }
    }
    Ok(r)
}

fn evolution() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("evolution");
    for lam in [0.5, 2.0] {
        let b = LambdaBasis::shared(lam, 64)?;
        for alpha in COHERENT_ALPHAS {
            let cs = lambda_coherent(alpha, &b, Truncation::Auto)?;
            for t in [0.1, 1.0, PI, 10.0] {
                let e = evolve(&cs, t)?;
                let v = e.to_standard();
                let l = build_ladders(e.truncation, lam)?;
                let z = alpha * C64::new(0.0, -t).exp();
                r.check(
                    || format!("λ={lam} α={alpha} t={t} residual"),
                    eigen_residual(&l.a, &v, z)?,
                    1e-9,
                );
                r.check(
                    || format!("λ={lam} α={alpha} t={t} norm"),
                    (v.norm() - 1.0).abs(),
                    1e-10,
                );
            }
        }
    }
    Ok(r)
}

fn poisson() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("poisson");
    let tiny = LambdaBasis::new(1e-8, 32)?;
    let zero = LambdaBasis::new(0.0, 32)?;
    for alpha in [
        c(0.5),
        c(1.0),
        c(-2.0),
        C64::new(1.0, 1.0),
        C64::new(0.0, -1.5),
    ] {
        for m in 0..=20 {
            let p = p_lambda(m, alpha, &tiny);
            let want = poisson_ln(m, alpha.norm_sqr()).exp();
            r.check(
                || format!("α={alpha} m={m} P_λ vs Poisson"),
                (p - want).abs(),
                1e-6,
            );
        }
        let q = lambda_coherent_moments(alpha, &zero)?.mandel_q;
        r.require(|| format!("α={alpha}: Q undefined at λ=0"), q.is_some());
        r.check(
            || format!("α={alpha} Q(λ=0)"),
            q.unwrap_or(f64::NAN).abs(),
            1e-8,
        );
    }
    Ok(r)
}

fn squeezed() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("squeezed");
    for xi in [c(0.2), C64::from_polar(0.3, PI / 4.0)] {
        for lam in [0.0, 0.5, 1.0] {
            let b = LambdaBasis::shared(lam, 64)?;
            let s = lambda_squeezed(xi, &b)?;
            let dim = s.support_dim() + 2;
            let v = s.to_standard(dim);
            let l = build_ladders(dim, lam)?;
            let op = l.a.sub(&l.a_dag_lambda.scale(xi));
            r.check(
                || format!("ξ={xi} λ={lam} defining equation"),
                eigen_residual(&op, &v, c(0.0))?,
                1e-8,
            );
            let (inv_sq, terms) = squeezed_norm_series(xi, &b)?;
            let gram = squeezed_norm_constant_gram(xi, &b, terms);
            r.check(
                || format!("ξ={xi} λ={lam} C_0 series vs Gram"),
                rel_err(inv_sq.powf(-0.5), gram),
                1e-9,
            );
            r.require(
                || format!("ξ={xi} λ={lam}: odd λ-basis coefficient"),
                s.expansion
                    .coeffs
                    .iter()
                    .skip(1)
                    .step_by(2)
                    .all(|z| *z == c(0.0)),
            );
        }
    }
    let b = LambdaBasis::shared(1.0, 64)?;
    let xi = c(0.3);
    let series = lambda_squeezed(xi, &b)?.to_standard(200);
    let expo = squeezed_exponential_form(xi, &b, 200)?;
    let op = squeezed_operator_form(xi, &b, 200)?;
    r.check(
        || "series vs exponential form".into(),
        1.0 - series.overlap_modulus(&expo),
        1e-8,
    );
    r.check(
        || "series vs S(ξ)D(ξλ) form".into(),
        1.0 - series.overlap_modulus(&op),
        1e-8,
    );
    r.check(
        || "exponential vs S(ξ)D(ξλ) form".into(),
        1.0 - expo.overlap_modulus(&op),
        1e-8,
    );
    let sv = squeezed_vacuum(c(0.5), 120)?;
    let l = build_ladders(120, 0.0)?;
    let op = l.a.sub(&l.a_dag.scale(c(0.5)));
    r.check(
        || "squeezed vacuum defining equation".into(),
        eigen_residual(&op, &sv, c(0.0))?,
        1e-8,
    );
    Ok(r)
}

fn quadratures() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("quadratures");
    let vac = quadrature_variances(&StateVector::vacuum(4))?;
    r.check(|| "vacuum var_x".into(), (vac.var_x - 0.5).abs(), 1e-10);
    r.check(|| "vacuum var_p".into(), (vac.var_p - 0.5).abs(), 1e-10);
    for alpha in COHERENT_ALPHAS {
        let q = quadrature_variances(&canonical_coherent(alpha, 96))?;
        r.check(
            || format!("coherent α={alpha} var_x"),
            (q.var_x - 0.5).abs(),
            1e-10,
        );
        r.check(
            || format!("coherent α={alpha} var_p"),
            (q.var_p - 0.5).abs(),
            1e-10,
        );
    }
    for xi in [0.1, 0.5, 0.8] {
        let q = quadrature_variances(&squeezed_vacuum(c(xi), 400)?)?;
        r.check(
            || format!("squeezed vacuum ξ={xi} product"),
            (q.product - 0.25).abs(),
            1e-8,
        );
        r.require(
            || format!("squeezed vacuum ξ={xi}: var_p ≥ 1/2"),
            q.var_p < 0.5,
        );
    }
    for (xi, lam) in [
        (c(0.2), 0.5),
        (C64::from_polar(0.3, PI / 4.0), 1.0),
        (c(0.4), 2.0),
    ] {
        let b = LambdaBasis::shared(lam, 64)?;
        let s = lambda_squeezed(xi, &b)?;
        let dense = quadrature_variances(&s.to_standard(0))?;
        let matel = quadrature_variances_matel(&s.expansion)?;
        r.check(
            || format!("ξ={xi} λ={lam} var_x routes"),
            rel_err(dense.var_x, matel.var_x),
            1e-8,
        );
        r.check(
            || format!("ξ={xi} λ={lam} var_p routes"),
            rel_err(dense.var_p, matel.var_p),
            1e-8,
        );
    }
    Ok(r)
}

fn radius() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("radius");
    let r0 = radius_estimate(&LambdaBasis::new(0.0, 8)?, 0.0);
    r.check(|| "R(0) vs 1".into(), (r0 - 1.0).abs(), 0.05);
    let mut prev = f64::INFINITY;
    for lam in [0.5, 1.0, 2.0, 3.0] {
        let rl = radius_estimate(&LambdaBasis::new(lam, 8)?, 0.0);
        r.require(
            || format!("R({lam}) = {rl} exceeds the previous {prev}"),
            rl <= prev,
        );
        prev = rl;
    }
    Ok(r)
}

fn appendix() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("appendix");
    let z = C64::new(0.9, -0.4);
    let canon = penson_solomon_cs(z, |n| log_factorial(n as u64), Truncation::Fixed(64))?;
    r.check(
        || "C(n)=n! vs canonical".into(),
        canon.state().max_abs_diff(&canonical_coherent(z, 64)),
        1e-12,
    );
    for family in [Family::F1, Family::F2] {
        let ps = penson_solomon_cs(z, |n| family.log_c(n).unwrap_or(f64::NAN), Truncation::Auto)?;
        let named = nonlinear_cs(family, z, Truncation::Auto)?;
        r.check(
            || format!("{} reduction", family.name()),
            ps.state().max_abs_diff(&named.state()),
            1e-12,
        );
        let v = named.state();
        let op = encoded_annihilator(family, v.dim())?;
        r.check(
            || format!("{} eigen residual", family.name()),
            eigen_residual(&op, &v, z)?,
            1e-9,
        );
    }
    let dim = 16;
    let h = number_operator(dim).add(&OperatorMatrix::identity(dim).scale(c(0.5)));
    let h2 = h.dot(&h);
    for n in 0..dim - 1 {
        r.check(
            || format!("spectrum n={n}"),
            (h2.entries[[n, n]].re - nonlinear_spectrum(n)).abs(),
            1e-12,
        );
    }
    for lam in [0.5, 1.0, 2.0] {
        let b = LambdaBasis::new(lam, 24)?;
        for m in 0..=20 {
            for (i, v) in identify_bound_state_nonlinearity(m, &b)?.iter().enumerate() {
                let want = (m - i) as f64;
                r.check(
                    || format!("λ={lam} m={m} r_{}", i + 1),
                    rel_err(*v, want),
                    1e-10,
                );
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run("bogus"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn fast_suites_pass() {
        for name in ["overlaps", "ladders", "poisson", "appendix"] {
            let r = run_suite(name).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut r = SuiteReport::new("t");
        r.check(|| "ok".into(), 1e-12, 1e-10);
        r.check(|| "bad".into(), 1e-3, 1e-10);
        r.check(|| "nan".into(), f64::NAN, 1.0);
        assert_eq!(r.failures.len(), 2);
        assert!(r.max_err.is_nan());
    }
}
