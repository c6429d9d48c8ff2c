//! Coefficient dumps for `lfock state`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::appendix::{encoded_annihilator, nonlinear_cs, Family};
use crate::error::{Error, Result};
use crate::fock::{lambda_ket, standard_to_expansion, LambdaBasis, LambdaExpansion};
use crate::oracle::{build_ladders, eigen_residual, StateVector};
use crate::states::{
    lambda_coherent, lambda_squeezed, squeezed_vacuum, Truncation, AUTO_TRUNCATION_START, TAIL_TOL,
    TRUNCATION_CAP,
};
use crate::sweep::SweepResult;

pub const KINDS: [&str; 7] = [
    "lambda_ket",
    "lambda_cs",
    "lambda_ss",
    "squeezed_vacuum",
    "f1",
    "f2",
    "canonical",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRequest {
    pub lambda: f64,
    pub alpha: C64,
    pub xi: C64,
    pub n: usize,
    pub truncation: Truncation,
}

impl Default for StateRequest {
    fn default() -> Self {
        StateRequest {
            lambda: 0.0,
            alpha: C64::new(0.0, 0.0),
            xi: C64::new(0.0, 0.0),
            n: 0,
            truncation: Truncation::Auto,
        }
    }
}

struct Built {
    standard: StateVector,
    lambda: LambdaExpansion,
    residual: f64,
    residual_of: &'static str,
}

fn squeezed_vacuum_dim(xi: C64, truncation: Truncation) -> Result<usize> {
    match truncation {
        Truncation::Fixed(n) => Ok(n),
        Truncation::Auto => {
            let mut dim = AUTO_TRUNCATION_START;
            while dim <= TRUNCATION_CAP {
                let v = squeezed_vacuum(xi, dim + 2)?;
                if v.coeffs[dim].norm() < TAIL_TOL && v.coeffs[dim - 1].norm() < TAIL_TOL {
                    return Ok(dim);
                }
                dim *= 2;
            }
            Err(Error::TruncationCap {
                cap: TRUNCATION_CAP,
                what: "squeezed vacuum",
            })
        }
    }
}

fn build(kind: &str, req: &StateRequest, basis: &Arc<LambdaBasis>) -> Result<Built> {
    let lam = req.lambda;
    match kind {
        "lambda_ket" => {
            let dim = req.n + 1;
            let v = lambda_ket(req.n, basis, dim)?;
            let mut coeffs = ndarray::Array1::zeros(dim);
            coeffs[req.n] = C64::new(1.0, 0.0);
            let l = build_ladders(dim + 1, lam)?;
            let number = l.a_dag_lambda.dot(&l.a);
            let residual =
                eigen_residual(&number, &v.resized(dim + 1), C64::new(req.n as f64, 0.0))?;
            Ok(Built {
                standard: v,
                lambda: LambdaExpansion::new(basis.clone(), coeffs),
                residual,
                residual_of: "a†_λ a − n",
            })
        }
        "lambda_cs" => {
            let cs = lambda_coherent(req.alpha, basis, req.truncation)?;
            let v = cs.to_standard();
            let l = build_ladders(v.dim().max(2), lam)?;
            let residual = eigen_residual(&l.a, &v.resized(v.dim().max(2)), req.alpha)?;
            Ok(Built {
                standard: v,
                lambda: cs.expansion,
                residual,
                residual_of: "a − α",
            })
        }
        "lambda_ss" => {
            let s = lambda_squeezed(req.xi, basis)?;
            let dim = s.support_dim() + 1;
            let v = s.to_standard(dim);
            let l = build_ladders(v.dim().max(2), lam)?;
            let op = l.a.sub(&l.a_dag_lambda.scale(req.xi));
            let residual = eigen_residual(&op, &v.resized(v.dim().max(2)), C64::new(0.0, 0.0))?;
            Ok(Built {
                standard: v,
                lambda: s.expansion,
                residual,
                residual_of: "a − ξ a†_λ",
            })
        }
        "squeezed_vacuum" => {
            let dim = squeezed_vacuum_dim(req.xi, req.truncation)?;
            let v = squeezed_vacuum(req.xi, dim.max(2))?;
            let l = build_ladders(v.dim(), 0.0)?;
            let op = l.a.sub(&l.a_dag.scale(req.xi));
            let residual = eigen_residual(&op, &v, C64::new(0.0, 0.0))?;
            let lambda = standard_to_expansion(basis, &v);
            Ok(Built {
                standard: v,
                lambda,
                residual,
                residual_of: "a − ξ a†",
            })
        }
        "f1" | "f2" | "canonical" => {
            let family = Family::parse(kind)?;
            let cs = nonlinear_cs(family, req.alpha, req.truncation)?;
            let v = cs.state();
            let op = encoded_annihilator(family, v.dim())?;
            let residual = eigen_residual(&op, &v, req.alpha)?;
            let lambda = standard_to_expansion(basis, &v);
            Ok(Built {
                standard: v,
                lambda,
                residual,
                residual_of: "a f(n̂) − α",
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown state kind `{other}` (expected {})",
            KINDS.join(", ")
        ))),
    }
}

fn split(values: impl Iterator<Item = C64>, len: usize) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let mut re = Vec::with_capacity(len);
    let mut im = Vec::with_capacity(len);
    for z in values {
        re.push(Some(z.re));
        im.push(Some(z.im));
    }
    re.resize(len, None);
    im.resize(len, None);
    (re, im)
}

/// Coefficients in both bases, indexed by `n`, with norms and the defining
/// equation's residual in the metadata.
pub fn state_dump(kind: &str, req: &StateRequest) -> Result<SweepResult> {
    let basis = LambdaBasis::shared(req.lambda, 64)?;
    let built = build(kind, req, &basis)?;
    let len = built.standard.dim().max(built.lambda.len());
    let truncation = match req.truncation {
        Truncation::Auto => json!("auto"),
        Truncation::Fixed(n) => json!(n),
    };
    let meta = json!({
        "command": "state",
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "lambda": req.lambda,
        "alpha": [req.alpha.re, req.alpha.im],
        "xi": [req.xi.re, req.xi.im],
        "n": req.n,
        "truncation": truncation,
        "norm_standard": built.standard.norm(),
        "norm_lambda": built.lambda.norm_sqr().sqrt(),
        "residual": built.residual,
        "residual_operator": built.residual_of,
    });
    let mut out = SweepResult::new("n", (0..len).map(|n| n as f64).collect(), meta);
    let (re, im) = split(built.standard.coeffs.iter().copied(), len);
    out.push_series("standard_re", re)?;
    out.push_series("standard_im", im)?;
    let (re, im) = split(built.lambda.coeffs.iter().copied(), len);
    out.push_series("lambda_re", re)?;
    out.push_series("lambda_im", im)?;
    Ok(out)
}
