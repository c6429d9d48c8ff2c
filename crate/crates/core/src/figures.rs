//! Parameter sweeps behind the `fig1`, `fig2`, `fig3a` and `fig3b` commands.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fock::LambdaBasis;
use crate::params::{BasisChoice, Grid};
use crate::states::{lambda_squeezed, radius_guard, SQUEEZE_GUARD_FACTOR};
use crate::stats::{lambda_coherent_moments, number_moments, quadrature_variances, MomentBasis};
use crate::sweep::SweepResult;

pub const FIG1_ALPHAS: [f64; 4] = [1.0, 2.0, -1.0, -2.0];
pub const FIG1_GRID: Grid = Grid {
    min: 0.0,
    max: 5.0,
    steps: 200,
};
pub const FIG2_LAMBDAS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
pub const FIG3_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const XI_GRID: Grid = Grid {
    min: 0.02,
    max: 0.9,
    steps: 150,
};

/// Table size for the per-λ bases; larger indices fall back to direct sums.
const BASIS_TABLE: usize = 512;

fn label(x: f64) -> String {
    format!("{x}")
}

fn complex_label(z: C64) -> String {
    if z.im == 0.0 {
        label(z.re)
    } else {
        format!("{},{}", z.re, z.im)
    }
}

fn metadata(command: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut m = json!({ "command": command, "version": env!("CARGO_PKG_VERSION") });
    if let (Some(dst), Some(src)) = (m.as_object_mut(), extra.as_object()) {
        dst.extend(src.clone());
    }
    m
}

/// Mandel `Q` of `|α,λ⟩` in the λ-basis across a λ grid, one series per α.
pub fn fig1(alphas: &[C64], grid: Grid) -> Result<SweepResult> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one alpha is required".into(),
        ));
    }
    let lambdas = grid.values();
    let meta = metadata(
        "fig1",
        json!({
            "alphas": alphas.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
            "grid": grid,
            "basis": BasisChoice::Lambda,
            "quantity": "mandel_q",
        }),
    );
    let mut out = SweepResult::new("lambda", lambdas.clone(), meta);
    for &alpha in alphas {
        let points: Vec<Option<f64>> = lambdas
            .par_iter()
            .map(|&lam| {
                let basis = LambdaBasis::new(lam, BASIS_TABLE)?;
                Ok(lambda_coherent_moments(alpha, &basis)?.mandel_q)
            })
            .collect::<Result<_>>()?;
        let name = format!("Q[alpha={}]", complex_label(alpha));
        for (i, q) in points.iter().enumerate() {
            if q.is_none() {
                out.add_note(i, &format!("{name} undefined: vanishing mean"));
            }
        }
        out.push_series(name, points)?;
    }
    Ok(out)
}

struct SqueezeColumns {
    lambda: f64,
    guard: f64,
    basis: Arc<LambdaBasis>,
}

fn squeeze_columns(lambdas: &[f64]) -> Result<Vec<SqueezeColumns>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let basis = LambdaBasis::shared(lambda, BASIS_TABLE)?;
            let guard = SQUEEZE_GUARD_FACTOR * radius_guard(&basis);
            Ok(SqueezeColumns {
                lambda,
                guard,
                basis,
            })
        })
        .collect()
}

/// Evaluate `f` at every `|ξ|` inside the guard; points outside become
/// missing values with a note.
fn squeeze_sweep<F>(
    out: &mut SweepResult,
    col: &SqueezeColumns,
    names: &[String],
    f: F,
) -> Result<()>
where
    F: Fn(C64, &Arc<LambdaBasis>) -> Result<Vec<Option<f64>>> + Sync,
{
    let rows: Vec<Option<Vec<Option<f64>>>> = out
        .axis_values
        .par_iter()
        .map(|&r| {
            if r >= col.guard {
                return Ok(None);
            }
            match f(C64::new(r, 0.0), &col.basis) {
                Ok(v) => Ok(Some(v)),
                Err(Error::Domain { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
    for (i, row) in rows.iter().enumerate() {
        match row {
            Some(v) => {
                for (c, x) in columns.iter_mut().zip(v) {
                    c.push(*x);
                }
            }
            None => {
                columns.iter_mut().for_each(|c| c.push(None));
                out.add_note(
                    i,
                    &format!(
                        "lambda={}: |xi| outside guard {}",
                        label(col.lambda),
                        label(col.guard)
                    ),
                );
            }
        }
    }
    for (name, values) in names.iter().zip(columns) {
        out.push_series(name.clone(), values)?;
    }
    Ok(())
}

/// Quadrature variances of `|ξ,λ⟩` (real `ξ ≥ 0`) across a `|ξ|` grid.
pub fn fig2(lambdas: &[f64], grid: Grid) -> Result<SweepResult> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one lambda is required".into(),
        ));
    }
    let cols = squeeze_columns(lambdas)?;
    let meta = metadata(
        "fig2",
        json!({
            "lambdas": lambdas,
            "grid": grid,
            "xi_phase": 0.0,
            "guard_factor": SQUEEZE_GUARD_FACTOR,
            "guards": cols.iter().map(|c| c.guard).collect::<Vec<_>>(),
            "quantity": ["var_p", "var_x"],
        }),
    );
    let mut out = SweepResult::new("xi_abs", grid.values(), meta);
    for col in &cols {
        let l = label(col.lambda);
        let names = [format!("var_p[lambda={l}]"), format!("var_x[lambda={l}]")];
        squeeze_sweep(&mut out, col, &names, |xi, basis| {
            let state = lambda_squeezed(xi, basis)?;
            let q = quadrature_variances(&state.to_standard(0))?;
            Ok(vec![Some(q.var_p), Some(q.var_x)])
        })?;
    }
    Ok(out)
}

/// Mandel `Q` of `|ξ,λ⟩` in the chosen basis across a `|ξ|` grid.
pub fn fig3(basis_choice: BasisChoice, lambdas: &[f64], grid: Grid) -> Result<SweepResult> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one lambda is required".into(),
        ));
    }
    let cols = squeeze_columns(lambdas)?;
    let command = match basis_choice {
        BasisChoice::Lambda => "fig3a",
        BasisChoice::Standard => "fig3b",
    };
    let meta = metadata(
        command,
        json!({
            "lambdas": lambdas,
            "grid": grid,
            "xi_phase": 0.0,
            "basis": basis_choice,
            "guard_factor": SQUEEZE_GUARD_FACTOR,
            "guards": cols.iter().map(|c| c.guard).collect::<Vec<_>>(),
            "quantity": "mandel_q",
        }),
    );
    let mut out = SweepResult::new("xi_abs", grid.values(), meta);
    for col in &cols {
        let name = format!("Q[lambda={}]", label(col.lambda));
        squeeze_sweep(&mut out, col, std::slice::from_ref(&name), |xi, basis| {
            let v = lambda_squeezed(xi, basis)?.to_standard(0);
            let which = match basis_choice {
                BasisChoice::Lambda => MomentBasis::Lambda(basis),
                BasisChoice::Standard => MomentBasis::Standard,
            };
            Ok(vec![number_moments(&v, which)?.mandel_q])
        })?;
        let undefined: Vec<usize> = (0..out.len())
            .filter(|&i| out.series(&name).unwrap().values[i].is_none() && out.notes[i].is_none())
            .collect();
        for i in undefined {
            out.add_note(i, &format!("{name} undefined: vanishing mean"));
        }
    }
    Ok(out)
}
