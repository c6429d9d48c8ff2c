//! Brute-force reference engine: dense truncated ladder operators and the
//! action of matrix exponentials on vectors.
//!
//! Nothing here knows about Laguerre polynomials or the deformed basis
//! formulas; it is the independent side of every cross-check.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Extra levels used by [`stable_apply`] to detect truncation artifacts.
pub const TRUNCATION_MARGIN: usize = 20;
/// Agreement required between the runs at `N` and `N + margin`.
pub const TRUNCATION_TOL: f64 = 1e-9;

const EXPM_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisTag {
    Standard,
    /// Coefficients over `|n⟩_λ` for the given `λ`.
    Lambda(f64),
}

/// Finite coefficient vector over `|0⟩ … |N−1⟩` (or over `|n⟩_λ`).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub coeffs: Array1<C64>,
    pub basis: BasisTag,
}

impl StateVector {
    pub fn standard(coeffs: Array1<C64>) -> Self {
        StateVector {
            coeffs,
            basis: BasisTag::Standard,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::standard(Array1::zeros(dim))
    }

    /// The number state `|n⟩` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::IndexOutOfRange {
                index: n,
                limit: dim,
            });
        }
        let mut v = Self::zeros(dim);
        v.coeffs[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::fock(0, dim).expect("dim >= 1")
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Euclidean norm for standard vectors, Gram quadratic form for λ-tagged ones.
    pub fn norm(&self) -> f64 {
        match self.basis {
            BasisTag::Standard => euclid_norm(&self.coeffs),
            BasisTag::Lambda(lambda) => {
                let basis = crate::fock::LambdaBasis::new(lambda, self.dim().max(1))
                    .expect("finite lambda");
                crate::fock::gram_quadratic_form(&basis, &self.coeffs).sqrt()
            }
        }
    }

    /// Express the vector over the standard basis.
    pub fn to_standard(&self) -> StateVector {
        match self.basis {
            BasisTag::Standard => self.clone(),
            BasisTag::Lambda(lambda) => {
                let basis = crate::fock::LambdaBasis::new(lambda, self.dim().max(1))
                    .expect("finite lambda");
                crate::fock::expansion_to_standard(&basis, &self.coeffs, self.dim())
            }
        }
    }

    /// Standard-basis inner product `⟨self|other⟩`, zero-padding the shorter vector.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨u|v⟩| / (‖u‖‖v‖)` in the standard basis.
    pub fn overlap_modulus(&self, other: &StateVector) -> f64 {
        let u = self.to_standard();
        let v = other.to_standard();
        u.inner(&v).norm() / (u.norm() * v.norm())
    }

    pub fn scaled(&self, s: C64) -> StateVector {
        StateVector {
            coeffs: self.coeffs.mapv(|c| c * s),
            basis: self.basis,
        }
    }

    pub fn normalized(&self) -> StateVector {
        self.scaled(C64::new(1.0 / self.norm(), 0.0))
    }

    /// Resize to `dim`, zero-padding or dropping the top components.
    pub fn resized(&self, dim: usize) -> StateVector {
        let mut coeffs = Array1::zeros(dim);
        let k = dim.min(self.dim());
        coeffs
            .slice_mut(ndarray::s![..k])
            .assign(&self.coeffs.slice(ndarray::s![..k]));
        StateVector {
            coeffs,
            basis: self.basis,
        }
    }

    /// Rotate by a global phase so the first nonzero component is real positive.
    pub fn phase_aligned(&self) -> StateVector {
        match self.coeffs.iter().find(|c| c.norm() > 0.0) {
            Some(c) => self.scaled(c.conj() / c.norm()),
            None => self.clone(),
        }
    }

    /// Largest componentwise modulus of the difference (standard basis, zero-padded).
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let u = self.to_standard();
        let v = other.to_standard();
        let dim = u.dim().max(v.dim());
        let (u, v) = (u.resized(dim), v.resized(dim));
        u.coeffs
            .iter()
            .zip(v.coeffs.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn euclid_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense complex `N × N` matrix over the truncated standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: Array2<C64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix {
            entries: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            entries: Array2::eye(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dot(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn pow(&self, k: u32) -> OperatorMatrix {
        (0..k).fold(OperatorMatrix::identity(self.dim()), |acc, _| acc.dot(self))
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let v = v.to_standard();
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.dim()));
        }
        Ok(StateVector::standard(self.entries.dot(&v.coeffs)))
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, s: C64) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.mapv(|x| x * s),
        }
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.t().mapv(|x| x.conj()),
        }
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.dot(other).sub(&other.dot(self))
    }

    pub fn is_strictly_triangular(&self) -> bool {
        let zero = C64::new(0.0, 0.0);
        let upper = self
            .entries
            .indexed_iter()
            .all(|((i, j), x)| j > i || *x == zero);
        let lower = self
            .entries
            .indexed_iter()
            .all(|((i, j), x)| j < i || *x == zero);
        upper || lower
    }

    /// The common diagonal entry, if all diagonal entries are equal.
    pub fn constant_diagonal(&self) -> Option<C64> {
        let d = self.entries.diag();
        let first = *d.first()?;
        d.iter().all(|x| *x == first).then_some(first)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        self.entries
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `⟨v|M|v⟩` for a standard-basis vector.
    pub fn expectation(&self, v: &StateVector) -> Result<C64> {
        let mv = self.apply(v)?;
        Ok(v.to_standard().inner(&mv))
    }
}

/// Truncated `a`, `a†` and `a†_λ = a† + λ·I`.
#[derive(Debug, Clone)]
pub struct Ladders {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub a_dag_lambda: OperatorMatrix,
}

pub fn build_ladders(dim: usize, lambda: f64) -> Result<Ladders> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("truncation {dim} < 2")));
    }
    let mut a = OperatorMatrix::zeros(dim);
    for n in 1..dim {
        a.entries[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    let a_dag_lambda = a_dag.add(&OperatorMatrix::identity(dim).scale(C64::new(lambda, 0.0)));
    Ok(Ladders {
        a,
        a_dag,
        a_dag_lambda,
    })
}

/// `n̂ = a†a` as a diagonal matrix.
pub fn number_operator(dim: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(dim);
    for n in 0..dim {
        m.entries[[n, n]] = C64::new(n as f64, 0.0);
    }
    m
}

/// Generator `αa† − α*a` of the displacement operator.
pub fn displacement_generator(alpha: C64, dim: usize) -> Result<OperatorMatrix> {
    let l = build_ladders(dim, 0.0)?;
    Ok(l.a_dag.scale(alpha).sub(&l.a.scale(alpha.conj())))
}

/// Generator `ξ(a†)²/2` of the (non-unitary) squeeze operator `S(ξ)`.
pub fn squeeze_generator(xi: C64, dim: usize) -> Result<OperatorMatrix> {
    let l = build_ladders(dim, 0.0)?;
    Ok(l.a_dag.dot(&l.a_dag).scale(xi * 0.5))
}

/// Generator `ξ(a†_λ)²/2`.
pub fn lambda_squeeze_generator(xi: C64, lambda: f64, dim: usize) -> Result<OperatorMatrix> {
    let l = build_ladders(dim, lambda)?;
    Ok(l.a_dag_lambda.dot(&l.a_dag_lambda).scale(xi * 0.5))
}

/// `e^M v` by scaled Taylor action: `M` is divided by `s ≥ ‖M‖₁` and the
/// truncated series is applied `s` times.
pub fn expm_apply(m: &OperatorMatrix, v: &StateVector) -> Result<StateVector> {
    let v = v.to_standard();
    if v.dim() != m.dim() {
        return Err(Error::DimensionMismatch(m.dim(), v.dim()));
    }
    if let Some(shift) = m.constant_diagonal() {
        let nilpotent = m.sub(&OperatorMatrix::identity(m.dim()).scale(shift));
        if nilpotent.is_strictly_triangular() {
            let out = nilpotent_series(&nilpotent, &v.coeffs).mapv(|x| x * shift.exp());
            return Ok(StateVector::standard(out));
        }
    }
    let norm = m.norm_1();
    let steps = norm.ceil().max(1.0) as usize;
    let scaled = m.entries.mapv(|x| x / steps as f64);
    let mut out = v.coeffs.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        let mut converged = false;
        for k in 1..=EXPM_MAX_TERMS {
            term = scaled.dot(&term).mapv(|x| x / k as f64);
            sum += &term;
            let t = inf_norm(&term);
            let s = inf_norm(&sum);
            if t <= 1e-17 * s || t == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(EXPM_MAX_TERMS));
        }
        out = sum;
    }
    Ok(StateVector::standard(out))
}

// The series terminates after at most `dim` terms; summing it exactly keeps
// full relative accuracy in the small high-index components.
fn nilpotent_series(m: &OperatorMatrix, v: &Array1<C64>) -> Array1<C64> {
    let mut term = v.clone();
    let mut sum = v.clone();
    for k in 1..=m.dim() {
        term = m.entries.dot(&term).mapv(|x| x / k as f64);
        if term.iter().all(|x| *x == C64::new(0.0, 0.0)) {
            break;
        }
        sum += &term;
    }
    sum
}

fn inf_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `‖Mv − zv‖ / ‖v‖`.
pub fn eigen_residual(m: &OperatorMatrix, v: &StateVector, z: C64) -> Result<f64> {
    let v = v.to_standard();
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "eigen residual of the zero vector".into(),
        ));
    }
    let mv = m.apply(&v)?;
    let diff = &mv.coeffs - &v.coeffs.mapv(|c| c * z);
    Ok(euclid_norm(&diff) / norm)
}

/// Run `compute` at `dim` and `dim + TRUNCATION_MARGIN` and require the
/// first `dim − TRUNCATION_MARGIN` components to agree.
pub fn stable_apply<F>(dim: usize, compute: F) -> Result<StateVector>
where
    F: Fn(usize) -> Result<StateVector>,
{
    let base = compute(dim)?;
    let wide = compute(dim + TRUNCATION_MARGIN)?;
    let k = dim.saturating_sub(TRUNCATION_MARGIN).max(1);
    let err = (0..k)
        .map(|i| (base.coeffs[i] - wide.coeffs[i]).norm())
        .fold(0.0, f64::max);
    if err > TRUNCATION_TOL || !err.is_finite() {
        return Err(Error::TruncationMismatch {
            n: dim,
            n_plus: dim + TRUNCATION_MARGIN,
            err,
        });
    }
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn canonical_cs(alpha: C64, dim: usize) -> StateVector {
        let mut coeffs = Array1::zeros(dim);
        let mut term = c((-alpha.norm_sqr() / 2.0).exp());
        for n in 0..dim {
            if n > 0 {
                term = term * alpha / (n as f64).sqrt();
            }
            coeffs[n] = term;
        }
        StateVector::standard(coeffs)
    }

    #[test]
    fn ladders_small() {
        let l = build_ladders(2, 0.0).unwrap();
        assert_eq!(l.a.entries[[0, 1]], c(1.0));
        assert_eq!(l.a.entries[[1, 0]], c(0.0));
        assert_eq!(l.a.entries[[0, 0]], c(0.0));
        let l = build_ladders(2, 0.5).unwrap();
        let expected = [[0.5, 0.0], [1.0, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(l.a_dag_lambda.entries[[i, j]], c(expected[i][j]));
            }
        }
        assert!(build_ladders(1, 0.0).is_err());
    }

    #[test]
    fn commutator_truncation_artifact() {
        for &lam in &[0.0, 0.7, -2.0] {
            let l = build_ladders(3, lam).unwrap();
            let comm = l.a.commutator(&l.a_dag);
            let diag: Vec<f64> = (0..3).map(|i| comm.entries[[i, i]].re).collect();
            for (d, e) in diag.iter().zip([1.0, 1.0, -2.0]) {
                assert_abs_diff_eq!(*d, e, epsilon = 1e-14);
            }
            // [a, a†_λ] is the identity away from the edge row
            let l = build_ladders(8, lam).unwrap();
            let comm = l.a.commutator(&l.a_dag_lambda);
            for i in 0..7 {
                for j in 0..7 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(comm.entries[[i, j]].re, e, epsilon = 1e-12);
                    assert_abs_diff_eq!(comm.entries[[i, j]].im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn expm_trivial_cases() {
        let v = StateVector::standard(Array1::from_vec(vec![
            C64::new(0.3, -0.1),
            c(0.2),
            C64::new(0.0, 0.7),
            c(-0.4),
        ]));
        let out = expm_apply(&OperatorMatrix::zeros(4), &v).unwrap();
        assert!(out.max_abs_diff(&v) <= 1e-15);
        let m = OperatorMatrix::identity(4).scale(C64::new(0.0, PI));
        let out = expm_apply(&m, &v).unwrap();
        assert!(out.max_abs_diff(&v.scaled(c(-1.0))) <= 1e-13);
    }

    #[test]
    fn expm_nilpotent_lowering() {
        let l = build_ladders(8, 0.0).unwrap();
        let v = StateVector::fock(1, 8).unwrap();
        let out = expm_apply(&l.a, &v).unwrap();
        let mut expected = StateVector::zeros(8);
        expected.coeffs[0] = c(1.0);
        expected.coeffs[1] = c(1.0);
        assert!(out.max_abs_diff(&expected) <= 1e-13);
    }

    #[test]
    fn eigen_residual_examples() {
        let l = build_ladders(60, 0.0).unwrap();
        let vac = StateVector::vacuum(60);
        assert_eq!(eigen_residual(&l.a, &vac, c(0.0)).unwrap(), 0.0);
        let cs = canonical_cs(c(1.0), 60);
        assert!(eigen_residual(&l.a, &cs, c(1.0)).unwrap() <= 1e-10);
        let one = StateVector::fock(1, 60).unwrap();
        assert_abs_diff_eq!(
            eigen_residual(&l.a, &one, c(0.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(eigen_residual(&l.a, &StateVector::zeros(60), c(0.0)).is_err());
    }

    #[test]
    fn displacement_reproduces_coherent_state_and_inverts() {
        for &alpha in &[C64::new(1.0, 0.0), C64::new(0.5, -1.5), C64::new(0.0, 3.0)] {
            let dim = (8.0 * alpha.norm_sqr()).ceil() as usize + 40;
            let vac = StateVector::vacuum(dim);
            let d = displacement_generator(alpha, dim).unwrap();
            let disp = expm_apply(&d, &vac).unwrap();
            let cs = canonical_cs(alpha, dim);
            let k = dim - TRUNCATION_MARGIN;
            assert!(disp.resized(k).max_abs_diff(&cs.resized(k)) <= 1e-10);
            let back = expm_apply(&displacement_generator(-alpha, dim).unwrap(), &disp).unwrap();
            assert!(back.max_abs_diff(&vac) <= 1e-10);
        }
    }

    #[test]
    fn squeeze_action_matches_double_factorial_series() {
        use crate::specfun::log_double_factorial;
        for &xi in &[C64::new(0.6, 0.0), C64::new(-0.3, 0.4), C64::new(0.1, 0.0)] {
            let dim = 160;
            let out = expm_apply(
                &squeeze_generator(xi, dim).unwrap(),
                &StateVector::vacuum(dim),
            )
            .unwrap();
            for n in 0..(dim / 2 - TRUNCATION_MARGIN) {
                let ln = 0.5
                    * (log_double_factorial(2 * n as i64 - 1).unwrap()
                        - log_double_factorial(2 * n as i64).unwrap());
                let expected = xi.powu(n as u32) * ln.exp();
                let got = out.coeffs[2 * n];
                assert!((got - expected).norm() <= 1e-9 * expected.norm().max(1e-300) + 1e-300);
                assert_eq!(out.coeffs[2 * n + 1], c(0.0));
            }
        }
    }

    #[test]
    fn stable_apply_detects_truncation_errors() {
        let alpha = c(3.0);
        let good = stable_apply(112, |d| {
            expm_apply(&displacement_generator(alpha, d)?, &StateVector::vacuum(d))
        });
        assert!(good.is_ok());
        let bad = stable_apply(30, |d| {
            expm_apply(&displacement_generator(c(5.0), d)?, &StateVector::vacuum(d))
        });
        assert!(matches!(bad, Err(Error::TruncationMismatch { .. })));
    }

    #[test]
    fn truncation_stability_of_coherent_state() {
        let alpha = C64::new(1.2, 0.8);
        let run = |d: usize| {
            expm_apply(
                &displacement_generator(alpha, d).unwrap(),
                &StateVector::vacuum(d),
            )
            .unwrap()
        };
        let (n, wide) = (60, run(80));
        let base = run(n);
        let k = n - TRUNCATION_MARGIN;
        assert!(base.resized(k).max_abs_diff(&wide.resized(k)) <= 1e-9);
    }
}
