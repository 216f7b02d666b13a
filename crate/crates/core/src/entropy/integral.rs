//! The double-integral form
//! `H = 2b ∫ ∫_0^∞ tr[R(B) Q R(A) Q R(B)] dt dμ(λ)`,
//! `R(X) = (1 + λ(1-2X) + t)^{-1}`, `Q = A - B`.

use super::{reduce_or_value, EntropyOptions, EntropyValue};
use crate::error::{Error, Result};
use crate::hermitian::StateOperator;
use crate::loewner::PhiSpec;
use crate::quad::{integrate_halfline, integrate_measure};

/// Lower bound below which a sampled trace is an internal error.
pub const INTEGRAND_FLOOR: f64 = -1e-12;

/// One evaluation of the t-integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrandSample {
    pub lambda: f64,
    pub t: f64,
    pub trace: f64,
    /// `‖Q‖₂²` of the pair being integrated.
    pub hs_norm_sq: f64,
}

impl IntegrandSample {
    /// `(1-|λ|+t)^{-3} ‖Q‖₂²`, which dominates the trace for `0 <= A, B <= 1`.
    pub fn dominating_bound(&self) -> f64 {
        (1.0 - self.lambda.abs() + self.t).powi(-3) * self.hs_norm_sq
    }
}

/// `tr[R(B) Q R(A) Q R(B)]` as a function of `(λ, t)`.
///
/// With `B = U diag(β) U*`, `A = V diag(α) V*` and `W_ij = |(U*QV)_ij|²` the
/// trace is `Σ_ij W_ij / ((m_i + t)² (n_j + t))`, where
/// `m_i = 1 + λ(1-2β_i)` and `n_j = 1 + λ(1-2α_j)`.
pub struct ResolventTrace {
    weights: Vec<f64>,
    n_a: usize,
    s_b: Vec<f64>,
    s_a: Vec<f64>,
    pub hs_norm_sq: f64,
}

impl ResolventTrace {
    pub fn new(a: &StateOperator, b: &StateOperator) -> Self {
        let q = a.matrix() - b.matrix();
        let cross = b.spectral().eigenvectors.adjoint() * q * &a.spectral().eigenvectors;
        let (nb, na) = (b.dim(), a.dim());
        let mut weights = vec![0.0; nb * na];
        for i in 0..nb {
            for j in 0..na {
                weights[i * na + j] = cross[(i, j)].norm_sqr();
            }
        }
        let hs_norm_sq = weights.iter().sum();
        Self {
            weights,
            n_a: na,
            s_b: b.eigenvalues().iter().map(|x| 1.0 - 2.0 * x).collect(),
            s_a: a.eigenvalues().iter().map(|x| 1.0 - 2.0 * x).collect(),
            hs_norm_sq,
        }
    }

    pub fn eval(&self, lambda: f64, t: f64) -> f64 {
        let ra: Vec<f64> = self.s_a.iter().map(|s| 1.0 / (1.0 + lambda * s + t)).collect();
        let mut total = 0.0;
        for (i, sb) in self.s_b.iter().enumerate() {
            let rb = 1.0 / (1.0 + lambda * sb + t);
            let row = &self.weights[i * self.n_a..(i + 1) * self.n_a];
            let inner: f64 = row.iter().zip(&ra).map(|(w, r)| w * r).sum();
            total += rb * rb * inner;
        }
        total
    }
}

/// Tolerances of the two nested quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadTolerances {
    pub lambda: f64,
    pub t: f64,
}

impl Default for QuadTolerances {
    fn default() -> Self {
        Self { lambda: crate::quad::DEFAULT_TOL_LAMBDA, t: crate::quad::DEFAULT_TOL_T }
    }
}

/// Double-integral entropy. Requires `b > 0` for a nonzero result; when
/// `b = 0`, φ is affine and the entropy is 0.
pub fn relative_entropy_integral(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, tol: QuadTolerances) -> Result<EntropyValue> {
    relative_entropy_integral_observed(spec, a, b, tol, &EntropyOptions::default(), &mut |_| {})
}

/// As [`relative_entropy_integral`], reporting every sampled trace to `observe`.
pub fn relative_entropy_integral_observed(
    spec: &PhiSpec,
    a: &StateOperator,
    b: &StateOperator,
    tol: QuadTolerances,
    opts: &EntropyOptions,
    observe: &mut dyn FnMut(IntegrandSample),
) -> Result<EntropyValue> {
    let (a, b) = match reduce_or_value(spec, a, b, opts)? {
        Ok(pair) => pair,
        Err(value) => return Ok(value),
    };
    if spec.b == 0.0 {
        return EntropyValue::finite(0.0);
    }
    let kernel = ResolventTrace::new(&a, &b);
    if kernel.hs_norm_sq == 0.0 {
        return EntropyValue::finite(0.0);
    }
    let outer_tol = tol.lambda / (2.0 * spec.b);
    let r = integrate_measure(
        |lambda| {
            let inner = integrate_halfline(
                |t| {
                    let trace = kernel.eval(lambda, t);
                    if trace < INTEGRAND_FLOOR {
                        return Err(Error::Internal(format!("negative trace {trace} at λ={lambda}, t={t}")));
                    }
                    observe(IntegrandSample { lambda, t, trace, hs_norm_sq: kernel.hs_norm_sq });
                    Ok(trace)
                },
                tol.t,
                3.0,
            )?;
            Ok(inner.value)
        },
        &spec.measure,
        outer_tol,
    )?;
    EntropyValue::finite(2.0 * spec.b * r.value)
}
