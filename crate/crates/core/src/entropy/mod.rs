//! Relative entropy `H(A,B) = tr[φ(A) - φ(B) - φ'(B)(A-B)]` and its
//! alternative forms.

mod gateaux;
mod integral;
mod report;
mod singular;
mod value;

pub use gateaux::{
    divided_difference, gateaux_derivative_resolvent, gateaux_derivative_resolvent_with, gateaux_derivative_spectral,
    gateaux_derivative_spectral_with, DEGENERACY_GAP,
};
pub use integral::{
    relative_entropy_integral, relative_entropy_integral_observed, IntegrandSample, QuadTolerances, ResolventTrace,
    INTEGRAND_FLOOR,
};
pub use report::{evaluate_all, FormulaReport, GATEAUX_AGREEMENT, INTEGRAL_RELATIVE_AGREEMENT};
pub use singular::{classify_singular_case, BoundaryClass, BoundaryStatus, SingularCase};
pub use value::{EntropyValue, InfinityReason, NEGATIVITY_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{check_dims, StateOperator};
use crate::loewner::PhiSpec;
use singular::{reduce, Reduced};

/// Tolerances shared by the entropy formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyOptions {
    /// Distance from 0 or 1 at which an eigenvalue of B counts as boundary.
    pub boundary_tol: f64,
    /// `‖(A-B)ψ‖` below which A agrees with B on a boundary eigenvector.
    pub agreement_tol: f64,
    pub tol_lambda: f64,
    pub tol_t: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            boundary_tol: 1e-10,
            agreement_tol: 1e-10,
            tol_lambda: crate::quad::DEFAULT_TOL_LAMBDA,
            tol_t: crate::quad::DEFAULT_TOL_T,
        }
    }
}

impl EntropyOptions {
    pub fn quad(&self) -> QuadTolerances {
        QuadTolerances { lambda: self.tol_lambda, t: self.tol_t }
    }
}

/// The pair to evaluate on, or the answer when none is needed.
pub(crate) fn reduce_or_value(
    spec: &PhiSpec,
    a: &StateOperator,
    b: &StateOperator,
    opts: &EntropyOptions,
) -> Result<std::result::Result<(StateOperator, StateOperator), EntropyValue>> {
    Ok(match reduce(spec, a, b, opts)?.1 {
        Reduced::Infinite(reason) => Err(EntropyValue::PlusInfinity(reason)),
        Reduced::Empty => Err(EntropyValue::Finite(0.0)),
        Reduced::Pair(a, b) => Ok((a, b)),
    })
}

fn spectral_sum(spec: &PhiSpec, x: &StateOperator) -> Result<f64> {
    let mut total = 0.0;
    for &e in x.eigenvalues() {
        let v = spec.phi(e);
        if !v.is_finite() {
            return Err(Error::Domain { eigenvalue: e });
        }
        total += v;
    }
    Ok(total)
}

/// `tr[φ'(B)(A-B)]`, computed in B's eigenbasis.
fn derivative_trace(spec: &PhiSpec, a: &StateOperator, b: &StateOperator) -> Result<f64> {
    let qt = b.spectral().to_eigenbasis(&(a.matrix() - b.matrix()));
    let mut total = 0.0;
    for (i, &e) in b.eigenvalues().iter().enumerate() {
        let d = spec.phi_prime(e);
        if !d.is_finite() {
            return Err(Error::Domain { eigenvalue: e });
        }
        total += d * qt[(i, i)].re;
    }
    Ok(total)
}

/// `tr[φ(A) - φ(B) - φ'(B)(A-B)]` by functional calculus.
pub fn relative_entropy_direct(spec: &PhiSpec, a: &StateOperator, b: &StateOperator) -> Result<EntropyValue> {
    relative_entropy_direct_with(spec, a, b, &EntropyOptions::default())
}

pub fn relative_entropy_direct_with(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<EntropyValue> {
    let (a, b) = match reduce_or_value(spec, a, b, opts)? {
        Ok(pair) => pair,
        Err(v) => return Ok(v),
    };
    EntropyValue::finite(spectral_sum(spec, &a)? - spectral_sum(spec, &b)? - derivative_trace(spec, &a, &b)?)
}

/// `tr[φ(A) - φ(B) - Dφ(B)[A-B]]` with the spectral Gâteaux derivative.
pub fn relative_entropy_gateaux(spec: &PhiSpec, a: &StateOperator, b: &StateOperator) -> Result<EntropyValue> {
    relative_entropy_gateaux_with(spec, a, b, &EntropyOptions::default())
}

pub fn relative_entropy_gateaux_with(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<EntropyValue> {
    let (a, b) = match reduce_or_value(spec, a, b, opts)? {
        Ok(pair) => pair,
        Err(v) => return Ok(v),
    };
    let q = a.hermitian().sub(b.hermitian())?;
    let d = gateaux_derivative_spectral_with(spec, &b, &q, opts)?;
    EntropyValue::finite(spectral_sum(spec, &a)? - spectral_sum(spec, &b)? - d.trace())
}

/// Both sides of the trace identity for the Gâteaux derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem4Report {
    /// Entropy with the Gâteaux derivative.
    pub lhs: f64,
    /// Entropy with `φ'(B)(A-B)`.
    pub rhs: f64,
    pub difference: f64,
    pub derivative_trace_gateaux: f64,
    pub derivative_trace_direct: f64,
}

/// Fails with [`Error::SingularDirection`] when the pair has a kernel
/// mismatch, since neither side is then finite.
pub fn theorem4_check(spec: &PhiSpec, a: &StateOperator, b: &StateOperator) -> Result<Theorem4Report> {
    theorem4_check_with(spec, a, b, &EntropyOptions::default())
}

pub fn theorem4_check_with(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<Theorem4Report> {
    check_dims(a.dim(), b.dim())?;
    let (a, b) = match reduce(spec, a, b, opts)? {
        (case, Reduced::Infinite(_)) => {
            let class = if case.at_zero.status == BoundaryStatus::EigenvalueWithMismatch { case.at_zero } else { case.at_one };
            return Err(Error::SingularDirection { boundary: class.boundary, norm: class.mismatch_norm });
        }
        (_, Reduced::Empty) => {
            return Ok(Theorem4Report { lhs: 0.0, rhs: 0.0, difference: 0.0, derivative_trace_gateaux: 0.0, derivative_trace_direct: 0.0 })
        }
        (_, Reduced::Pair(a, b)) => (a, b),
    };
    let q = a.hermitian().sub(b.hermitian())?;
    let gateaux = gateaux_derivative_spectral_with(spec, &b, &q, opts)?.trace();
    let direct = derivative_trace(spec, &a, &b)?;
    let base = spectral_sum(spec, &a)? - spectral_sum(spec, &b)?;
    let (lhs, rhs) = (base - gateaux, base - direct);
    Ok(Theorem4Report {
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
        derivative_trace_gateaux: gateaux,
        derivative_trace_direct: direct,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KleinRatio {
    Value(f64),
    /// B has spectrum at 0 or 1, where `B^{-2} + (1-B)^{-2}` does not exist.
    Undefined,
}

impl KleinRatio {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(*v),
            Self::Undefined => None,
        }
    }
}

impl Serialize for KleinRatio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

/// `H(A,B) / tr[(B^{-2} + (1-B)^{-2})(A-B)²]`. The ratio is 0 when `A = B`.
pub fn klein_ratio(spec: &PhiSpec, a: &StateOperator, b: &StateOperator) -> Result<KleinRatio> {
    check_dims(a.dim(), b.dim())?;
    let tol = EntropyOptions::default().boundary_tol;
    if b.eigenvalues().iter().any(|&x| x <= tol || x >= 1.0 - tol) {
        return Ok(KleinRatio::Undefined);
    }
    let h = match relative_entropy_direct(spec, a, b)? {
        EntropyValue::Finite(h) => h,
        EntropyValue::PlusInfinity(_) => return Ok(KleinRatio::Undefined),
    };
    // tr[W Q²] with W diagonal in B's eigenbasis: Σ_i w_i Σ_k |Q̃_ik|².
    let qt = b.spectral().to_eigenbasis(&(a.matrix() - b.matrix()));
    let mut denom = 0.0;
    for (i, &x) in b.eigenvalues().iter().enumerate() {
        let w = x.powi(-2) + (1.0 - x).powi(-2);
        denom += w * qt.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    if denom == 0.0 {
        return Ok(KleinRatio::Value(0.0));
    }
    Ok(KleinRatio::Value(h / denom))
}
