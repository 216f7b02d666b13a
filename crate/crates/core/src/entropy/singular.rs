use nalgebra::DVector;
use serde::Serialize;

use super::{EntropyOptions, InfinityReason};
use crate::error::Result;
use crate::hermitian::{check_dims, projector_onto, CMatrix, StateOperator, C64};
use crate::loewner::PhiSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryStatus {
    NoEigenvalue,
    EigenvalueWithAgreement,
    EigenvalueWithMismatch,
}

/// Classification at one boundary point (0 or 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryClass {
    pub boundary: f64,
    /// φ' is discontinuous here; unflagged boundaries are never singular.
    pub flagged: bool,
    pub status: BoundaryStatus,
    pub kernel_dim: usize,
    /// Largest `‖(A-B)ψ‖` over the eigenvectors ψ of B at the boundary.
    pub mismatch_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularCase {
    pub at_zero: BoundaryClass,
    pub at_one: BoundaryClass,
}

impl SingularCase {
    pub fn mismatch_reason(&self) -> Option<InfinityReason> {
        if self.at_zero.status == BoundaryStatus::EigenvalueWithMismatch {
            Some(InfinityReason::KernelMismatchAtZero)
        } else if self.at_one.status == BoundaryStatus::EigenvalueWithMismatch {
            Some(InfinityReason::KernelMismatchAtOne)
        } else {
            None
        }
    }

    pub fn has_agreement(&self) -> bool {
        self.at_zero.status == BoundaryStatus::EigenvalueWithAgreement
            || self.at_one.status == BoundaryStatus::EigenvalueWithAgreement
    }
}

/// Indices of B's eigenvalues sitting at a flagged boundary.
pub(crate) fn boundary_indices(spec: &PhiSpec, b: &StateOperator, tol: f64) -> Vec<usize> {
    b.eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &x)| (spec.discontinuous_at_zero && x <= tol) || (spec.discontinuous_at_one && x >= 1.0 - tol))
        .map(|(i, _)| i)
        .collect()
}

fn classify_boundary(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, boundary: f64, opts: &EntropyOptions) -> BoundaryClass {
    let flagged = spec.flags_boundary(boundary);
    let mut class = BoundaryClass {
        boundary,
        flagged,
        status: BoundaryStatus::NoEigenvalue,
        kernel_dim: 0,
        mismatch_norm: 0.0,
    };
    if !flagged {
        return class;
    }
    let q = a.matrix() - b.matrix();
    let spec_b = b.spectral();
    for (i, &x) in spec_b.eigenvalues.iter().enumerate() {
        if (x - boundary).abs() <= opts.boundary_tol {
            class.kernel_dim += 1;
            let psi: DVector<C64> = spec_b.eigenvectors.column(i).into_owned();
            class.mismatch_norm = class.mismatch_norm.max((&q * psi).norm());
        }
    }
    if class.kernel_dim > 0 {
        class.status = if class.mismatch_norm <= opts.agreement_tol {
            BoundaryStatus::EigenvalueWithAgreement
        } else {
            BoundaryStatus::EigenvalueWithMismatch
        };
    }
    class
}

/// Which of the three singular cases applies at each flagged boundary.
pub fn classify_singular_case(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<SingularCase> {
    check_dims(a.dim(), b.dim())?;
    Ok(SingularCase {
        at_zero: classify_boundary(spec, a, b, 0.0, opts),
        at_one: classify_boundary(spec, a, b, 1.0, opts),
    })
}

/// The pair on which the entropy formulas are evaluated.
#[derive(Clone, Debug)]
pub(crate) enum Reduced {
    Infinite(InfinityReason),
    /// Every direction is a boundary kernel on which A = B.
    Empty,
    Pair(StateOperator, StateOperator),
}

/// Drops the boundary kernels of B on which A agrees with B, or reports +∞
/// on a mismatch. Agreement forces A to be block diagonal with respect to
/// the kernel, so restricting both operators to its complement loses nothing.
pub(crate) fn reduce(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<(SingularCase, Reduced)> {
    let case = classify_singular_case(spec, a, b, opts)?;
    if let Some(reason) = case.mismatch_reason() {
        return Ok((case, Reduced::Infinite(reason)));
    }
    if !case.has_agreement() {
        return Ok((case, Reduced::Pair(a.clone(), b.clone())));
    }
    let kernel = boundary_indices(spec, b, opts.boundary_tol);
    let keep: Vec<usize> = (0..b.dim()).filter(|i| !kernel.contains(i)).collect();
    if keep.is_empty() {
        return Ok((case, Reduced::Empty));
    }
    let vecs = &b.spectral().eigenvectors;
    let complement = CMatrix::from_fn(b.dim(), keep.len(), |r, k| vecs[(r, keep[k])]);
    let p = projector_onto(&complement);
    Ok((case, Reduced::Pair(a.restrict(&p)?, b.restrict(&p)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> EntropyOptions {
        EntropyOptions::default()
    }

    #[test]
    fn interior_b_has_no_eigenvalue() {
        let spec = PhiSpec::fermionic().unwrap();
        let a = StateOperator::from_real_diagonal(&[0.3, 0.6]).unwrap();
        let b = StateOperator::from_real_diagonal(&[0.05, 0.9]).unwrap();
        let c = classify_singular_case(&spec, &a, &b, &opts()).unwrap();
        assert_eq!(c.at_zero.status, BoundaryStatus::NoEigenvalue);
        assert_eq!(c.at_one.status, BoundaryStatus::NoEigenvalue);
    }

    #[test]
    fn shared_kernel_agrees() {
        let spec = PhiSpec::fermionic().unwrap();
        let a = StateOperator::from_real_diagonal(&[0.0, 0.7]).unwrap();
        let b = StateOperator::from_real_diagonal(&[0.0, 0.5]).unwrap();
        let c = classify_singular_case(&spec, &a, &b, &opts()).unwrap();
        assert_eq!(c.at_zero.status, BoundaryStatus::EigenvalueWithAgreement);
        assert_eq!(c.at_zero.kernel_dim, 1);
    }

    #[test]
    fn kernel_mismatch() {
        let spec = PhiSpec::fermionic().unwrap();
        let a = StateOperator::from_real_diagonal(&[0.3, 0.5]).unwrap();
        let b = StateOperator::from_real_diagonal(&[0.0, 0.5]).unwrap();
        let c = classify_singular_case(&spec, &a, &b, &opts()).unwrap();
        assert_eq!(c.at_zero.status, BoundaryStatus::EigenvalueWithMismatch);
        assert!((c.at_zero.mismatch_norm - 0.3).abs() < 1e-15);
        assert_eq!(c.mismatch_reason(), Some(InfinityReason::KernelMismatchAtZero));
    }

    #[test]
    fn unflagged_boundaries_are_ignored() {
        let spec = PhiSpec::power2().unwrap();
        let a = StateOperator::from_real_diagonal(&[0.3, 0.5]).unwrap();
        let b = StateOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let c = classify_singular_case(&spec, &a, &b, &opts()).unwrap();
        assert_eq!(c.mismatch_reason(), None);
        assert!(!c.at_zero.flagged);
        // bosonic flags only zero
        let spec = PhiSpec::bosonic().unwrap();
        let c = classify_singular_case(&spec, &a, &b, &opts()).unwrap();
        assert_eq!(c.at_zero.status, BoundaryStatus::EigenvalueWithMismatch);
        assert_eq!(c.at_one.status, BoundaryStatus::NoEigenvalue);
    }
}
