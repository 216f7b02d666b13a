//! Directional derivative `d/dα φ(B + αQ)|₀`, two ways.

use super::singular::boundary_indices;
use super::EntropyOptions;
use crate::error::{Error, Result};
use crate::hermitian::{c, check_dims, CMatrix, HermitianMatrix, StateOperator};
use crate::loewner::PhiSpec;
use crate::quad::{integrate_halfline, integrate_measure};

/// Below this eigenvalue gap the divided difference is replaced by φ' at
/// the midpoint.
pub const DEGENERACY_GAP: f64 = 1e-7;

/// `Q` in B's eigenbasis, with boundary rows/columns checked to vanish and
/// zeroed. Returns the transformed matrix and the boundary mask.
fn eigenbasis_direction(spec: &PhiSpec, b: &StateOperator, q: &HermitianMatrix, opts: &EntropyOptions) -> Result<(CMatrix, Vec<bool>)> {
    check_dims(b.dim(), q.dim())?;
    let n = b.dim();
    let mut qt = b.spectral().to_eigenbasis(q.matrix());
    let mut boundary = vec![false; n];
    for i in boundary_indices(spec, b, opts.boundary_tol) {
        let norm = qt.column(i).norm();
        if norm > opts.agreement_tol {
            let at = if b.eigenvalues()[i] > 0.5 { 1.0 } else { 0.0 };
            return Err(Error::SingularDirection { boundary: at, norm });
        }
        boundary[i] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if boundary[i] || boundary[j] {
                qt[(i, j)] = c(0.0);
            }
        }
    }
    Ok((qt, boundary))
}

/// First divided difference of φ at `(x, y)`.
pub fn divided_difference(spec: &PhiSpec, x: f64, y: f64) -> f64 {
    if (x - y).abs() < DEGENERACY_GAP {
        spec.phi_prime(0.5 * (x + y))
    } else {
        (spec.phi(x) - spec.phi(y)) / (x - y)
    }
}

/// Daleckii-Krein form: in B's eigenbasis the derivative is the Hadamard
/// product of the divided-difference matrix with Q.
pub fn gateaux_derivative_spectral(spec: &PhiSpec, b: &StateOperator, q: &HermitianMatrix) -> Result<HermitianMatrix> {
    gateaux_derivative_spectral_with(spec, b, q, &EntropyOptions::default())
}

pub fn gateaux_derivative_spectral_with(spec: &PhiSpec, b: &StateOperator, q: &HermitianMatrix, opts: &EntropyOptions) -> Result<HermitianMatrix> {
    let (mut qt, boundary) = eigenbasis_direction(spec, b, q, opts)?;
    let beta = b.eigenvalues();
    let n = b.dim();
    for i in 0..n {
        for j in i..n {
            if boundary[i] || boundary[j] {
                continue;
            }
            let d = divided_difference(spec, beta[i], beta[j]);
            if !d.is_finite() {
                return Err(Error::Domain { eigenvalue: beta[i] });
            }
            qt[(i, j)] *= d;
            if i != j {
                qt[(j, i)] *= d;
            }
        }
    }
    Ok(HermitianMatrix::hermitize(b.spectral().from_eigenbasis(&qt)))
}

/// Resolvent form from the Loewner representation:
///
/// `D = aQ - (b/2) ∫ [2Q/λ - (2/λ) ∫_0^∞ R Q R dt] dμ(λ)`, `R = (1+λ(1-2B)+t)^{-1}`.
///
/// With `S = 1-2B` and `r₀ = (1+t)^{-1}` the bracket equals
/// `2 ∫ r₀² (SRQ + QSR - λ SRQSR) dt`, which has no 1/λ and is used at every λ.
/// In B's eigenbasis entry `(i, j)` of the bracket is `Q_ij k_λ(s_i, s_j)`.
pub fn gateaux_derivative_resolvent(spec: &PhiSpec, b: &StateOperator, q: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    gateaux_derivative_resolvent_with(spec, b, q, tol, &EntropyOptions::default())
}

pub fn gateaux_derivative_resolvent_with(
    spec: &PhiSpec,
    b: &StateOperator,
    q: &HermitianMatrix,
    tol: f64,
    opts: &EntropyOptions,
) -> Result<HermitianMatrix> {
    let (mut qt, boundary) = eigenbasis_direction(spec, b, q, opts)?;
    let s: Vec<f64> = b.eigenvalues().iter().map(|x| 1.0 - 2.0 * x).collect();
    let n = b.dim();
    let scale = 0.5 * spec.b;
    // λ-tolerance on the kernel so that each entry is within tol; the inner
    // t-integral gets a tenth of that.
    let tol_lambda = tol / scale.max(1.0);
    let tol_t = 0.1 * tol_lambda;
    for i in 0..n {
        for j in i..n {
            if boundary[i] || boundary[j] {
                continue;
            }
            let kernel = if spec.b == 0.0 || (qt[(i, j)].norm() == 0.0) {
                0.0
            } else {
                let (si, sj) = (s[i], s[j]);
                integrate_measure(
                    |lambda| {
                        let (mi, mj) = (1.0 + lambda * si, 1.0 + lambda * sj);
                        let inner = integrate_halfline(
                            |t| {
                                let r0 = 1.0 / (1.0 + t);
                                let (ri, rj) = (1.0 / (mi + t), 1.0 / (mj + t));
                                Ok(2.0 * r0 * r0 * (si * ri + sj * rj - lambda * si * sj * ri * rj))
                            },
                            tol_t,
                            3.0,
                        )?;
                        Ok(inner.value)
                    },
                    &spec.measure,
                    tol_lambda,
                )?
                .value
            };
            let factor = spec.a - scale * kernel;
            qt[(i, j)] *= factor;
            if i != j {
                qt[(j, i)] *= factor;
            }
        }
    }
    Ok(HermitianMatrix::hermitize(b.spectral().from_eigenbasis(&qt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{op_norm, random_state};
    use approx::assert_abs_diff_eq;

    fn random_direction(n: usize, seed: u64) -> HermitianMatrix {
        let x = random_state(n, 0.0, 1.0, seed).unwrap();
        let y = random_state(n, 0.0, 1.0, seed + 1000).unwrap();
        x.hermitian().sub(y.hermitian()).unwrap()
    }

    #[test]
    fn power2_is_anticommutator() {
        let spec = PhiSpec::power2().unwrap();
        let b = random_state(5, 0.0, 1.0, 1).unwrap();
        let q = random_direction(5, 2);
        let d = gateaux_derivative_spectral(&spec, &b, &q).unwrap();
        let expect = b.matrix() * q.matrix() + q.matrix() * b.matrix();
        assert!(op_norm(&(d.matrix() - expect)) < 1e-13);
    }

    #[test]
    fn commuting_direction_multiplies_by_derivative() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = StateOperator::from_real_diagonal(&[0.2, 0.5, 0.8]).unwrap();
        let q = HermitianMatrix::from_real_diagonal(&[0.1, -0.3, 0.05]);
        let d = gateaux_derivative_spectral(&spec, &b, &q).unwrap();
        for (i, (&bi, qi)) in [0.2, 0.5, 0.8].iter().zip([0.1, -0.3, 0.05]).enumerate() {
            assert_abs_diff_eq!(d.matrix()[(i, i)].re, spec.phi_prime(bi) * qi, epsilon = 1e-14);
        }
    }

    #[test]
    fn spectral_matches_finite_difference() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = random_state(4, 0.1, 0.9, 7).unwrap();
        let q = random_direction(4, 8).scale(0.1);
        let d = gateaux_derivative_spectral(&spec, &b, &q).unwrap();
        let h = 1e-5;
        let phi = |m: &HermitianMatrix| m.eigen().map(|x| spec.phi(x)).unwrap();
        let plus = phi(&b.hermitian().add(&q.scale(h)).unwrap());
        let minus = phi(&b.hermitian().sub(&q.scale(h)).unwrap());
        let fd = (plus.matrix() - minus.matrix()) / c(2.0 * h);
        let err = op_norm(&(fd - d.matrix()));
        assert!(err < 1e-8, "finite difference mismatch {err}");
    }

    #[test]
    fn degenerate_spectrum_uses_derivative() {
        let spec = PhiSpec::fermionic().unwrap();
        assert_abs_diff_eq!(divided_difference(&spec, 0.3, 0.3 + 1e-9), spec.phi_prime(0.3), epsilon = 1e-8);
        let b = StateOperator::from_real_diagonal(&[0.4, 0.4]).unwrap();
        let q = HermitianMatrix::from_real_rows(&[&[0.0, 0.1], &[0.1, 0.0]]).unwrap();
        let d = gateaux_derivative_spectral(&spec, &b, &q).unwrap();
        assert_abs_diff_eq!(d.matrix()[(0, 1)].re, spec.phi_prime(0.4) * 0.1, epsilon = 1e-15);
    }

    #[test]
    fn boundary_direction_must_vanish() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = StateOperator::from_real_diagonal(&[0.0, 0.5]).unwrap();
        let bad = HermitianMatrix::from_real_diagonal(&[0.3, 0.0]);
        assert!(matches!(
            gateaux_derivative_spectral(&spec, &b, &bad),
            Err(Error::SingularDirection { .. })
        ));
        let ok = HermitianMatrix::from_real_diagonal(&[0.0, 0.2]);
        let d = gateaux_derivative_spectral(&spec, &b, &ok).unwrap();
        assert_abs_diff_eq!(d.matrix()[(1, 1)].re, 0.0, epsilon = 1e-15); // φ'(1/2) = 0
    }

    #[test]
    fn resolvent_zero_direction() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = random_state(3, 0.2, 0.8, 3).unwrap();
        let d = gateaux_derivative_resolvent(&spec, &b, &HermitianMatrix::zeros(3), 1e-8).unwrap();
        assert_eq!(op_norm(d.matrix()), 0.0);
    }

    #[test]
    fn resolvent_scalar_case() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = StateOperator::from_real_diagonal(&[0.4]).unwrap();
        let q = HermitianMatrix::from_real_diagonal(&[0.2]);
        let d = gateaux_derivative_resolvent(&spec, &b, &q, 1e-10).unwrap();
        let expect = (0.4f64 / 0.6).ln() * 0.2;
        assert_abs_diff_eq!(expect, -0.0810930, epsilon = 1e-7);
        assert_abs_diff_eq!(d.matrix()[(0, 0)].re, expect, epsilon = 1e-9);
    }

    #[test]
    fn resolvent_matches_spectral() {
        for spec in [PhiSpec::fermionic(), PhiSpec::bosonic(), PhiSpec::power2(), PhiSpec::atom(-0.5)] {
            let spec = spec.unwrap();
            let b = random_state(3, 0.15, 0.85, 5).unwrap();
            let q = random_direction(3, 6);
            let r = gateaux_derivative_resolvent(&spec, &b, &q, 1e-6).unwrap();
            let s = gateaux_derivative_spectral(&spec, &b, &q).unwrap();
            let err = op_norm(&(r.matrix() - s.matrix()));
            assert!(err < 1e-5, "{}: {err}", spec.name);
        }
    }
}
