//! Constructed pairs where B has an exact eigenvalue at 0 or 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{projection_sweep, ConvergenceTrace, SWEEP_TOL};
use crate::entropy::{
    classify_singular_case, relative_entropy_direct, relative_entropy_gateaux, relative_entropy_integral, EntropyOptions,
    EntropyValue, QuadTolerances, SingularCase,
};
use crate::error::{Error, Result};
use crate::hermitian::{haar_unitary, random_state_with, CMatrix, HermitianMatrix, ProjectionChain, SpectralDecomposition, StateOperator};
use crate::loewner::PhiSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeMode {
    MismatchAtZero,
    AgreementAtZero,
    MismatchAtOne,
    AgreementAtOne,
}

impl ProbeMode {
    pub const ALL: [ProbeMode; 4] = [Self::MismatchAtZero, Self::AgreementAtZero, Self::MismatchAtOne, Self::AgreementAtOne];

    pub fn boundary(self) -> f64 {
        match self {
            Self::MismatchAtZero | Self::AgreementAtZero => 0.0,
            Self::MismatchAtOne | Self::AgreementAtOne => 1.0,
        }
    }

    pub fn is_mismatch(self) -> bool {
        matches!(self, Self::MismatchAtZero | Self::MismatchAtOne)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularProbeReport {
    pub spec: String,
    pub mode: ProbeMode,
    pub dim: usize,
    pub seed: u64,
    pub case: SingularCase,
    pub direct: EntropyValue,
    pub gateaux: EntropyValue,
    pub integral: EntropyValue,
    /// Entropy of the blocks off the boundary eigenvector, evaluated
    /// directly (agreement modes only).
    pub complement_value: Option<EntropyValue>,
    /// Sweep along a chain whose first range is the boundary eigenvector.
    pub sweep: ConvergenceTrace,
    pub expect_infinite: bool,
    pub consistent: bool,
}

/// `B = U (β₀ ⊕ B') U*` with `β₀` the mode's boundary value. In mismatch
/// modes A is an unrelated interior state; in agreement modes
/// `A = U (β₀ ⊕ A') U*`.
pub fn singular_probe(spec: &PhiSpec, mode: ProbeMode, dim: usize, seed: u64) -> Result<SingularProbeReport> {
    if dim == 0 {
        return Err(Error::InvalidArgument("probe dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(dim, &mut rng);
    let beta0 = mode.boundary();
    let rest = dim - 1;
    let b_rest = if rest > 0 { Some(random_state_with(rest, 0.1, 0.9, &mut rng)?) } else { None };
    let a_rest = if rest > 0 && !mode.is_mismatch() { Some(random_state_with(rest, 0.1, 0.9, &mut rng)?) } else { None };
    let embed = |block: Option<&StateOperator>| -> Result<StateOperator> {
        let mut m = CMatrix::zeros(dim, dim);
        m[(0, 0)] = crate::hermitian::c(beta0);
        if let Some(x) = block {
            m.view_mut((1, 1), (rest, rest)).copy_from(x.matrix());
        }
        StateOperator::new(HermitianMatrix::hermitize(&u * m * u.adjoint()))
    };
    let b = embed(b_rest.as_ref())?;
    let a = if mode.is_mismatch() {
        // A generic interior state; its overlap with the boundary vector
        // is nonzero with probability one.
        let spectral = SpectralDecomposition {
            eigenvalues: (0..dim).map(|i| 0.2 + 0.6 * (i as f64 + 0.5) / dim as f64).collect(),
            eigenvectors: haar_unitary(dim, &mut rng),
        };
        StateOperator::new(spectral.reconstruct())?
    } else {
        embed(a_rest.as_ref())?
    };

    let opts = EntropyOptions::default();
    let case = classify_singular_case(spec, &a, &b, &opts)?;
    let direct = relative_entropy_direct(spec, &a, &b)?;
    let gateaux = relative_entropy_gateaux(spec, &a, &b)?;
    let integral = relative_entropy_integral(spec, &a, &b, QuadTolerances::default())?;
    let complement_value = match (mode.is_mismatch(), &a_rest, &b_rest) {
        (true, _, _) => None,
        (false, Some(x), Some(y)) => Some(relative_entropy_direct(spec, x, y)?),
        (false, _, _) => Some(EntropyValue::Finite(0.0)),
    };
    let chain = ProjectionChain::from_frame(&u, &(1..=dim).collect::<Vec<_>>())?;
    let sweep = projection_sweep(spec, &a, &b, &chain)?;

    let expect_infinite = mode.is_mismatch() && spec.flags_boundary(beta0);
    let consistent = if expect_infinite {
        [direct, gateaux, integral].iter().all(|v| !v.is_finite()) && sweep.values.iter().all(|v| !v.is_finite())
    } else {
        let (d, g, i) = (direct.as_f64(), gateaux.as_f64(), integral.as_f64());
        let triangle = d.is_finite() && (d - g).abs() <= SWEEP_TOL && (d - i).abs() <= (1e-4 * d).max(1e-5);
        let complement = complement_value.is_none_or(|c| c.agrees_with(&direct, SWEEP_TOL));
        triangle && complement && sweep.values.iter().all(EntropyValue::is_finite)
    };
    Ok(SingularProbeReport {
        spec: spec.name.clone(),
        mode,
        dim,
        seed,
        case,
        direct,
        gateaux,
        integral,
        complement_value,
        expect_infinite,
        consistent: consistent && sweep.passed(),
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::InfinityReason;

    #[test]
    fn fermionic_mismatch_at_zero_is_infinite() {
        let spec = PhiSpec::fermionic().unwrap();
        let r = singular_probe(&spec, ProbeMode::MismatchAtZero, 3, 1).unwrap();
        assert_eq!(r.direct, EntropyValue::PlusInfinity(InfinityReason::KernelMismatchAtZero));
        assert!(r.consistent);
    }

    #[test]
    fn fermionic_agreement_equals_complement() {
        let spec = PhiSpec::fermionic().unwrap();
        let r = singular_probe(&spec, ProbeMode::AgreementAtZero, 3, 2).unwrap();
        assert!(r.direct.is_finite());
        assert!(r.consistent, "{r:?}");
    }

    #[test]
    fn power2_control_is_always_finite() {
        let spec = PhiSpec::power2().unwrap();
        for mode in ProbeMode::ALL {
            let r = singular_probe(&spec, mode, 3, 3).unwrap();
            assert!(r.direct.is_finite() && r.consistent, "{mode:?}");
        }
    }
}
