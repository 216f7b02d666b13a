//! Desk-scale experiments: projection and compression sweeps, contraction
//! monotonicity trials, counterexample search and singular-case probes.

mod probe;
mod report;
mod trials;

pub use probe::{singular_probe, ProbeMode, SingularProbeReport};
pub use report::{DenseMatrix, TableRow};
pub use trials::{
    counterexample_search, monotonicity_excess, monotonicity_trials, replay_witness, SearchOptions, SearchReport,
    TrialRecord, TrialReport, Violation, Witness,
};

use serde::Serialize;

use crate::entropy::{relative_entropy_direct_with, relative_entropy_gateaux_with, EntropyOptions, EntropyValue};
use crate::error::{Error, Result};
use crate::hermitian::{check_dims, Contraction, ProjectionChain, StateOperator};
use crate::loewner::PhiSpec;

/// Tolerance on monotone nondecrease and on the final rank matching the limit.
pub const SWEEP_TOL: f64 = 1e-9;

/// Entropies of `P_k A P_k, P_k B P_k` along a projection chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub ranks: Vec<usize>,
    pub values: Vec<EntropyValue>,
    /// Gâteaux-form entropy of the full pair.
    pub limit_value: EntropyValue,
    /// Largest drop `values[k-1] - values[k]` (finite values; infinity
    /// followed by a finite value counts as an infinite drop).
    pub max_decrease: f64,
    pub monotone: bool,
    /// `|values.last - limit_value|` when the last rank is the full dimension.
    pub final_gap: Option<f64>,
    pub limit_matches: Option<bool>,
}

impl ConvergenceTrace {
    fn build(ranks: Vec<usize>, values: Vec<EntropyValue>, limit_value: EntropyValue, full_dim: usize) -> Self {
        let mut max_decrease: f64 = 0.0;
        for w in values.windows(2) {
            let drop = match (w[0], w[1]) {
                (EntropyValue::Finite(x), EntropyValue::Finite(y)) => x - y,
                (EntropyValue::PlusInfinity(_), EntropyValue::Finite(_)) => f64::INFINITY,
                _ => 0.0,
            };
            max_decrease = max_decrease.max(drop);
        }
        let (final_gap, limit_matches) = match (ranks.last(), values.last()) {
            (Some(&r), Some(last)) if r == full_dim => {
                let gap = match (last, &limit_value) {
                    (EntropyValue::Finite(x), EntropyValue::Finite(y)) => (x - y).abs(),
                    (EntropyValue::PlusInfinity(_), EntropyValue::PlusInfinity(_)) => 0.0,
                    _ => f64::INFINITY,
                };
                (Some(gap), Some(gap <= SWEEP_TOL))
            }
            _ => (None, None),
        };
        Self { ranks, values, limit_value, max_decrease, monotone: max_decrease <= SWEEP_TOL, final_gap, limit_matches }
    }

    /// Monotone, and matching the limit if the chain reaches full rank.
    pub fn passed(&self) -> bool {
        self.monotone && self.limit_matches.unwrap_or(true)
    }

    pub fn rows(&self) -> Vec<TableRow> {
        self.ranks.iter().zip(&self.values).map(|(&r, v)| TableRow::new(r, v)).collect()
    }
}

/// Evaluates the entropy on each range of the chain.
pub fn projection_sweep(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, chain: &ProjectionChain) -> Result<ConvergenceTrace> {
    projection_sweep_with(spec, a, b, chain, &EntropyOptions::default())
}

pub fn projection_sweep_with(
    spec: &PhiSpec,
    a: &StateOperator,
    b: &StateOperator,
    chain: &ProjectionChain,
    opts: &EntropyOptions,
) -> Result<ConvergenceTrace> {
    check_dims(a.dim(), b.dim())?;
    check_dims(a.dim(), chain.ambient_dim())?;
    let values = chain
        .projectors()
        .iter()
        .map(|p| relative_entropy_direct_with(spec, &a.restrict(p)?, &b.restrict(p)?, opts))
        .collect::<Result<Vec<_>>>()?;
    let limit = relative_entropy_gateaux_with(spec, a, b, opts)?;
    Ok(ConvergenceTrace::build(chain.ranks().to_vec(), values, limit, a.dim()))
}

/// Entropies of `X_n A X_n*, X_n B X_n*` for a list of contractions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompressionTrace {
    pub target_dims: Vec<usize>,
    pub sigma_min: Vec<f64>,
    pub values: Vec<EntropyValue>,
    pub limit_value: EntropyValue,
    /// `max(1e-6, 10 (1 - σ_min))` for the last contraction.
    pub final_tolerance: f64,
    pub final_gap: f64,
    pub converged: bool,
}

impl CompressionTrace {
    pub fn rows(&self) -> Vec<TableRow> {
        self.values.iter().enumerate().map(|(i, v)| TableRow::new(i + 1, v)).collect()
    }
}

pub fn compression_sweep(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, contractions: &[Contraction]) -> Result<CompressionTrace> {
    check_dims(a.dim(), b.dim())?;
    let last = contractions
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty contraction list".into()))?;
    let opts = EntropyOptions::default();
    let mut values = Vec::with_capacity(contractions.len());
    for x in contractions {
        check_dims(a.dim(), x.cols())?;
        values.push(relative_entropy_direct_with(spec, &a.compress(x)?, &b.compress(x)?, &opts)?);
    }
    let limit_value = relative_entropy_direct_with(spec, a, b, &opts)?;
    let sigma_min: Vec<f64> = contractions.iter().map(Contraction::sigma_min).collect();
    let final_tolerance = (10.0 * (1.0 - last.sigma_min())).max(1e-6);
    let final_gap = match (values.last(), &limit_value) {
        (Some(EntropyValue::Finite(x)), EntropyValue::Finite(y)) => (x - y).abs(),
        (Some(EntropyValue::PlusInfinity(_)), EntropyValue::PlusInfinity(_)) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(CompressionTrace {
        target_dims: contractions.iter().map(Contraction::rows).collect(),
        sigma_min,
        values,
        limit_value,
        final_tolerance,
        final_gap,
        converged: final_gap <= final_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{haar_unitary, random_state, HermitianMatrix};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn pair(n: usize, seed: u64) -> (StateOperator, StateOperator) {
        (random_state(n, 0.1, 0.9, seed).unwrap(), random_state(n, 0.1, 0.9, seed + 1).unwrap())
    }

    #[test]
    fn identity_chain_is_constant() {
        let spec = PhiSpec::fermionic().unwrap();
        let (a, b) = pair(4, 1);
        let chain = ProjectionChain::new(vec![HermitianMatrix::identity(4)]).unwrap();
        let t = projection_sweep(&spec, &a, &b, &chain).unwrap();
        let h = relative_entropy_direct_with(&spec, &a, &b, &EntropyOptions::default()).unwrap().as_f64();
        assert_abs_diff_eq!(t.values[0].as_f64(), h, epsilon = 1e-12);
        assert!(t.passed());
    }

    #[test]
    fn prefix_sweep_is_monotone_and_converges() {
        let spec = PhiSpec::fermionic().unwrap();
        let (a, b) = pair(8, 3);
        for chain in [
            ProjectionChain::prefix(8, &(1..=8).collect::<Vec<_>>()).unwrap(),
            ProjectionChain::random_nested(8, &[2, 5, 8], 9).unwrap(),
        ] {
            let t = projection_sweep(&spec, &a, &b, &chain).unwrap();
            assert!(t.monotone, "{:?}", t.values);
            assert_eq!(t.limit_matches, Some(true));
        }
    }

    #[test]
    fn mismatch_kernel_in_first_range_is_infinite_throughout() {
        let spec = PhiSpec::fermionic().unwrap();
        let b = StateOperator::from_real_diagonal(&[0.0, 0.4, 0.6]).unwrap();
        let a = StateOperator::from_real_diagonal(&[0.2, 0.5, 0.5]).unwrap();
        let chain = ProjectionChain::prefix(3, &[1, 2, 3]).unwrap();
        let t = projection_sweep(&spec, &a, &b, &chain).unwrap();
        assert!(t.values.iter().all(|v| !v.is_finite()));
        assert!(t.passed());
    }

    #[test]
    fn scaled_identities_increase_toward_full_value() {
        let spec = PhiSpec::fermionic().unwrap();
        let (a, b) = pair(4, 5);
        let xs: Vec<_> = (1..=20).map(|n| Contraction::scaled_identity(4, 1.0 - 0.5f64.powi(n)).unwrap()).collect();
        let t = compression_sweep(&spec, &a, &b, &xs).unwrap();
        for w in t.values.windows(2) {
            assert!(w[1].as_f64() >= w[0].as_f64() - 1e-12);
        }
        assert!(t.converged, "gap {} tol {}", t.final_gap, t.final_tolerance);
    }

    #[test]
    fn coordinate_projections_reproduce_projection_sweep() {
        let spec = PhiSpec::bosonic().unwrap();
        let (a, b) = pair(5, 7);
        let xs: Vec<_> = (1..=5).map(|r| Contraction::coordinate_projection(r, 5).unwrap()).collect();
        let c = compression_sweep(&spec, &a, &b, &xs).unwrap();
        let p = projection_sweep(&spec, &a, &b, &ProjectionChain::prefix(5, &[1, 2, 3, 4, 5]).unwrap()).unwrap();
        for (x, y) in c.values.iter().zip(&p.values) {
            assert_abs_diff_eq!(x.as_f64(), y.as_f64(), epsilon = 1e-12);
        }
    }

    #[test]
    fn unitary_compression_preserves_entropy() {
        let spec = PhiSpec::fermionic().unwrap();
        let (a, b) = pair(4, 11);
        let u = haar_unitary(4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(12));
        let t = compression_sweep(&spec, &a, &b, &[Contraction::new(u).unwrap()]).unwrap();
        assert!(t.final_gap <= 1e-10);
    }
}
