//! Random contraction trials of `H(XAX*, XBX*) <= H(A,B)`.
//!
//! Trial `k` of a run with master seed `s` draws everything from
//! `ChaCha8Rng::seed_from_u64(s)` on stream `k`, so a trial can be replayed
//! alone and batches may run in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{DenseMatrix, TableRow};
use crate::entropy::{relative_entropy_direct, EntropyValue};
use crate::error::{Error, Result};
use crate::hermitian::{c, haar_unitary, random_contraction_with, random_state_with, CMatrix, Contraction, HermitianMatrix, MatrixFile, StateOperator};
use crate::loewner::PhiSpec;

/// Trials evaluated between checks for an early stop.
const BATCH: usize = 1024;

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub full: EntropyValue,
    pub compressed: EntropyValue,
    /// `H(XAX*, XBX*) - H(A,B)`; positive means a violation.
    pub excess: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: u64,
    pub trial: usize,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub spec: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    /// Largest excess over all trials, floored at 0.
    pub max_violation: f64,
    pub records: Vec<TrialRecord>,
}

impl TrialReport {
    fn from_records(spec: &PhiSpec, seed: u64, tolerance: f64, records: Vec<TrialRecord>) -> Self {
        let violations = records
            .iter()
            .filter(|r| r.excess > tolerance)
            .map(|r| Violation { seed, trial: r.trial, magnitude: r.excess })
            .collect();
        let max_violation = records.iter().map(|r| r.excess).fold(0.0, f64::max);
        Self { spec: spec.name.clone(), seed, trials: records.len(), tolerance, violations, max_violation, records }
    }

    pub fn rows(&self) -> Vec<TableRow> {
        self.records.iter().map(|r| TableRow::with_number(r.trial, r.excess)).collect()
    }
}

/// `(H(A,B), H(XAX*, XBX*), excess)`.
pub fn monotonicity_excess(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, x: &Contraction) -> Result<(EntropyValue, EntropyValue, f64)> {
    let full = relative_entropy_direct(spec, a, b)?;
    let compressed = relative_entropy_direct(spec, &a.compress(x)?, &b.compress(x)?)?;
    let excess = match (full, compressed) {
        (EntropyValue::Finite(f), EntropyValue::Finite(g)) => g - f,
        (EntropyValue::Finite(_), EntropyValue::PlusInfinity(_)) => f64::INFINITY,
        (EntropyValue::PlusInfinity(_), _) => f64::NEG_INFINITY,
    };
    Ok((full, compressed, excess))
}

/// Draws `trials` interior pairs `A, B` on `C^dim_a` and Gaussian
/// contractions `C^dim_a -> C^dim_b`, recording every excess above `tol`.
pub fn monotonicity_trials(spec: &PhiSpec, dim_a: usize, dim_b: usize, trials: usize, seed: u64, tol: f64) -> Result<TrialReport> {
    if !spec.operator_monotone_derivative {
        return Err(Error::InvalidArgument(format!("{}: derivative is not operator monotone", spec.name)));
    }
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::InvalidArgument(format!("dimensions {dim_a} -> {dim_b}")));
    }
    let records = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k);
            let a = random_state_with(dim_a, 0.05, 0.95, &mut rng)?;
            let b = random_state_with(dim_a, 0.05, 0.95, &mut rng)?;
            let x = random_contraction_with(dim_b, dim_a, &mut rng)?;
            let (full, compressed, excess) = monotonicity_excess(spec, &a, &b, &x)?;
            Ok(TrialRecord { trial: k, full, compressed, excess })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::from_records(spec, seed, tol, records))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Dimensions cycled through by trial index.
    pub dims: Vec<usize>,
    /// Smallest excess accepted as a witness.
    pub threshold: f64,
    pub spectrum: (f64, f64),
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { dims: vec![2, 3], threshold: 1e-6, spectrum: (0.05, 0.95) }
    }
}

/// A frozen counterexample to monotonicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub spec: String,
    pub seed: u64,
    pub trial: usize,
    pub a: MatrixFile,
    pub b: MatrixFile,
    pub x: DenseMatrix,
    pub full: f64,
    pub compressed: f64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub report: TrialReport,
    pub witness: Option<Witness>,
    /// No violation above the threshold within the trial budget.
    pub inconclusive: bool,
}

/// Contraction biased toward low rank: a Haar frame on each side with
/// singular values drawn so that about half of them vanish.
fn biased_contraction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Contraction> {
    let kind = rng.random_range(0..3u8);
    if kind == 0 {
        return random_contraction_with(n, n, rng);
    }
    let u = haar_unitary(n, rng);
    let v = haar_unitary(n, rng);
    let rank = if kind == 1 { 1 } else { rng.random_range(1..n.max(2)) };
    let mut s = CMatrix::zeros(n, n);
    for i in 0..rank.min(n) {
        s[(i, i)] = c(rng.random_range(0.5..1.0) * (1.0 - 4.0 * f64::EPSILON));
    }
    Contraction::new(u * s * v.adjoint())
}

/// Searches for `H(XAX*, XBX*) > H(A,B) + threshold`, stopping at the first
/// trial (by index) that exceeds it.
pub fn counterexample_search(spec: &PhiSpec, trials: usize, seed: u64, opts: &SearchOptions) -> Result<SearchReport> {
    if opts.dims.is_empty() || opts.dims.contains(&0) {
        return Err(Error::InvalidArgument("search dimensions must be positive".into()));
    }
    let (lo, hi) = opts.spectrum;
    let run = |k: usize| -> Result<(TrialRecord, Option<Witness>)> {
        let mut rng = trial_rng(seed, k);
        let n = opts.dims[k % opts.dims.len()];
        let a = random_state_with(n, lo, hi, &mut rng)?;
        let b = random_state_with(n, lo, hi, &mut rng)?;
        let x = biased_contraction(n, &mut rng)?;
        let (full, compressed, excess) = monotonicity_excess(spec, &a, &b, &x)?;
        let witness = (excess > opts.threshold).then(|| Witness {
            spec: spec.name.clone(),
            seed,
            trial: k,
            a: MatrixFile::from_matrix(a.matrix()),
            b: MatrixFile::from_matrix(b.matrix()),
            x: DenseMatrix::from_matrix(x.matrix()),
            full: full.as_f64(),
            compressed: compressed.as_f64(),
            magnitude: excess,
        });
        Ok((TrialRecord { trial: k, full, compressed, excess }, witness))
    };
    let mut records = Vec::new();
    let mut witness = None;
    let mut start = 0;
    while start < trials && witness.is_none() {
        let end = (start + BATCH).min(trials);
        let batch = (start..end).into_par_iter().map(run).collect::<Result<Vec<_>>>()?;
        for (record, w) in batch {
            records.push(record);
            if w.is_some() {
                witness = w;
                break;
            }
        }
        start = end;
    }
    let report = TrialReport::from_records(spec, seed, opts.threshold, records);
    Ok(SearchReport { inconclusive: witness.is_none(), report, witness })
}

/// Recomputes the excess of a frozen witness.
pub fn replay_witness(spec: &PhiSpec, w: &Witness) -> Result<f64> {
    let a = StateOperator::new(HermitianMatrix::new(w.a.to_matrix()?)?)?;
    let b = StateOperator::new(HermitianMatrix::new(w.b.to_matrix()?)?)?;
    let x = Contraction::new(w.x.to_matrix()?)?;
    Ok(monotonicity_excess(spec, &a, &b, &x)?.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_compression_is_equality() {
        let spec = PhiSpec::fermionic().unwrap();
        for k in 0..20 {
            let mut rng = trial_rng(5, k);
            let a = random_state_with(4, 0.05, 0.95, &mut rng).unwrap();
            let b = random_state_with(4, 0.05, 0.95, &mut rng).unwrap();
            let (_, _, excess) = monotonicity_excess(&spec, &a, &b, &Contraction::identity(4)).unwrap();
            assert!(excess.abs() <= 1e-10);
        }
    }

    #[test]
    fn small_fermionic_run_has_no_violation() {
        let spec = PhiSpec::fermionic().unwrap();
        let r = monotonicity_trials(&spec, 4, 3, 50, 1, 1e-9).unwrap();
        assert_eq!(r.trials, 50);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.max_violation <= 1e-9);
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = PhiSpec::bosonic().unwrap();
        let r1 = monotonicity_trials(&spec, 3, 2, 30, 7, 1e-9).unwrap();
        let r2 = monotonicity_trials(&spec, 3, 2, 30, 7, 1e-9).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn non_monotone_spec_is_rejected() {
        let spec = PhiSpec::quartic().unwrap();
        assert!(monotonicity_trials(&spec, 2, 2, 10, 1, 1e-9).is_err());
    }

    #[test]
    fn power2_control_has_no_witness() {
        let spec = PhiSpec::power2().unwrap();
        let r = counterexample_search(&spec, 2000, 3, &SearchOptions::default()).unwrap();
        assert!(r.inconclusive);
        assert!(r.report.violations.is_empty());
    }
}
