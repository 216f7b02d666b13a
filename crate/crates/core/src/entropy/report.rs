//! All formulas on one pair, with their mutual agreement.

use serde::Serialize;

use super::{
    classify_singular_case, klein_ratio, relative_entropy_direct_with, relative_entropy_gateaux_with,
    relative_entropy_integral_observed, theorem4_check_with, EntropyOptions, EntropyValue, KleinRatio, SingularCase,
    Theorem4Report,
};
use crate::error::Result;
use crate::hermitian::StateOperator;
use crate::loewner::PhiSpec;

/// Largest accepted `|direct - gateaux|`.
pub const GATEAUX_AGREEMENT: f64 = 1e-9;
/// Relative part of the accepted `|direct - integral|`.
pub const INTEGRAL_RELATIVE_AGREEMENT: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaReport {
    pub dim: usize,
    pub case: SingularCase,
    pub direct: EntropyValue,
    pub gateaux: EntropyValue,
    pub integral: EntropyValue,
    /// `None` when the pair has a kernel mismatch.
    pub theorem4: Option<Theorem4Report>,
    pub klein_ratio: KleinRatio,
    /// `None` when the values are not both finite.
    pub direct_gateaux_gap: Option<f64>,
    pub direct_integral_gap: Option<f64>,
    /// `max(1e-4 |direct|, 10 tol_lambda)`.
    pub integral_tolerance: f64,
    pub agree: bool,
}

fn gap(x: &EntropyValue, y: &EntropyValue) -> Option<f64> {
    Some((x.value()? - y.value()?).abs())
}

/// Evaluates the three entropy formulas, the trace identity and the Klein
/// ratio, and checks that finite values agree within the documented
/// tolerances and that infinities coincide with the same reason.
pub fn evaluate_all(spec: &PhiSpec, a: &StateOperator, b: &StateOperator, opts: &EntropyOptions) -> Result<FormulaReport> {
    let case = classify_singular_case(spec, a, b, opts)?;
    let direct = relative_entropy_direct_with(spec, a, b, opts)?;
    let gateaux = relative_entropy_gateaux_with(spec, a, b, opts)?;
    let integral = relative_entropy_integral_observed(spec, a, b, opts.quad(), opts, &mut |_| {})?;
    let theorem4 = if case.mismatch_reason().is_some() { None } else { Some(theorem4_check_with(spec, a, b, opts)?) };
    let ratio = klein_ratio(spec, a, b)?;
    let integral_tolerance = (INTEGRAL_RELATIVE_AGREEMENT * direct.value().unwrap_or(0.0).abs()).max(10.0 * opts.tol_lambda);
    let (dg, di) = (gap(&direct, &gateaux), gap(&direct, &integral));
    let agree = match (direct, gateaux, integral) {
        (EntropyValue::PlusInfinity(r), EntropyValue::PlusInfinity(s), EntropyValue::PlusInfinity(t)) => r == s && s == t,
        _ => dg.is_some_and(|g| g <= GATEAUX_AGREEMENT) && di.is_some_and(|g| g <= integral_tolerance),
    };
    Ok(FormulaReport {
        dim: a.dim(),
        case,
        direct,
        gateaux,
        integral,
        theorem4,
        klein_ratio: ratio,
        direct_gateaux_gap: dg,
        direct_integral_gap: di,
        integral_tolerance,
        agree,
    })
}
