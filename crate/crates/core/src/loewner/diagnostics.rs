use serde::{Serialize, Serializer};

use super::{LoewnerMeasure, PhiSpec};
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, DEFAULT_MAX_DEPTH};

/// Partial sums above this value are reported as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Number of trailing dyadic panels whose increments must be non-decreasing
/// for the endpoint integral to be declared divergent.
const DIVERGENCE_WINDOW: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepConsistencyReport {
    pub name: String,
    pub grid_size: usize,
    pub tol: f64,
    /// max |φ'_rep - φ'| over the grid
    pub max_dev_phi_prime: f64,
    /// max |φ_rep - φ| over the grid
    pub max_dev_phi: f64,
    pub worst_x: f64,
    pub pass: bool,
}

/// Chebyshev points on `[0.02, 0.98]`.
pub fn chebyshev_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (0.02, 0.98);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..n)
        .map(|k| mid - half * (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

/// Compares both integral representations against the closed-form φ and φ'
/// on a Chebyshev grid.
pub fn check_rep_consistency(spec: &PhiSpec, grid_size: usize, tol: f64) -> Result<RepConsistencyReport> {
    if !spec.operator_monotone_derivative {
        return Err(Error::InvalidArgument(format!("{} has no operator monotone derivative", spec.name)));
    }
    if grid_size == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument("grid size and tolerance must be positive".into()));
    }
    let quad_tol = (tol * 1e-2).max(1e-13);
    let mut report = RepConsistencyReport {
        name: spec.name.clone(),
        grid_size,
        tol,
        max_dev_phi_prime: 0.0,
        max_dev_phi: 0.0,
        worst_x: f64::NAN,
        pass: false,
    };
    let mut worst = -1.0;
    for x in chebyshev_grid(grid_size) {
        let dp = (spec.eval_phi_prime_rep(x, quad_tol)? - spec.phi_prime(x)).abs();
        let d = (spec.eval_phi_rep(x, quad_tol)? - spec.phi(x)).abs();
        report.max_dev_phi_prime = report.max_dev_phi_prime.max(dp);
        report.max_dev_phi = report.max_dev_phi.max(d);
        if dp.max(d) > worst {
            worst = dp.max(d);
            report.worst_x = x;
        }
    }
    report.pass = report.max_dev_phi_prime <= tol && report.max_dev_phi <= tol;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndpointIntegral {
    Finite(f64),
    Divergent,
}

impl EndpointIntegral {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Self::Divergent)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Divergent => None,
        }
    }
}

impl Serialize for EndpointIntegral {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Endpoint integrals of μ near ±1:
/// `∫_{1/2}^1 -ln(1-λ) dμ`, `∫_{-1}^{-1/2} -ln(1+λ) dμ` and the same with
/// `(1∓λ)^{-1}`. Log integrals stay finite for continuous φ; the inverse
/// ones diverge exactly where φ' is discontinuous.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub log_integral_upper: EndpointIntegral,
    pub log_integral_lower: EndpointIntegral,
    pub inverse_integral_upper: EndpointIntegral,
    pub inverse_integral_lower: EndpointIntegral,
}

pub fn integrability_diagnostics(spec: &PhiSpec) -> Result<IntegrabilityReport> {
    let m = &spec.measure;
    let log = |d: f64| -d.ln();
    let inv = |d: f64| 1.0 / d;
    Ok(IntegrabilityReport {
        log_integral_upper: endpoint_integral(m, true, log)?,
        log_integral_lower: endpoint_integral(m, false, log)?,
        inverse_integral_upper: endpoint_integral(m, true, inv)?,
        inverse_integral_lower: endpoint_integral(m, false, inv)?,
    })
}

/// Integrates `kernel(distance to endpoint)` over `[1/2, 1]` (upper) or
/// `[-1, -1/2]` (lower) panel by panel, each panel halving the distance.
fn endpoint_integral<K: Fn(f64) -> f64>(m: &LoewnerMeasure, upper: bool, kernel: K) -> Result<EndpointIntegral> {
    let mut total = 0.0;
    for a in m.atoms() {
        let inside = if upper { a.location >= 0.5 } else { a.location <= -0.5 };
        if inside {
            total += a.weight * kernel(if upper { 1.0 - a.location } else { 1.0 + a.location });
        }
    }
    for d in m.densities() {
        let mut increments = Vec::new();
        for k in 1..=DEFAULT_MAX_DEPTH as i32 {
            // panel at distance [2^{-k-1}, 2^{-k}] from the endpoint
            let (near, far) = (0.5f64.powi(k + 1), 0.5f64.powi(k));
            // Integrate in the distance u = 1 ∓ λ: nodes then keep full
            // relative precision however close the panel is to the endpoint.
            let (u_min, u_max) = if upper { (1.0 - d.upper(), 1.0 - d.lower()) } else { (1.0 + d.lower(), 1.0 + d.upper()) };
            let (lo, hi) = (near.max(u_min), far.min(u_max));
            let at = |u: f64| if upper { 1.0 - u } else { u - 1.0 };
            let inc = if lo < hi {
                // The panel spans a fixed ratio of distances, so the
                // integrand is smooth on it and a shallow rule suffices.
                match integrate_panels(|u| Ok(kernel(u) * d.density(at(u))), &[lo, hi], 1e-15 * hi, 4) {
                    Ok(r) => r.value,
                    Err(Error::Accuracy { estimate, .. }) => estimate,
                    Err(e) => return Err(e),
                }
            } else {
                0.0
            };
            total += inc;
            increments.push(inc);
            if total > DIVERGENCE_THRESHOLD {
                return Ok(EndpointIntegral::Divergent);
            }
        }
        let reaches_endpoint = if upper { d.upper() >= 1.0 } else { d.lower() <= -1.0 };
        let tail = &increments[increments.len() - DIVERGENCE_WINDOW..];
        let non_decreasing = tail[0] > 0.0 && tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-6));
        if reaches_endpoint && non_decreasing {
            return Ok(EndpointIntegral::Divergent);
        }
    }
    Ok(EndpointIntegral::Finite(total))
}
