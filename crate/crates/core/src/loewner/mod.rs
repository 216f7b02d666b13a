//! Convex functions φ on `[0, 1]` whose derivative is operator monotone,
//! described through the integral representation
//!
//! ```text
//! φ'(x) = a + b ∫ (2x-1) / (1 - λ(2x-1)) dμ(λ)
//! φ(x)  = a x + c - (b/2) ∫ [ (2x-1)/λ + ln(1 + λ(1-2x)) / λ² ] dμ(λ)
//! ```
//!
//! with μ a probability measure on `[-1, 1]`.

mod builtin;
mod diagnostics;
mod file;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use diagnostics::{check_rep_consistency, integrability_diagnostics, EndpointIntegral, IntegrabilityReport, RepConsistencyReport, DIVERGENCE_THRESHOLD};
pub use file::PhiSpecFile;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate_measure, integrate_panels, QuadratureResult};

/// Tolerance on the total mass of a [`LoewnerMeasure`].
pub const MASS_TOL: f64 = 1e-10;
/// Below this |λ| the primitive's bracket is replaced by its Taylor series.
pub const SMALL_LAMBDA: f64 = 1e-4;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

#[derive(Clone)]
enum DensityKind {
    Uniform { height: f64 },
    Custom { f: ScalarFn },
}

/// A density piece of μ supported on `[lower, upper]`.
#[derive(Clone)]
pub struct Density {
    lower: f64,
    upper: f64,
    kind: DensityKind,
    /// Power-law exponent of the density at its endpoints; negative values
    /// request deeper initial grading.
    endpoint_exponent: f64,
}

impl Density {
    pub fn uniform(lower: f64, upper: f64, height: f64) -> Self {
        Self { lower, upper, kind: DensityKind::Uniform { height }, endpoint_exponent: 0.0 }
    }

    pub fn custom<F>(lower: f64, upper: f64, f: F, endpoint_exponent: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { lower, upper, kind: DensityKind::Custom { f: Arc::new(f) }, endpoint_exponent }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn endpoint_exponent(&self) -> f64 {
        self.endpoint_exponent
    }

    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::Uniform { height } => *height,
            DensityKind::Custom { f } => f(x),
        }
    }

    /// `Some(height)` for uniform pieces.
    pub fn uniform_height(&self) -> Option<f64> {
        match self.kind {
            DensityKind::Uniform { height } => Some(height),
            DensityKind::Custom { .. } => None,
        }
    }

    pub fn mass(&self) -> Result<f64> {
        match &self.kind {
            DensityKind::Uniform { height } => Ok(height * (self.upper - self.lower)),
            DensityKind::Custom { f } => {
                let pts = crate::quad::graded_breakpoints(self.lower, self.upper, true, true, 12);
                Ok(integrate_panels(|x| Ok(f(x)), &pts, 1e-13, crate::quad::DEFAULT_MAX_DEPTH)?.value)
            }
        }
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Density");
        d.field("lower", &self.lower).field("upper", &self.upper);
        match self.kind {
            DensityKind::Uniform { height } => d.field("uniform", &height),
            DensityKind::Custom { .. } => d.field("custom", &self.endpoint_exponent),
        };
        d.finish()
    }
}

/// Probability measure on `[-1, 1]` made of atoms and density pieces.
#[derive(Clone, Debug)]
pub struct LoewnerMeasure {
    atoms: Vec<Atom>,
    densities: Vec<Density>,
}

impl LoewnerMeasure {
    pub fn new(atoms: Vec<Atom>, densities: Vec<Density>) -> Result<Self> {
        for a in &atoms {
            if !(-1.0 < a.location && a.location < 1.0) {
                return Err(Error::InvalidArgument(format!("atom at {} must lie in (-1, 1)", a.location)));
            }
            if !(a.weight > 0.0) {
                return Err(Error::InvalidArgument(format!("atom weight {} must be positive", a.weight)));
            }
        }
        for d in &densities {
            if !(-1.0 <= d.lower && d.lower < d.upper && d.upper <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "density interval [{}, {}] not inside [-1, 1]",
                    d.lower, d.upper
                )));
            }
            if let Some(h) = d.uniform_height() {
                if !(h > 0.0) {
                    return Err(Error::InvalidArgument(format!("density height {h} must be positive")));
                }
            }
        }
        let m = Self { atoms, densities };
        let mass = m.total_mass()?;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidArgument(format!("total mass {mass} differs from 1")));
        }
        Ok(m)
    }

    /// Unit point mass at `location`.
    pub fn dirac(location: f64) -> Result<Self> {
        Self::new(vec![Atom { location, weight: 1.0 }], vec![])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn total_mass(&self) -> Result<f64> {
        let mut mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        for d in &self.densities {
            mass += d.mass()?;
        }
        Ok(mass)
    }
}

/// A convex φ together with its derivative and the representation data
/// `(a, b, c, μ)`.
#[derive(Clone)]
pub struct PhiSpec {
    pub name: String,
    phi: ScalarFn,
    phi_prime: ScalarFn,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub measure: LoewnerMeasure,
    pub discontinuous_at_zero: bool,
    pub discontinuous_at_one: bool,
    pub operator_monotone_derivative: bool,
}

impl fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiSpec")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("measure", &self.measure)
            .field("discontinuous_at_zero", &self.discontinuous_at_zero)
            .field("discontinuous_at_one", &self.discontinuous_at_one)
            .field("operator_monotone_derivative", &self.operator_monotone_derivative)
            .finish()
    }
}

/// Construction parameters for [`PhiSpec::new`].
pub struct PhiParts {
    pub name: String,
    pub phi: ScalarFn,
    pub phi_prime: ScalarFn,
    pub a: f64,
    pub b: f64,
    pub measure: LoewnerMeasure,
    pub discontinuous_at_zero: bool,
    pub discontinuous_at_one: bool,
    pub operator_monotone_derivative: bool,
}

impl PhiSpec {
    /// Builds a spec; the primitive constant is pinned as `c = φ(1/2) - a/2`,
    /// where the λ-integral of the primitive vanishes.
    pub fn new(parts: PhiParts) -> Result<Self> {
        if !(parts.b >= 0.0) {
            return Err(Error::InvalidArgument(format!("b must be >= 0, got {}", parts.b)));
        }
        if !parts.a.is_finite() || !parts.b.is_finite() {
            return Err(Error::InvalidArgument("a and b must be finite".into()));
        }
        let c = (parts.phi)(0.5) - parts.a / 2.0;
        Ok(Self {
            name: parts.name,
            phi: parts.phi,
            phi_prime: parts.phi_prime,
            a: parts.a,
            b: parts.b,
            c,
            measure: parts.measure,
            discontinuous_at_zero: parts.discontinuous_at_zero,
            discontinuous_at_one: parts.discontinuous_at_one,
            operator_monotone_derivative: parts.operator_monotone_derivative,
        })
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        (self.phi_prime)(x)
    }

    pub fn phi_fn(&self) -> ScalarFn {
        self.phi.clone()
    }

    pub fn phi_prime_fn(&self) -> ScalarFn {
        self.phi_prime.clone()
    }

    /// Whether φ' is discontinuous at the boundary value `boundary` (0 or 1).
    pub fn flags_boundary(&self, boundary: f64) -> bool {
        (boundary == 0.0 && self.discontinuous_at_zero) || (boundary == 1.0 && self.discontinuous_at_one)
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { eigenvalue: x });
        }
        if (x == 0.0 && self.discontinuous_at_zero) || (x == 1.0 && self.discontinuous_at_one) {
            return Err(Error::Domain { eigenvalue: x });
        }
        Ok(())
    }

    /// φ'(x) from the measure, with the quadrature error estimate.
    pub fn eval_phi_prime_rep_detailed(&self, x: f64, tol: f64) -> Result<QuadratureResult> {
        self.check_point(x)?;
        let s = 2.0 * x - 1.0;
        let r = integrate_measure(|l| Ok(s / (1.0 - l * s)), &self.measure, tol / self.b.max(1.0))?;
        Ok(QuadratureResult {
            value: self.a + self.b * r.value,
            error_estimate: self.b * r.error_estimate,
            evaluations: r.evaluations,
        })
    }

    pub fn eval_phi_prime_rep(&self, x: f64, tol: f64) -> Result<f64> {
        Ok(self.eval_phi_prime_rep_detailed(x, tol)?.value)
    }

    /// φ(x) from the measure via the primitive of the representation.
    pub fn eval_phi_rep(&self, x: f64, tol: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { eigenvalue: x });
        }
        let s = 2.0 * x - 1.0;
        let r = integrate_measure(|l| Ok(primitive_bracket(l, s)), &self.measure, 2.0 * tol / self.b.max(1.0))?;
        Ok(self.a * x + self.c - 0.5 * self.b * r.value)
    }
}

/// `s/λ + ln(1 - λ s)/λ²`, the λ-integrand of the primitive; `s = 2x - 1`.
pub(crate) fn primitive_bracket(lambda: f64, s: f64) -> f64 {
    if lambda.abs() < SMALL_LAMBDA {
        -0.5 * s * s * (1.0 + 2.0 * lambda * s / 3.0 + 0.5 * lambda * lambda * s * s)
    } else {
        s / lambda + (-lambda * s).ln_1p() / (lambda * lambda)
    }
}
