use std::sync::Arc;

use super::{primitive_bracket, Atom, Density, LoewnerMeasure, PhiParts, PhiSpec};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &["fermionic", "bosonic", "power2", "atom(<λ>)", "quartic"];

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Looks up a built-in by name: `fermionic`, `bosonic`, `power2`,
/// `atom(λ0)` with `λ0 ∈ (-1, 1)`, or `quartic` (φ = x⁴/4, whose derivative
/// is *not* operator monotone; used as a counterexample control).
pub fn builtin(name: &str) -> Result<PhiSpec> {
    let name = name.trim();
    match name {
        "fermionic" => PhiSpec::fermionic(),
        "bosonic" => PhiSpec::bosonic(),
        "power2" => PhiSpec::power2(),
        "quartic" => PhiSpec::quartic(),
        _ => {
            if let Some(arg) = name.strip_prefix("atom(").and_then(|r| r.strip_suffix(')')) {
                let l: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse atom location {arg:?}")))?;
                PhiSpec::atom(l)
            } else {
                Err(Error::InvalidArgument(format!(
                    "unknown φ {name:?}; expected one of {}",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        }
    }
}

impl PhiSpec {
    /// φ(x) = x ln x + (1-x) ln(1-x); φ'(x) = ln(x/(1-x)).
    /// μ is uniform on `[-1, 1]`, a = 0, b = 2.
    pub fn fermionic() -> Result<Self> {
        Self::new(PhiParts {
            name: "fermionic".into(),
            phi: Arc::new(|x| xlogx(x) + xlogx(1.0 - x)),
            phi_prime: Arc::new(|x| x.ln() - (1.0 - x).ln()),
            a: 0.0,
            b: 2.0,
            measure: LoewnerMeasure::new(vec![], vec![Density::uniform(-1.0, 1.0, 0.5)])?,
            discontinuous_at_zero: true,
            discontinuous_at_one: true,
            operator_monotone_derivative: true,
        })
    }

    /// φ(x) = x ln x - (1+x) ln(1+x); φ'(x) = ln(x/(1+x)).
    /// μ has density 3/2 on `[-1, -1/3]`, a = -ln 3, b = 2/3.
    pub fn bosonic() -> Result<Self> {
        Self::new(PhiParts {
            name: "bosonic".into(),
            phi: Arc::new(|x| xlogx(x) - xlogx(1.0 + x)),
            phi_prime: Arc::new(|x| x.ln() - x.ln_1p()),
            a: -(3f64.ln()),
            b: 2.0 / 3.0,
            measure: LoewnerMeasure::new(vec![], vec![Density::uniform(-1.0, -1.0 / 3.0, 1.5)])?,
            discontinuous_at_zero: true,
            discontinuous_at_one: false,
            operator_monotone_derivative: true,
        })
    }

    /// φ(x) = x²; μ = δ₀, a = b = 1.
    pub fn power2() -> Result<Self> {
        Self::new(PhiParts {
            name: "power2".into(),
            phi: Arc::new(|x| x * x),
            phi_prime: Arc::new(|x| 2.0 * x),
            a: 1.0,
            b: 1.0,
            measure: LoewnerMeasure::dirac(0.0)?,
            discontinuous_at_zero: false,
            discontinuous_at_one: false,
            operator_monotone_derivative: true,
        })
    }

    /// Single-atom measure δ_{λ0}: φ'(x) = s/(1 - λ0 s) with s = 2x - 1.
    pub fn atom(lambda0: f64) -> Result<Self> {
        if !(-1.0 < lambda0 && lambda0 < 1.0) {
            return Err(Error::InvalidArgument(format!("atom location {lambda0} must lie in (-1, 1)")));
        }
        Self::new(PhiParts {
            name: format!("atom({lambda0})"),
            phi: Arc::new(move |x| -0.5 * primitive_bracket(lambda0, 2.0 * x - 1.0)),
            phi_prime: Arc::new(move |x| {
                let s = 2.0 * x - 1.0;
                s / (1.0 - lambda0 * s)
            }),
            a: 0.0,
            b: 1.0,
            measure: LoewnerMeasure::new(vec![Atom { location: lambda0, weight: 1.0 }], vec![])?,
            discontinuous_at_zero: false,
            discontinuous_at_one: false,
            operator_monotone_derivative: true,
        })
    }

    /// φ(x) = x⁴/4: convex with increasing but not operator monotone φ' = x³.
    /// Carries no representation (b = 0, μ = δ₀ by convention).
    pub fn quartic() -> Result<Self> {
        Self::new(PhiParts {
            name: "quartic".into(),
            phi: Arc::new(|x| 0.25 * x.powi(4)),
            phi_prime: Arc::new(|x| x.powi(3)),
            a: 0.0,
            b: 0.0,
            measure: LoewnerMeasure::dirac(0.0)?,
            discontinuous_at_zero: false,
            discontinuous_at_one: false,
            operator_monotone_derivative: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn names_resolve() {
        for n in ["fermionic", "bosonic", "power2", "quartic", "atom(0.5)", "atom(-0.5)", " atom( 0 ) "] {
            builtin(n).unwrap();
        }
        assert!(builtin("gaussian").is_err());
        assert!(builtin("atom(1.0)").is_err());
        assert!(builtin("atom(x)").is_err());
    }

    #[test]
    fn power2_derivative_is_exact() {
        let p = PhiSpec::power2().unwrap();
        assert_eq!(p.eval_phi_prime_rep(0.3, 1e-12).unwrap(), 0.6);
        for x in [0.0, 0.1, 0.77, 1.0] {
            assert!((p.eval_phi_prime_rep(x, 1e-12).unwrap() - 2.0 * x).abs() < 1e-15);
        }
        assert_abs_diff_eq!(p.eval_phi_rep(0.8, 1e-12).unwrap(), 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(p.c, -0.25);
    }

    #[test]
    fn fermionic_points() {
        let p = PhiSpec::fermionic().unwrap();
        let d = p.eval_phi_prime_rep(0.25, 1e-11).unwrap();
        assert_abs_diff_eq!(d, (1.0f64 / 3.0).ln(), epsilon = 1e-10);
        let v = p.eval_phi_rep(0.25, 1e-11).unwrap();
        assert_abs_diff_eq!(v, 0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln(), epsilon = 1e-10);
        assert!(p.eval_phi_prime_rep(0.0, 1e-9).is_err());
        assert!(p.eval_phi_prime_rep(1.0, 1e-9).is_err());
    }

    #[test]
    fn symmetry_point_returns_a() {
        for p in [PhiSpec::fermionic(), PhiSpec::bosonic(), PhiSpec::atom(0.4)] {
            let p = p.unwrap();
            assert_eq!(p.eval_phi_prime_rep(0.5, 1e-10).unwrap(), p.a);
            assert_abs_diff_eq!(p.eval_phi_rep(0.5, 1e-10).unwrap(), p.a / 2.0 + p.c, epsilon = 1e-15);
        }
    }

    #[test]
    fn bosonic_right_endpoint_is_regular() {
        let p = PhiSpec::bosonic().unwrap();
        let d = p.eval_phi_prime_rep(1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(d, 0.5f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn atom_closed_form_matches_derivative() {
        let p = PhiSpec::atom(0.5).unwrap();
        let h = 1e-5;
        for x in [0.1, 0.4, 0.9] {
            let fd = (p.phi(x + h) - p.phi(x - h)) / (2.0 * h);
            assert!((fd - p.phi_prime(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn builtin_masses_are_one() {
        for n in ["fermionic", "bosonic", "power2", "atom(0.5)", "atom(-0.5)"] {
            let m = builtin(n).unwrap().measure.total_mass().unwrap();
            assert!((m - 1.0).abs() <= 1e-12, "{n}: {m}");
        }
    }
}
