//! One-dimensional quadrature for λ-integrals against a [`LoewnerMeasure`]
//! and t-integrals over the half-line.
//!
//! Both reduce to [`integrate_panels`]: a fixed partition graded toward the
//! endpoints, then repeated bisection of the panel with the largest error.
//! A panel's value is the 16-point Gauss-Legendre sum over its two halves and
//! its error is the difference to the single-panel sum, i.e. the change
//! between successive refinement levels. Panels are reduced in left-to-right
//! order, so results are bit-identical across runs.

mod gauss;

pub use gauss::{gauss_legendre, ORDER as GAUSS_ORDER};

use crate::error::{Error, Result};
use crate::loewner::LoewnerMeasure;

pub const DEFAULT_TOL_LAMBDA: f64 = 1e-9;
pub const DEFAULT_TOL_T: f64 = 1e-9;
pub const DEFAULT_MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 50_000;

/// Number of dyadic grading levels laid down before adaptive refinement.
const INITIAL_GRADING: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    coarse: f64,
    left: f64,
    right: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left + self.right
    }

    fn error(&self) -> f64 {
        (self.coarse - self.value()).abs()
    }
}

struct Integrator<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(f64) -> Result<f64>> Integrator<F> {
    fn gauss(&mut self, a: f64, b: f64) -> Result<f64> {
        let (nodes, weights) = gauss::rule();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let at = mid + half * x;
            let y = (self.f)(at)?;
            if !y.is_finite() {
                return Err(Error::Internal(format!("integrand is {y} at {at}")));
            }
            sum += w * y;
        }
        self.evaluations += nodes.len();
        Ok(sum * half)
    }

    fn panel(&mut self, a: f64, b: f64, depth: u32, coarse: Option<f64>) -> Result<Panel> {
        let coarse = match coarse {
            Some(v) => v,
            None => self.gauss(a, b)?,
        };
        let m = 0.5 * (a + b);
        let left = self.gauss(a, m)?;
        let right = self.gauss(m, b)?;
        Ok(Panel { a, b, depth, coarse, left, right })
    }
}

/// Adaptive integration over the partition given by `breakpoints`
/// (strictly increasing, at least two points). `tol` is absolute.
pub fn integrate_panels<F>(f: F, breakpoints: &[f64], tol: f64, max_depth: u32) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
    }
    let mut it = Integrator { f, evaluations: 0 };
    let mut panels = breakpoints
        .windows(2)
        .map(|w| it.panel(w[0], w[1], 0, None))
        .collect::<Result<Vec<_>>>()?;
    loop {
        let total_error: f64 = panels.iter().map(Panel::error).sum();
        if total_error <= tol {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < max_depth && p.b - p.a > 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()))
            .fold(None::<(usize, f64)>, |best, (i, p)| match best {
                Some((_, e)) if e >= p.error() => best,
                _ => Some((i, p.error())),
            });
        let Some((i, _)) = worst.filter(|_| panels.len() < MAX_PANELS) else {
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let estimate = panels.iter().map(Panel::value).sum();
            return Err(Error::Accuracy { estimate, error: total_error, tol });
        };
        let p = panels[i];
        let m = 0.5 * (p.a + p.b);
        let lo = it.panel(p.a, m, p.depth + 1, Some(p.left))?;
        let hi = it.panel(m, p.b, p.depth + 1, Some(p.right))?;
        panels[i] = lo;
        panels.insert(i + 1, hi);
    }
    let value = panels.iter().map(Panel::value).sum();
    let error_estimate = panels.iter().map(Panel::error).sum();
    Ok(QuadratureResult { value, error_estimate, evaluations: it.evaluations })
}

/// Partition of `[l, u]` with dyadic grading toward the requested ends.
/// On `[-1, 1]` graded at the top this produces the points `1 - 2^{-k}`.
pub fn graded_breakpoints(l: f64, u: f64, grade_lower: bool, grade_upper: bool, levels: u32) -> Vec<f64> {
    let mid = 0.5 * (l + u);
    let mut pts = vec![l];
    match (grade_lower, grade_upper) {
        (false, false) => {}
        (true, false) => {
            for k in (1..=levels).rev() {
                pts.push(l + (u - l) * 0.5f64.powi(k as i32));
            }
        }
        (false, true) => {
            for k in 1..=levels {
                pts.push(u - (u - l) * 0.5f64.powi(k as i32));
            }
        }
        (true, true) => {
            for k in (1..levels).rev() {
                pts.push(l + (mid - l) * 0.5f64.powi(k as i32));
            }
            pts.push(mid);
            for k in 1..levels {
                pts.push(u - (u - mid) * 0.5f64.powi(k as i32));
            }
        }
    }
    pts.push(u);
    pts.dedup();
    pts
}

/// `∫ f dμ`: atoms are summed exactly, each density piece is integrated
/// adaptively with grading toward both of its endpoints.
pub fn integrate_measure<F>(mut f: F, measure: &LoewnerMeasure, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_measure_on(&mut f, measure, (-1.0, 1.0), tol, DEFAULT_MAX_DEPTH)
}

/// `∫_{[lo, hi]} f dμ`, i.e. the integral against μ restricted to a window.
pub fn integrate_measure_on<F>(
    f: &mut F,
    measure: &LoewnerMeasure,
    (lo, hi): (f64, f64),
    tol: f64,
    max_depth: u32,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut value = 0.0;
    let mut evaluations = 0;
    for atom in measure.atoms().iter().filter(|a| lo <= a.location && a.location <= hi) {
        value += atom.weight * f(atom.location)?;
        evaluations += 1;
    }
    let mut error_estimate = 0.0;
    let pieces: Vec<(f64, f64, &crate::loewner::Density)> = measure
        .densities()
        .iter()
        .filter_map(|d| {
            let (l, u) = (d.lower().max(lo), d.upper().min(hi));
            (l < u).then_some((l, u, d))
        })
        .collect();
    if !pieces.is_empty() {
        let piece_tol = tol / pieces.len() as f64;
        for (l, u, d) in pieces {
            let levels = if d.endpoint_exponent() < 0.0 { 2 * INITIAL_GRADING } else { INITIAL_GRADING };
            let pts = graded_breakpoints(l, u, true, true, levels);
            let r = integrate_panels(|x| Ok(f(x)? * d.density(x)), &pts, piece_tol, max_depth)?;
            value += r.value;
            error_estimate += r.error_estimate;
            evaluations += r.evaluations;
        }
    }
    Ok(QuadratureResult { value, error_estimate, evaluations })
}

/// `∫_0^∞ g(t) dt` for `|g(t)| <= C (1+t)^{-decay_order}`, via `t = u/(1-u)`.
pub fn integrate_halfline<G>(mut g: G, tol: f64, decay_order: f64) -> Result<QuadratureResult>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(decay_order >= 2.0) {
        return Err(Error::InvalidArgument(format!("decay order {decay_order} < 2")));
    }
    let mut pts: Vec<f64> = (1..=4).rev().map(|k| 0.5f64.powi(k)).collect();
    pts.insert(0, 0.0);
    for k in 1..=8 {
        pts.push(1.0 - 0.5f64.powi(k));
    }
    pts.push(1.0);
    pts.dedup();
    integrate_panels(
        |u| {
            let w = 1.0 - u;
            g(u / w).map(|y| y / (w * w))
        },
        &pts,
        tol,
        DEFAULT_MAX_DEPTH,
    )
}

/// Numerical check of the resolvent identity behind the t-representation of
/// the Loewner kernel:
/// `(1-2x)/(1+λ(1-2x)) = 1/λ - (1/λ) ∫_0^∞ (1+λ(1-2x)+t)^{-2} dt`.
/// Returns the absolute deviation between the two sides.
pub fn verify_resolvent_identity(x: f64, lambda: f64, tol: f64) -> Result<f64> {
    if !(-1.0 < lambda && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} outside (-1, 1)")));
    }
    let s = 1.0 - 2.0 * x;
    let shift = 1.0 + lambda * s;
    let lhs = s / shift;
    let rhs = if lambda.abs() < 1e-4 {
        // (1 - 1/(1+λs))/λ = s/(1+λs) without the division by λ
        s / shift
    } else {
        let inner_tol = tol * lambda.abs().min(1.0) * 0.1;
        let r = integrate_halfline(|t| Ok((shift + t).powi(-2)), inner_tol, 2.0)?;
        (1.0 - r.value) / lambda
    };
    Ok((lhs - rhs).abs())
}
