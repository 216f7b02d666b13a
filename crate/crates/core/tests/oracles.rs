//! Entropies checked against closed forms computed without the library.

use relent_core::entropy::{klein_ratio, relative_entropy_integral, QuadTolerances};
use relent_core::hermitian::random_state;
use relent_core::{relative_entropy_direct, PhiSpec, StateOperator};

fn binary(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| a * (a / b).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln())
        .sum()
}

/// φ(x) = x ln x - (1+x) ln(1+x).
fn bosonic_sum(x: &[f64], y: &[f64]) -> f64 {
    let phi = |t: f64| t * t.ln() - (1.0 + t) * (1.0 + t).ln();
    let dphi = |t: f64| (t / (1.0 + t)).ln();
    x.iter().zip(y).map(|(&a, &b)| phi(a) - phi(b) - dphi(b) * (a - b)).sum()
}

#[test]
fn commuting_fermionic_is_classical_binary_entropy() {
    let spec = PhiSpec::fermionic().unwrap();
    for (x, y) in [
        (vec![0.3, 0.7], vec![0.5, 0.5]),
        (vec![0.01, 0.5, 0.99], vec![0.2, 0.3, 0.4]),
        (vec![0.6], vec![0.1]),
    ] {
        let a = StateOperator::from_real_diagonal(&x).unwrap();
        let b = StateOperator::from_real_diagonal(&y).unwrap();
        let h = relative_entropy_direct(&spec, &a, &b).unwrap().as_f64();
        assert!((h - binary(&x, &y)).abs() <= 1e-12, "{h}");
        let i = relative_entropy_integral(&spec, &a, &b, QuadTolerances::default()).unwrap().as_f64();
        assert!((h - i).abs() <= 1e-4 * h, "{h} vs {i}");
    }
}

#[test]
fn commuting_bosonic_matches_scalar_sum() {
    let spec = PhiSpec::bosonic().unwrap();
    let (x, y) = (vec![0.2, 0.9, 0.45], vec![0.6, 0.3, 0.45]);
    let a = StateOperator::from_real_diagonal(&x).unwrap();
    let b = StateOperator::from_real_diagonal(&y).unwrap();
    let h = relative_entropy_direct(&spec, &a, &b).unwrap().as_f64();
    assert!((h - bosonic_sum(&x, &y)).abs() <= 1e-12);
}

#[test]
fn scalar_integral_entropy() {
    let spec = PhiSpec::fermionic().unwrap();
    let a = StateOperator::from_real_diagonal(&[0.3]).unwrap();
    let b = StateOperator::from_real_diagonal(&[0.5]).unwrap();
    let i = relative_entropy_integral(&spec, &a, &b, QuadTolerances::default()).unwrap().as_f64();
    assert!((i - binary(&[0.3], &[0.5])).abs() <= 1e-9);
}

#[test]
fn klein_ratio_is_reported_for_fermionic_sweep() {
    let spec = PhiSpec::fermionic().unwrap();
    let mut max: f64 = 0.0;
    for k in 0..200 {
        let a = random_state(4, 0.0, 1.0, k).unwrap();
        let b = random_state(4, 0.1, 0.9, 10_000 + k).unwrap();
        let r = klein_ratio(&spec, &a, &b).unwrap().value().unwrap();
        assert!(r.is_finite() && r >= 0.0);
        max = max.max(r);
    }
    assert!(max > 0.0);
}
