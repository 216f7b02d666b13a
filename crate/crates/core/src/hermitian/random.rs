//! Seeded random instances. Every generator takes either a seed or an
//! explicit RNG; there is no hidden global randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{c, op_norm, CMatrix, Contraction, StateOperator, C64};
use crate::error::{Error, Result};

fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = complex_gaussian(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm()) } else { c(1.0) };
        q.column_mut(j).scale_mut_complex(phase);
    }
    q
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, s: C64) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

/// Random state with eigenvalues uniform in `[low, high]` and Haar
/// eigenvectors.
pub fn random_state(dim: usize, low: f64, high: f64, seed: u64) -> Result<StateOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(dim, low, high, &mut rng)
}

pub fn random_state_with<R: Rng + ?Sized>(dim: usize, low: f64, high: f64, rng: &mut R) -> Result<StateOperator> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(0.0 <= low && low <= high && high <= 1.0) {
        return Err(Error::InvalidArgument(format!("spectrum range [{low}, {high}] not inside [0, 1]")));
    }
    let values: Vec<f64> = (0..dim).map(|_| low + (high - low) * rng.random::<f64>()).collect();
    let u = haar_unitary(dim, rng);
    let spectral = super::SpectralDecomposition { eigenvalues: values, eigenvectors: u };
    StateOperator::new(spectral.reconstruct())
}

/// Gaussian map rescaled so its largest singular value is 1.
pub fn random_contraction(rows: usize, cols: usize, seed: u64) -> Result<Contraction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_contraction_with(rows, cols, &mut rng)
}

pub fn random_contraction_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<Contraction> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("contraction dimensions {rows}x{cols}")));
    }
    let g = complex_gaussian(rows, cols, rng);
    let sigma = op_norm(&g);
    // (1 - 4 eps) keeps the rescaled norm at or below 1 after rounding.
    let scale = (1.0 - 4.0 * f64::EPSILON) / sigma;
    Contraction::new(g * c(scale))
}
