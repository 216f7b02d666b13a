//! Hermitian matrices, states `0 <= A <= 1`, contractions and projections.
//!
//! Everything downstream is built on [`SpectralDecomposition`]: a matrix
//! function `f(M)` is `U diag(f(λ)) U*` with eigenvalues sorted ascending.

mod exchange;
mod random;

pub use exchange::{matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json, MatrixFile};
pub use random::{haar_unitary, random_contraction, random_contraction_with, random_state, random_state_with};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Elementwise tolerance for the Hermitian check on input matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Width of the band outside `[0, 1]` that is treated as rounding noise.
pub const SPECTRUM_CLAMP_TOL: f64 = 1e-10;
/// Tolerance for `P² = P = P*` and nesting checks.
pub const PROJECTOR_TOL: f64 = 1e-11;
/// Slack on the largest singular value of a contraction.
pub const CONTRACTION_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates `m` against its adjoint elementwise at [`HERMITIAN_TOL`] and
    /// stores the exact Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let deviation = hermitian_deviation(&m);
        if deviation > HERMITIAN_TOL || !deviation.is_finite() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::hermitize(m))
    }

    /// Symmetrizes without validation. Used for products that are Hermitian
    /// in exact arithmetic, like `X M X*`.
    pub(crate) fn hermitize(m: CMatrix) -> Self {
        let adj = m.adjoint();
        let mut h = (m + adj) * c(0.5);
        for i in 0..h.nrows() {
            h[(i, i)].im = 0.0;
        }
        Self { m: h }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { c(diag[i]) } else { c(0.0) });
        Self { m }
    }

    /// Builds a matrix from real rows; convenient for fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: rows.first().map_or(0, |r| r.len()) });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| c(rows[i][j])))
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        trace(&self.m).re
    }

    pub fn op_norm(&self) -> f64 {
        let ev = self.eigen().eigenvalues;
        ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn hs_norm(&self) -> f64 {
        hs_norm(&self.m)
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigen().eigenvalues.iter().map(|x| x.abs()).sum()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * c(s) }
    }

    /// Conjugation `U M U*` by a square unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        check_dims(self.dim(), u.ncols())?;
        Ok(Self::hermitize(u * &self.m * u.adjoint()))
    }

    pub fn eigen(&self) -> SpectralDecomposition {
        spectral_decompose(self)
    }
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Frobenius norm.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().fold(0.0_f64, |a, &s| a.max(s))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(values) U*`.
    pub fn synthesize(&self, values: &[f64]) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::hermitize(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.synthesize(&self.eigenvalues)
    }

    /// `f(M)` on the stored spectrum. Non-finite values of `f` are reported
    /// as a domain error carrying the eigenvalue.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&x| {
                let y = f(x);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::Domain { eigenvalue: x })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.synthesize(&values))
    }

    /// Expresses `m` in the eigenbasis: `U* m U`.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}

pub fn spectral_decompose(m: &HermitianMatrix) -> SpectralDecomposition {
    let n = m.dim();
    let eig = SymmetricEigen::new(m.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// `f(M) = U diag(f(λ)) U*`.
pub fn apply_function<F: Fn(f64) -> f64>(f: F, m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.eigen().map(f)
}

/// A Hermitian matrix with spectrum in `[0, 1]`.
///
/// Eigenvalues within [`SPECTRUM_CLAMP_TOL`] outside the interval are clamped
/// onto it; anything further out is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct StateOperator {
    base: HermitianMatrix,
    spectral: SpectralDecomposition,
}

impl StateOperator {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let mut spectral = base.eigen();
        for x in spectral.eigenvalues.iter_mut() {
            if *x < -SPECTRUM_CLAMP_TOL || *x > 1.0 + SPECTRUM_CLAMP_TOL || !x.is_finite() {
                return Err(Error::SpectrumOutOfRange { eigenvalue: *x });
            }
            *x = x.clamp(0.0, 1.0);
        }
        Ok(Self { base, spectral })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(diag))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    /// Decomposition with clamped eigenvalues.
    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    /// `U A U*` for a unitary `U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.base.conjugate_by(u)?)
    }

    /// Restriction `P A P` on range(P), as an operator on that range.
    pub fn restrict(&self, p: &HermitianMatrix) -> Result<Self> {
        Self::new(restrict_to_range(&self.base, p)?)
    }


    pub fn compress(&self, x: &Contraction) -> Result<Self> {
        Self::new(compress(&self.base, x)?)
    }
}

/// A linear map `X: C^cols -> C^rows` with `X*X <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    m: CMatrix,
}

impl Contraction {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::InvalidArgument("contraction with empty dimension".into()));
        }
        let sigma = op_norm(&m);
        if !(sigma <= 1.0 + CONTRACTION_TOL) {
            return Err(Error::NotContraction { sigma });
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n, n) }
    }

    /// `s * identity` for `|s| <= 1`.
    pub fn scaled_identity(n: usize, s: f64) -> Result<Self> {
        Self::new(CMatrix::identity(n, n) * c(s))
    }

    /// The first `rows` coordinates of `C^cols`.
    pub fn coordinate_projection(rows: usize, cols: usize) -> Result<Self> {
        if rows > cols {
            return Err(Error::InvalidArgument(format!("coordinate projection {rows}x{cols}")));
        }
        Self::new(CMatrix::identity(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn sigma_max(&self) -> f64 {
        op_norm(&self.m)
    }

    /// Smallest singular value of the map seen from its domain, i.e. the
    /// square root of the smallest eigenvalue of `X*X`.
    pub fn sigma_min(&self) -> f64 {
        let xx = HermitianMatrix::hermitize(self.m.adjoint() * &self.m);
        xx.eigen().eigenvalues[0].max(0.0).sqrt()
    }
}

/// `X M X*`.
pub fn compress(m: &HermitianMatrix, x: &Contraction) -> Result<HermitianMatrix> {
    check_dims(m.dim(), x.cols())?;
    Ok(HermitianMatrix::hermitize(x.matrix() * m.matrix() * x.matrix().adjoint()))
}

/// Checks `P² = P = P*` at [`PROJECTOR_TOL`] (operator norm).
pub fn validate_projector(p: &HermitianMatrix) -> Result<()> {
    let m = p.matrix();
    let idem = op_norm(&(m * m - m));
    if idem > PROJECTOR_TOL {
        return Err(Error::NotProjector { deviation: idem });
    }
    Ok(())
}

/// Orthonormal basis of range(P), one column per basis vector.
///
/// The rank is the number of eigenvalues of `P` above 1/2. The basis is
/// produced by column-pivoted Gram-Schmidt on the columns of `P` (largest
/// residual first, lowest index on ties), and each vector is phased so its
/// first non-negligible coordinate is real and positive. A coordinate
/// projector therefore yields exactly its coordinate vectors, in order.
pub fn range_basis(p: &HermitianMatrix) -> Result<CMatrix> {
    validate_projector(p)?;
    let n = p.dim();
    let rank = p.eigen().eigenvalues.iter().filter(|&&x| x > 0.5).count();
    let mut residual: Vec<nalgebra::DVector<C64>> = (0..n).map(|j| p.matrix().column(j).into_owned()).collect();
    let mut used = vec![false; n];
    let mut picked: Vec<(usize, nalgebra::DVector<C64>)> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut best: Option<(usize, f64)> = None;
        for (j, r) in residual.iter().enumerate() {
            if used[j] {
                continue;
            }
            let nr = r.norm();
            if best.map_or(true, |(_, b)| nr > b * (1.0 + 1e-12)) {
                best = Some((j, nr));
            }
        }
        let (j, norm) = best.ok_or_else(|| Error::Internal("projector rank exceeds columns".into()))?;
        if norm < 1e-8 {
            return Err(Error::NotProjector { deviation: norm });
        }
        used[j] = true;
        let mut q = residual[j].clone() / c(norm);
        // second pass against earlier vectors for stability
        for (_, prev) in &picked {
            let proj = prev.dotc(&q);
            q -= prev * proj;
        }
        let qn = q.norm();
        q /= c(qn);
        for r in residual.iter_mut() {
            let proj = q.dotc(r);
            *r -= &q * proj;
        }
        picked.push((j, q));
    }
    // Order by pivot column so coordinate projectors map to e_1, e_2, ...
    picked.sort_by_key(|(j, _)| *j);
    let mut basis = CMatrix::zeros(n, rank);
    for (k, (_, mut q)) in picked.into_iter().enumerate() {
        if let Some(lead) = q.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = lead.conj() / c(lead.norm());
            q *= phase;
        }
        basis.set_column(k, &q);
    }
    Ok(basis)
}

/// `P M P` written in the basis of [`range_basis`]; a `rank(P)` square matrix.
pub fn restrict_to_range(m: &HermitianMatrix, p: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(m.dim(), p.dim())?;
    let v = range_basis(p)?;
    if v.ncols() == 0 {
        return Err(Error::InvalidArgument("projector has rank 0".into()));
    }
    Ok(HermitianMatrix::hermitize(v.adjoint() * m.matrix() * v))
}

/// Orthogonal projector onto the span of orthonormal columns `v`.
pub fn projector_onto(v: &CMatrix) -> HermitianMatrix {
    HermitianMatrix::hermitize(v * v.adjoint())
}

/// Nested finite-rank projections `P_1 <= P_2 <= ...` on a common ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionChain {
    ambient_dim: usize,
    ranks: Vec<usize>,
    projectors: Vec<HermitianMatrix>,
}

impl ProjectionChain {
    /// Validates idempotence, strictly increasing ranks and `P_k P_{k+1} = P_k`.
    pub fn new(projectors: Vec<HermitianMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty projection chain".into()))?;
        let ambient_dim = first.dim();
        let mut ranks = Vec::with_capacity(projectors.len());
        for p in &projectors {
            check_dims(ambient_dim, p.dim())?;
            validate_projector(p)?;
            ranks.push(p.trace().round() as usize);
        }
        for k in 1..projectors.len() {
            if ranks[k] <= ranks[k - 1] {
                return Err(Error::InvalidArgument(format!(
                    "ranks not strictly increasing at step {k}: {} then {}",
                    ranks[k - 1],
                    ranks[k]
                )));
            }
            let a = projectors[k - 1].matrix();
            let deviation = op_norm(&(a * projectors[k].matrix() - a));
            if deviation > PROJECTOR_TOL {
                return Err(Error::NotNested { index: k, deviation });
            }
        }
        Ok(Self { ambient_dim, ranks, projectors })
    }

    /// Coordinate prefixes `span(e_1..e_r)` for each requested rank.
    pub fn prefix(ambient_dim: usize, ranks: &[usize]) -> Result<Self> {
        let projectors = ranks
            .iter()
            .map(|&r| {
                if r == 0 || r > ambient_dim {
                    return Err(Error::InvalidArgument(format!("rank {r} outside 1..={ambient_dim}")));
                }
                Ok(HermitianMatrix::from_real_diagonal(
                    &(0..ambient_dim).map(|i| if i < r { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(projectors)
    }

    /// Nested ranges spanned by leading columns of a Haar unitary.
    pub fn random_nested(ambient_dim: usize, ranks: &[usize], seed: u64) -> Result<Self> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(ambient_dim, &mut rng);
        Self::from_frame(&u, ranks)
    }

    /// Nested ranges spanned by leading columns of the unitary `frame`.
    pub fn from_frame(frame: &CMatrix, ranks: &[usize]) -> Result<Self> {
        let n = frame.nrows();
        let projectors = ranks
            .iter()
            .map(|&r| {
                if r == 0 || r > n {
                    return Err(Error::InvalidArgument(format!("rank {r} outside 1..={n}")));
                }
                Ok(projector_onto(&frame.columns(0, r).into_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(projectors)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn projectors(&self) -> &[HermitianMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}
