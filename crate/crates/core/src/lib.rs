//! Monotone relative entropies of operators `0 <= A, B <= 1`.
//!
//! `H(A,B) = tr[φ(A) - φ(B) - φ'(B)(A-B)]` for convex φ whose derivative is
//! operator monotone, evaluated by functional calculus, by the Gâteaux
//! derivative, and by a double integral over the Loewner measure of φ'.

pub mod entropy;
pub mod error;
pub mod hermitian;
pub mod lab;
pub mod loewner;
pub mod quad;

pub use entropy::{
    classify_singular_case, gateaux_derivative_resolvent, gateaux_derivative_spectral, klein_ratio, relative_entropy_direct,
    relative_entropy_gateaux, relative_entropy_integral, theorem4_check, EntropyOptions, EntropyValue, InfinityReason,
    KleinRatio, QuadTolerances, SingularCase, Theorem4Report,
};
pub use error::{Error, Result};
pub use hermitian::{
    random_contraction, random_state, CMatrix, Contraction, HermitianMatrix, ProjectionChain, SpectralDecomposition,
    StateOperator, C64,
};
pub use loewner::{builtin, LoewnerMeasure, PhiSpec};
pub use quad::QuadratureResult;
