use thiserror::Error;

/// Errors surfaced by construction, diagonalization and ensemble routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M*| = {deviation:.3e} exceeds tol {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension {dim} is not a perfect square")]
    NotSquareFactorable { dim: usize },

    #[error("spectrum is degenerate (gap {gap:.3e} below {threshold:.3e}); the ensemble is only defined for non-degenerate spectra")]
    Degenerate { gap: f64, threshold: f64 },

    #[error("permutation of length {len} is not a bijection on 0..{len}")]
    InvalidPermutation { len: usize },

    #[error("eigensolver failed to converge")]
    EigenConvergence,

    #[error("enumeration requires d <= {cap}, got d = {dim}")]
    EnumerationCap { dim: usize, cap: usize },

    #[error("Weingarten functions are only tabulated for n <= 4, got n = {n}")]
    WeingartenOrder { n: usize },

    #[error("Weingarten function has a pole at d = {d} for n = {n}")]
    WeingartenPole { d: usize, n: usize },

    #[error("operator dimensions do not match: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectrum must be positive definite (min eigenvalue {min:.3e})")]
    NotPositiveDefinite { min: f64 },

    #[error("state is not a density matrix: {0}")]
    InvalidState(String),

    #[error("the OTOC closed form needs d >= 3 (d = 2 gives a one-dimensional antisymmetric subspace); use the direct evaluation instead")]
    OtocDimensionTooSmall,

    #[error("parity projector does not commute with the Hamiltonian (|[P,H]| = {commutator:.3e}); reflection is not a symmetry of this configuration")]
    ParityNotASymmetry { commutator: f64 },

    #[error("Newton solver stalled: best residual {residual:.3e} after {iterations} iterations")]
    SolverStalled { residual: f64, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
