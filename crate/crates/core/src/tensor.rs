//! Dense complex linear algebra: Hermitian eigendecomposition and the
//! structural tensors (SWAP, COPY, s-tensor, symmetric/antisymmetric
//! projectors) that everything else is built from.
//!
//! Index convention: in every tensor product the first factor is the slow
//! index, i.e. `kron(A, B)[(i*db + k, j*db + l)] = A[(i,j)] * B[(k,l)]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix in row-major logical layout.
pub type CMat = DMatrix<Complex64>;

/// Hard cap on single-space dimensions.
pub const MAX_DIM: usize = 4096;
/// Hard cap on twofold (d^2) operator dimensions.
pub const MAX_TWOFOLD_DIM: usize = 4096;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest absolute entry of `M`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise distance between two matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A square matrix verified Hermitian within `hermiticity_tol`.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMat,
    hermiticity_tol: f64,
}

impl HermitianOperator {
    /// Default entrywise hermiticity tolerance.
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(matrix: CMat, hermiticity_tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() > MAX_DIM {
            return Err(Error::DimensionCap {
                dim: matrix.nrows(),
                cap: MAX_DIM,
            });
        }
        if !matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let deviation = max_abs_diff(&matrix, &matrix.adjoint());
        if deviation > hermiticity_tol {
            return Err(Error::NotHermitian {
                deviation,
                tol: hermiticity_tol,
            });
        }
        Ok(Self {
            matrix,
            hermiticity_tol,
        })
    }

    pub fn with_default_tol(matrix: CMat) -> Result<Self> {
        Self::new(matrix, Self::DEFAULT_TOL)
    }

    /// Builds from a real diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = CMat::zeros(d, d);
        for (l, &e) in diag.iter().enumerate() {
            m[(l, l)] = Complex64::new(e, 0.0);
        }
        Self {
            matrix: m,
            hermiticity_tol: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }
}

/// Eigendecomposition of a Hermitian operator with spectrum statistics.
///
/// `vectors` holds eigenvectors as columns, ordered by ascending eigenvalue;
/// each column's first component of magnitude above the phase threshold is
/// rotated to the positive real axis so the decomposition is deterministic.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Unitary of eigenvectors (columns).
    pub vectors: CMat,
    /// Mean level spacing (E_max - E_min) / (d - 1).
    pub mean_spacing: f64,
    /// Normalized spacings s_l = (E_{l+1} - E_l) / mean_spacing.
    pub spacings: Vec<f64>,
    /// Per-gap degeneracy flags.
    pub degenerate: Vec<bool>,
    /// Threshold used for the degeneracy flags, relative to the mean spacing.
    pub degeneracy_tol: f64,
}

/// Relative gap threshold below which a level pair counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn has_degeneracy(&self) -> bool {
        self.degenerate.iter().any(|&b| b)
    }

    /// Fails with `Error::Degenerate` if any gap is below the threshold.
    pub fn require_non_degenerate(&self) -> Result<()> {
        if let Some(l) = self.degenerate.iter().position(|&b| b) {
            return Err(Error::Degenerate {
                gap: self.values[l + 1] - self.values[l],
                threshold: self.degeneracy_tol * self.mean_spacing,
            });
        }
        Ok(())
    }

    /// Synthesizes an eigensystem from a sorted spectrum with the identity
    /// as eigenbasis. Used for spectra generated directly (spacing samplers,
    /// equally spaced ladders).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "need at least two levels".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "values must be sorted ascending".into(),
            ));
        }
        let d = values.len();
        let vectors = CMat::identity(d, d);
        Ok(Self::assemble(values, vectors))
    }

    fn assemble(values: Vec<f64>, vectors: CMat) -> Self {
        let d = values.len();
        let span = values[d - 1] - values[0];
        let mean_spacing = span / (d as f64 - 1.0);
        let (spacings, degenerate) = if mean_spacing > 0.0 {
            let sp: Vec<f64> = values
                .windows(2)
                .map(|w| (w[1] - w[0]) / mean_spacing)
                .collect();
            let deg = sp.iter().map(|&s| s < DEGENERACY_TOL).collect();
            (sp, deg)
        } else {
            // fully collapsed spectrum: every gap is degenerate
            (vec![0.0; d - 1], vec![true; d - 1])
        };
        Self {
            values,
            vectors,
            mean_spacing,
            spacings,
            degenerate,
            degeneracy_tol: DEGENERACY_TOL,
        }
    }

    /// The time-evolution unitary e^{itH} = U diag(e^{itE}) U^dagger.
    pub fn evolution(&self, t: f64) -> CMat {
        let d = self.dim();
        let mut phases = CMat::zeros(d, d);
        for l in 0..d {
            phases[(l, l)] = Complex64::from_polar(1.0, t * self.values[l]);
        }
        &self.vectors * phases * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues and a
/// deterministic phase convention.
///
/// Accuracy contract: reconstruction residual max|U L U* - H| <= 10 * tol
/// and max|U* U - I| <= 10 * tol, checked before returning.
pub fn eigh(h: &HermitianOperator, tol: f64) -> Result<EigenSystem> {
    let d = h.dim();
    let sym = h.matrix().clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        let mut v = sym.eigenvectors.column(i).clone_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }

    // residual checks
    let mut lambda = CMat::zeros(d, d);
    for l in 0..d {
        lambda[(l, l)] = Complex64::new(values[l], 0.0);
    }
    let recon = &vectors * &lambda * vectors.adjoint();
    let scale = max_abs(h.matrix()).max(1.0);
    let resid = max_abs_diff(&recon, h.matrix());
    let unit = max_abs_diff(&(vectors.adjoint() * &vectors), &CMat::identity(d, d));
    if resid > 10.0 * tol * scale || unit > 10.0 * tol {
        return Err(Error::EigenConvergence);
    }

    Ok(EigenSystem::assemble(values, vectors))
}

/// Rotates the first component of magnitude > 1e-8 onto the positive real axis.
fn fix_phase(v: &mut nalgebra::DVector<Complex64>) {
    let pivot = v.iter().find(|z| z.norm() > 1e-8).copied();
    if let Some(z) = pivot {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Kronecker product with the first factor as the slow index.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let rows = ra.checked_mul(rb).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap: MAX_TWOFOLD_DIM,
    })?;
    let cols = ca * cb;
    if rows.max(cols) > MAX_TWOFOLD_DIM {
        return Err(Error::DimensionCap {
            dim: rows.max(cols),
            cap: MAX_TWOFOLD_DIM,
        });
    }
    let mut out = CMat::zeros(rows, cols);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Which factor of the twofold space a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    /// Trace out the first (slow) factor: Tr_1(A x B) = Tr(A) B.
    First,
    /// Trace out the second (fast) factor: Tr_2(A x B) = Tr(B) A.
    Second,
}

/// Partial trace of an operator on a d^2-dimensional twofold space.
pub fn partial_trace(m: &CMat, side: TraceSide) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::NotSquareFactorable { dim: n });
    }
    let mut out = CMat::zeros(d, d);
    match side {
        TraceSide::First => {
            for k in 0..d {
                for l in 0..d {
                    let mut acc = C_ZERO;
                    for i in 0..d {
                        acc += m[(i * d + k, i * d + l)];
                    }
                    out[(k, l)] = acc;
                }
            }
        }
        TraceSide::Second => {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = C_ZERO;
                    for k in 0..d {
                        acc += m[(i * d + k, j * d + k)];
                    }
                    out[(i, j)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// SWAP on the twofold space: SWAP |i j> = |j i>.
pub fn swap_op(d: usize) -> CMat {
    let mut m = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C_ONE;
        }
    }
    m
}

/// COPY: H -> H x H over the computational basis, |l> -> |l l>. Shape d^2 x d.
pub fn copy_op(d: usize) -> CMat {
    let mut m = CMat::zeros(d * d, d);
    for l in 0..d {
        m[(l * d + l, l)] = C_ONE;
    }
    m
}

/// s-tensor on the twofold space: sum_l |l l><l l|, the product of the two
/// COPY orientations.
pub fn s_tensor(d: usize) -> CMat {
    let mut m = CMat::zeros(d * d, d * d);
    for l in 0..d {
        m[(l * d + l, l * d + l)] = C_ONE;
    }
    m
}

/// Symmetric projector P+ = (I + SWAP) / 2, rank d(d+1)/2.
pub fn sym_proj(d: usize) -> CMat {
    half_sum_with_identity(d, 1.0)
}

/// Antisymmetric projector P- = (I - SWAP) / 2, rank d(d-1)/2.
pub fn antisym_proj(d: usize) -> CMat {
    half_sum_with_identity(d, -1.0)
}

fn half_sum_with_identity(d: usize, sign: f64) -> CMat {
    let mut m = swap_op(d);
    m.scale_mut(0.5 * sign);
    for i in 0..d * d {
        m[(i, i)] += Complex64::new(0.5, 0.0);
    }
    m
}

/// Permutation operator on the single space: `P |l> = |perm[l]>`.
pub fn permutation_op(perm: &[usize]) -> Result<CMat> {
    let d = perm.len();
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::InvalidPermutation { len: d });
        }
        seen[p] = true;
    }
    let mut m = CMat::zeros(d, d);
    for (l, &p) in perm.iter().enumerate() {
        m[(p, l)] = C_ONE;
    }
    Ok(m)
}

/// Numerical rank at a fixed absolute singular-value threshold.
pub fn rank(m: &CMat, tol: f64) -> usize {
    m.clone().svd(false, false).rank(tol)
}
