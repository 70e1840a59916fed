//! Bootstrap form of the plateau operator, the plateau equation and its
//! numerical solution.
//!
//! The bootstrap expresses a SWAP-bi-invariant, rotation-covariant twofold
//! operator with unit partial traces through a single traceless operator
//! function of the Hamiltonian. The plateau equation then imposes the
//! energy-dephasing identity Tr_1 G (H x I) = H on that family.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{kron, max_abs, swap_op, CMat, EigenSystem, HermitianOperator};

/// Traceless Hermitian operator entering the bootstrap form.
#[derive(Debug, Clone)]
pub struct PhiOperator {
    matrix: CMat,
}

impl PhiOperator {
    /// Accepts a Hermitian matrix and centers it (removes the trace part),
    /// matching the gauge in which the bootstrap is written.
    pub fn centered(matrix: CMat) -> Result<Self> {
        let op = HermitianOperator::new(matrix, 1e-9)?;
        let d = op.dim() as f64;
        let tr = op.matrix().trace();
        let centered = op.matrix() - CMat::identity(op.dim(), op.dim()) * (tr / d);
        Ok(Self { matrix: centered })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
}

/// Centered bootstrap form
///
///   G = [1/(d+1) + Tr(dphi^2)/((d+1)(d+2))] (I + SWAP)
///     + (dphi x dphi)(I + SWAP)
///     - (dphi^2/(d+2) x I + I x dphi^2/(d+2))(I + SWAP).
pub fn bootstrap_form(dphi: &PhiOperator) -> Result<CMat> {
    let d = dphi.dim();
    let df = d as f64;
    let id = CMat::identity(d, d);
    let p = CMat::identity(d * d, d * d) + swap_op(d);
    let phi2 = dphi.matrix() * dphi.matrix();
    let tr_phi2 = phi2.trace().re;
    let c = 1.0 / (df + 1.0) + tr_phi2 / ((df + 1.0) * (df + 2.0));
    let mut core = CMat::identity(d * d, d * d) * Complex64::new(c, 0.0);
    core += kron(dphi.matrix(), dphi.matrix())?;
    let phi2_scaled = phi2.scale(1.0 / (df + 2.0));
    core -= kron(&phi2_scaled, &id)?;
    core -= kron(&id, &phi2_scaled)?;
    Ok(core * p)
}

/// The uncentered variant exactly as printed in the source derivation,
/// including its first-power trace in the scalar coefficient. Kept for
/// comparison only: with a traceless phi it coincides with `bootstrap_form`;
/// with a trace part it is not gauge-invariant, which is the signature of
/// the misprint (the coefficient should carry (Tr phi)^2 + Tr(phi^2)).
pub fn bootstrap_form_printed(phi: &HermitianOperator) -> Result<CMat> {
    let d = phi.dim();
    let df = d as f64;
    let id = CMat::identity(d, d);
    let p = CMat::identity(d * d, d * d) + swap_op(d);
    let tr_phi = phi.matrix().trace().re;
    let phi2 = phi.matrix() * phi.matrix();
    let c = 1.0 / (df + 1.0) + (tr_phi + tr_phi * tr_phi) / ((df + 1.0) * (df + 2.0));
    let mut core = CMat::identity(d * d, d * d) * Complex64::new(c, 0.0);
    core += kron(phi.matrix(), phi.matrix())?;
    let corr = (phi2 + phi.matrix().scale(tr_phi)).scale(1.0 / (df + 2.0));
    core -= kron(&corr, &id)?;
    core -= kron(&id, &corr)?;
    Ok(core * p)
}

/// Max-norm residual of the plateau equation
///
///   dH [ d/(d+2) dphi^2 + Tr(dphi^2)/((d+2)(d+1)) - d/(d+1) ]
///   + dphi Tr(dphi dH) - Tr(dphi^2 dH)/(d+2) = 0.
pub fn plateau_residual(dphi: &PhiOperator, dh: &HermitianOperator) -> Result<f64> {
    let d = dphi.dim();
    if dh.dim() != d {
        return Err(Error::DimensionMismatch {
            left: dh.dim(),
            right: d,
        });
    }
    if dh.matrix().trace().norm() > 1e-9 * (max_abs(dh.matrix()).max(1.0)) {
        return Err(Error::InvalidArgument("dH must be traceless".into()));
    }
    let df = d as f64;
    let id = CMat::identity(d, d);
    let phi2 = dphi.matrix() * dphi.matrix();
    let tr_phi2 = phi2.trace().re;
    let bracket = phi2.scale(df / (df + 2.0))
        + id.scale(tr_phi2 / ((df + 2.0) * (df + 1.0)) - df / (df + 1.0));
    let tr_phi_dh = (dphi.matrix() * dh.matrix()).trace().re;
    let tr_phi2_dh = (&phi2 * dh.matrix()).trace().re;
    let lhs = dh.matrix() * bracket + dphi.matrix().scale(tr_phi_dh)
        - id.scale(tr_phi2_dh / (df + 2.0));
    Ok(max_abs(&lhs))
}

/// Centers a Hamiltonian: dH = H - Tr(H)/d.
pub fn center(h: &HermitianOperator) -> HermitianOperator {
    let d = h.dim();
    let tr = h.matrix().trace();
    let m = h.matrix() - CMat::identity(d, d) * (tr / d as f64);
    HermitianOperator::new(m, h.hermiticity_tol().max(1e-12)).expect("centering keeps hermiticity")
}

/// Closed-form qubit solution dphi = dH / sqrt(2 Tr dH^2).
pub fn solve_qubit(h: &HermitianOperator) -> Result<PhiOperator> {
    if h.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "qubit solver needs d = 2, got {}",
            h.dim()
        )));
    }
    let dh = center(h);
    let tr2 = (dh.matrix() * dh.matrix()).trace().re;
    if tr2 < 1e-24 {
        return Err(Error::InvalidArgument(
            "dH = 0: the plateau operator is the Haar one and phi is not determined".into(),
        ));
    }
    PhiOperator::centered(dh.matrix().scale(1.0 / (2.0 * tr2).sqrt()))
}

/// Convergence report for the Newton solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Residual of the least-squares initialization before polishing.
    pub initial_residual: f64,
}

/// Result of `solve_newton`: the solution candidate plus its report.
#[derive(Debug)]
pub struct NewtonSolution {
    pub dphi: PhiOperator,
    pub coefficients: Vec<f64>,
    pub report: SolverReport,
}

/// Solves the plateau equation in the power basis
/// dphi = sum_{l=1}^{d-1} alpha_l (dH^l - Tr(dH^l)/d) by damped Newton on
/// the residual projected onto the basis, starting from a least-squares fit
/// of the bootstrap form to the exact plateau operator.
///
/// Everything commutes with H, so the solve runs on eigenvalue vectors.
pub fn solve_newton(
    h: &HermitianOperator,
    es: &EigenSystem,
    max_iter: usize,
    tol: f64,
) -> Result<NewtonSolution> {
    es.require_non_degenerate()?;
    let d = h.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("d >= 2 required".into()));
    }
    // centered, scale-normalized eigenvalues for conditioning; the equation
    // is not scale-invariant, so the scale is restored at the end through
    // the basis itself (built from the raw centered eigenvalues)
    let mean: f64 = es.values.iter().sum::<f64>() / d as f64;
    let hvec: Vec<f64> = es.values.iter().map(|e| e - mean).collect();

    // power basis b_l = h^l - mean(h^l), l = 1..d-1, on eigenvalue vectors
    let basis = power_basis(&hvec, d);

    // least-squares initialization from the exact plateau structure
    let alpha0 = extract_alpha_least_squares(&hvec, &basis);
    let f0 = apply_basis(&basis, &alpha0);
    let initial_residual = residual_vector(&hvec, &f0).iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    let mut alpha = alpha0;
    let mut history = Vec::new();
    let mut best_alpha = alpha.clone();
    let mut best_res = initial_residual;
    history.push(initial_residual);

    let n = d - 1;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let f = apply_basis(&basis, &alpha);
        let r = project_residual(&basis, &residual_vector(&hvec, &f));
        let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();

        // forward-difference Jacobian in alpha space
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let step = 1e-6 * (1.0 + alpha[j].abs());
            let mut ap = alpha.clone();
            ap[j] += step;
            let fp = apply_basis(&basis, &ap);
            let rp = project_residual(&basis, &residual_vector(&hvec, &fp));
            for i in 0..n {
                jac[(i, j)] = (rp[i] - r[i]) / step;
            }
        }
        let rhs = nalgebra::DVector::from_vec(r.clone());
        let delta = match jac.clone().lu().solve(&rhs) {
            Some(x) => x,
            None => break,
        };
        // backtracking damped update
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = alpha
                .iter()
                .zip(delta.iter())
                .map(|(a, dx)| a - lambda * dx)
                .collect();
            let ft = apply_basis(&basis, &trial);
            let rt = project_residual(&basis, &residual_vector(&hvec, &ft));
            let rt_norm = rt.iter().map(|x| x * x).sum::<f64>().sqrt();
            if rt_norm < rnorm {
                alpha = trial;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        let f_now = apply_basis(&basis, &alpha);
        let full_res = residual_vector(&hvec, &f_now)
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        history.push(full_res);
        if full_res < best_res {
            best_res = full_res;
            best_alpha = alpha.clone();
        }
        if full_res <= tol {
            break;
        }
        if !improved {
            break;
        }
    }

    // assemble dphi = sum alpha_l (dH^l - tr/d) as a matrix in the original basis
    let f_best = apply_basis(&basis, &best_alpha);
    let mut dphi_eigen = CMat::zeros(d, d);
    for l in 0..d {
        dphi_eigen[(l, l)] = Complex64::new(f_best[l], 0.0);
    }
    let dphi_matrix = &es.vectors * dphi_eigen * es.vectors.adjoint();
    let dphi = PhiOperator::centered(dphi_matrix)?;
    let converged = best_res <= tol;
    Ok(NewtonSolution {
        dphi,
        coefficients: best_alpha,
        report: SolverReport {
            iterations,
            residual: best_res,
            residual_history: history,
            converged,
            initial_residual,
        },
    })
}

/// Plateau-equation left-hand side on eigenvalue vectors: everything
/// commutes, so the operator equation becomes d scalar equations.
fn residual_vector(h: &[f64], f: &[f64]) -> Vec<f64> {
    let d = h.len() as f64;
    let s2: f64 = f.iter().map(|x| x * x).sum();
    let a: f64 = f.iter().zip(h).map(|(x, y)| x * y).sum();
    let b: f64 = f.iter().zip(h).map(|(x, y)| x * x * y).sum();
    h.iter()
        .zip(f)
        .map(|(&hi, &fi)| {
            hi * (d / (d + 2.0) * fi * fi + s2 / ((d + 2.0) * (d + 1.0)) - d / (d + 1.0))
                + fi * a
                - b / (d + 2.0)
        })
        .collect()
}

fn power_basis(h: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut basis = Vec::with_capacity(d - 1);
    let mut cur: Vec<f64> = vec![1.0; d];
    for _ in 1..d {
        for (c, &x) in cur.iter_mut().zip(h) {
            *c *= x;
        }
        let mean: f64 = cur.iter().sum::<f64>() / d as f64;
        basis.push(cur.iter().map(|c| c - mean).collect());
    }
    basis
}

fn apply_basis(basis: &[Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    let d = basis[0].len();
    let mut f = vec![0.0; d];
    for (b, &a) in basis.iter().zip(alpha) {
        for (fi, &bi) in f.iter_mut().zip(b) {
            *fi += a * bi;
        }
    }
    f
}

fn project_residual(basis: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    basis
        .iter()
        .map(|b| b.iter().zip(r).map(|(x, y)| x * y).sum())
        .collect()
}

/// Least-squares fit of the bootstrap structure to the exact plateau
/// operator, on eigenvalue vectors. In the eigenbasis the exact G is the
/// s-tensor, and the bootstrap matrix elements only involve
/// c + f_l f_m - (f_l^2 + f_m^2)/(d+2) (off-diagonal pairs) and
/// 2c + 2 f_l^2 d/(d+2) (diagonal), with c = 1/(d+1) + S2/((d+1)(d+2)).
/// Gauss-Newton on those residuals in alpha space.
fn extract_alpha_least_squares(h: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let d = h.len();
    let n = d - 1;
    // residuals of bootstrap(f) - s_tensor over the (l <= m) pairs
    let reconstruction = |alpha: &[f64]| -> Vec<f64> {
        let f = apply_basis(basis, alpha);
        let df = d as f64;
        let s2: f64 = f.iter().map(|x| x * x).sum();
        let c = 1.0 / (df + 1.0) + s2 / ((df + 1.0) * (df + 2.0));
        let mut out = Vec::with_capacity(d * (d + 1) / 2);
        for l in 0..d {
            for m in l..d {
                if l == m {
                    out.push(2.0 * c + 2.0 * f[l] * f[l] * df / (df + 2.0) - 1.0);
                } else {
                    out.push(c + f[l] * f[m] - (f[l] * f[l] + f[m] * f[m]) / (df + 2.0));
                }
            }
        }
        out
    };
    let m_res = d * (d + 1) / 2;
    let mut alpha = vec![0.0; n];
    // deterministic nonzero start along the linear term
    let norm1: f64 = basis[0].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm1 > 0.0 {
        alpha[0] = 0.5 / norm1 * (d as f64).sqrt();
    }
    for _ in 0..200 {
        let r = reconstruction(&alpha);
        let rnorm: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut jac = nalgebra::DMatrix::<f64>::zeros(m_res, n);
        for j in 0..n {
            let step = 1e-7 * (1.0 + alpha[j].abs());
            let mut ap = alpha.clone();
            ap[j] += step;
            let rp = reconstruction(&ap);
            for i in 0..m_res {
                jac[(i, j)] = (rp[i] - r[i]) / step;
            }
        }
        // Gauss-Newton step via normal equations with a small ridge
        let jt = jac.transpose();
        let mut jtj = &jt * &jac;
        for i in 0..n {
            jtj[(i, i)] += 1e-12;
        }
        let jtr = jt * nalgebra::DVector::from_vec(r.clone());
        let delta = match jtj.lu().solve(&jtr) {
            Some(x) => x,
            None => break,
        };
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..20 {
            let trial: Vec<f64> = alpha
                .iter()
                .zip(delta.iter())
                .map(|(a, dx)| a - lambda * dx)
                .collect();
            let rt = reconstruction(&trial);
            let rt_norm: f64 = rt.iter().map(|x| x * x).sum::<f64>().sqrt();
            if rt_norm < rnorm {
                alpha = trial;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
        if delta.iter().map(|x| x.abs()).fold(0.0f64, f64::max) < 1e-14 {
            break;
        }
    }
    alpha
}
