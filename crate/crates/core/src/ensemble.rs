//! The eigenvector ensemble of a fixed Hamiltonian: diagonalizer
//! construction, orbit sampling and enumeration, exact moment operators via
//! the analytic phase rule, the exact plateau operator with its Haar /
//! non-universal split, IPR, frame potential, and the diagonal-phase x
//! permutation reference ensemble.

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::haar::MomentOperator;
use crate::models::random_permutation;
use crate::stats::{stream_rng, EnsembleEstimate, RunningStats};
use crate::tensor::{
    swap_op, CMat, EigenSystem, HermitianOperator, MAX_TWOFOLD_DIM,
};

/// Permutations with more elements than this are not enumerated.
pub const ENUMERATION_CAP: usize = 8;

/// Seed diagonalizer: the unitary whose rows are conjugated eigenvectors,
/// <l|C|m> = <E_l|m>, so C H C^dagger = diag(E).
#[derive(Debug, Clone)]
pub struct Diagonalizer {
    c0: CMat,
    es: EigenSystem,
}

impl Diagonalizer {
    pub fn dim(&self) -> usize {
        self.es.dim()
    }

    pub fn c0(&self) -> &CMat {
        &self.c0
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.es
    }
}

/// One orbit member: C = diag(e^{i phi}) P_perm C0.
#[derive(Debug, Clone)]
pub struct CEnsembleSample {
    pub permutation: Vec<usize>,
    pub phases: Vec<f64>,
    pub c: CMat,
}

/// Exact plateau operator on the twofold space with its defining invariants.
#[derive(Debug, Clone)]
pub struct PlateauOperator {
    matrix: CMat,
    dimension: usize,
}

impl PlateauOperator {
    /// Wraps a candidate matrix after checking hermiticity, positivity,
    /// trace d, SWAP bi-invariance and equal partial traces.
    pub fn new(matrix: CMat, dimension: usize) -> Result<Self> {
        let n = dimension * dimension;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: n,
            });
        }
        let herm = crate::tensor::max_abs_diff(&matrix, &matrix.adjoint());
        if herm > 1e-10 {
            return Err(Error::NotHermitian {
                deviation: herm,
                tol: 1e-10,
            });
        }
        let tr = matrix.trace();
        if (tr.re - dimension as f64).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "plateau trace {} != d = {}",
                tr.re, dimension
            )));
        }
        // SWAP multiplication permutes rows (left) or columns (right);
        // check bi-invariance entrywise without forming the products
        let d = dimension;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let row = i * d + j;
                let swapped = j * d + i;
                for col in 0..d * d {
                    worst = worst.max((matrix[(swapped, col)] - matrix[(row, col)]).norm());
                    worst = worst.max((matrix[(col, swapped)] - matrix[(col, row)]).norm());
                }
            }
        }
        if worst > 1e-9 {
            return Err(Error::InvalidArgument(
                "plateau operator is not SWAP bi-invariant".into(),
            ));
        }
        Ok(Self { matrix, dimension })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Smallest eigenvalue; the operator is positive semidefinite up to
    /// numerical noise, so this should not drop below about -1e-10.
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = self.matrix.clone().symmetric_eigen();
        sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Builds the seed diagonalizer from an eigensystem. Degenerate spectra are
/// refused: the ensemble leaves intra-block rotations unspecified there.
pub fn build_diagonalizer(es: &EigenSystem) -> Result<Diagonalizer> {
    es.require_non_degenerate()?;
    let c0 = es.vectors.adjoint();
    Ok(Diagonalizer { c0, es: es.clone() })
}

/// Draws one orbit member with a uniform permutation and i.i.d. uniform
/// phases.
pub fn sample_c(dz: &Diagonalizer, rng: &mut impl Rng) -> CEnsembleSample {
    let d = dz.dim();
    let permutation = random_permutation(d, rng);
    let phases: Vec<f64> = (0..d)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let c = apply_orbit(dz.c0(), &permutation, &phases);
    CEnsembleSample {
        permutation,
        phases,
        c,
    }
}

/// diag(e^{i phi}) P_perm C0 without building the permutation matrix:
/// row k of the result is e^{i phi_k} times row perm^{-1}(k) of C0.
pub fn apply_orbit(c0: &CMat, perm: &[usize], phases: &[f64]) -> CMat {
    let d = c0.nrows();
    let mut out = CMat::zeros(d, d);
    for (src, &dst) in perm.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, phases[dst]);
        for j in 0..d {
            out[(dst, j)] = phase * c0[(src, j)];
        }
    }
    out
}

/// Residual of orbit membership: the largest off-diagonal entry of C H C+.
pub fn membership_residual(c: &CMat, h: &HermitianOperator) -> f64 {
    let m = c * h.matrix() * c.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Iterator over all d! permutation representatives of the orbit. Phase
/// averages are analytic and performed by the consumers below.
pub fn enumerate_orbit(dz: &Diagonalizer) -> Result<impl Iterator<Item = Vec<usize>>> {
    let d = dz.dim();
    if d > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            dim: d,
            cap: ENUMERATION_CAP,
        });
    }
    Ok((0..d).permutations(d))
}

/// Exact 2-moment operator <C (x) C+> by permutation enumeration with the
/// analytic phase rule (a monomial survives iff its phase index appears once
/// conjugated and once unconjugated).
pub fn moment2_enumerated(dz: &Diagonalizer) -> Result<MomentOperator> {
    let d = dz.dim();
    let c0 = dz.c0();
    let perms: Vec<Vec<usize>> = enumerate_orbit(dz)?.collect();
    let norm = 1.0 / perms.len() as f64;
    let mut m = CMat::zeros(d * d, d * d);
    // entry [(i,k),(j,l)] = <C_{ij} conj(C_{lk})>; the phase rule forces i = l
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                // l = i
                let mut acc = Complex64::new(0.0, 0.0);
                for perm in &perms {
                    // C = diag(phase) P C0: C_{i j} = phase_i C0[inv(i), j]
                    let src = perm.iter().position(|&p| p == i).expect("bijection");
                    acc += c0[(src, j)] * c0[(src, k)].conj();
                }
                m[(i * d + k, j * d + i)] = acc * norm;
            }
        }
    }
    Ok(MomentOperator {
        order: 2,
        dimension: d,
        matrix: m,
    })
}

/// Exact 4-moment operator <C (x) C (x) C+ (x) C+> by enumeration with the
/// analytic phase rule.
///
/// The entry [(r1 r2 r3 r4), (c1 c2 c3 c4)] averages the monomial
/// C_{r1 c1} C_{r2 c2} conj(C_{c3 r3}) conj(C_{c4 r4}); its phase factor is
/// e^{i(phi_{r1} + phi_{r2} - phi_{c3} - phi_{c4})}, so it survives iff
/// {r1, r2} = {c3, c4} as multisets, after which the permutation sum runs
/// over explicit seed-matrix entries.
pub fn moment4_enumerated(dz: &Diagonalizer) -> Result<MomentOperator> {
    let d = dz.dim();
    let dim = d * d * d * d;
    if dim > MAX_TWOFOLD_DIM * MAX_TWOFOLD_DIM {
        return Err(Error::DimensionCap {
            dim,
            cap: MAX_TWOFOLD_DIM * MAX_TWOFOLD_DIM,
        });
    }
    let c0 = dz.c0();
    let perms: Vec<Vec<usize>> = enumerate_orbit(dz)?.collect();
    let norm = 1.0 / perms.len() as f64;
    // inverse permutations once
    let invs: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0usize; d];
            for (i, &x) in p.iter().enumerate() {
                inv[x] = i;
            }
            inv
        })
        .collect();
    let mut m = CMat::zeros(dim, dim);
    for r1 in 0..d {
        for r2 in 0..d {
            // surviving (c3, c4) pairs: (r1, r2) and (r2, r1), once if equal
            let pairs: &[(usize, usize)] = if r1 == r2 {
                &[(r1, r1)]
            } else {
                &[(r1, r2), (r2, r1)]
            };
            for &(c3, c4) in pairs {
                for c1 in 0..d {
                    for c2 in 0..d {
                        for r3 in 0..d {
                            for r4 in 0..d {
                                let mut acc = Complex64::new(0.0, 0.0);
                                for inv in &invs {
                                    acc += c0[(inv[r1], c1)]
                                        * c0[(inv[r2], c2)]
                                        * c0[(inv[c3], r3)].conj()
                                        * c0[(inv[c4], r4)].conj();
                                }
                                let row = ((r1 * d + r2) * d + r3) * d + r4;
                                let col = ((c1 * d + c2) * d + c3) * d + c4;
                                m[(row, col)] += acc * norm;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(MomentOperator {
        order: 4,
        dimension: d,
        matrix: m,
    })
}

/// Orbit-enumerated right twofold channel: the exact average of
/// C+^(x)2 A C^(x)2 over the ensemble. The phase monomials of this
/// expression balance identically, so the average reduces to the
/// permutation average of explicit matrices.
pub fn right_channel_enumerated(dz: &Diagonalizer, a: &CMat) -> Result<CMat> {
    let d = dz.dim();
    if a.nrows() != d * d {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: d * d,
        });
    }
    let c0 = dz.c0();
    let zero_phases = vec![0.0; d];
    let mut acc = CMat::zeros(d * d, d * d);
    let mut count = 0usize;
    for perm in enumerate_orbit(dz)? {
        let c = apply_orbit(c0, &perm, &zero_phases);
        let c2 = crate::tensor::kron(&c, &c)?;
        acc += c2.adjoint() * a * c2;
        count += 1;
    }
    acc.scale_mut(1.0 / count as f64);
    Ok(acc)
}

/// Exact plateau operator G = sum_l |E_l E_l><E_l E_l| built from the
/// eigenvectors. Refuses degenerate spectra.
pub fn plateau_exact(es: &EigenSystem) -> Result<PlateauOperator> {
    es.require_non_degenerate()?;
    let d = es.dim();
    if d * d > MAX_TWOFOLD_DIM {
        return Err(Error::DimensionCap {
            dim: d * d,
            cap: MAX_TWOFOLD_DIM,
        });
    }
    // columns of M are the doubled eigenvectors v_l (x) v_l; G = M M+
    let mut m = CMat::zeros(d * d, d);
    for l in 0..d {
        let v = es.vectors.column(l);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + j, l)] = v[i] * v[j];
            }
        }
    }
    let g = &m * m.adjoint();
    PlateauOperator::new(g, d)
}

/// Splits G into the universal Haar part (I(x)I + SWAP)/(d+1) and the
/// non-universal remainder `G[H]`.
pub fn plateau_split(g: &PlateauOperator) -> (CMat, CMat) {
    let haar = crate::haar::haar_plateau(g.dimension());
    let rest = g.matrix() - &haar;
    (haar, rest)
}

/// Average inverse participation ratio (1/d) sum_{kl} |<k|E_l>|^4.
pub fn ipr_bar(dz: &Diagonalizer) -> f64 {
    let d = dz.dim();
    let c0 = dz.c0();
    let mut acc = 0.0;
    for l in 0..d {
        for k in 0..d {
            acc += c0[(l, k)].norm_sqr().powi(2);
        }
    }
    acc / d as f64
}

/// Printed closed form of the second frame potential,
/// F2 = 2 + ((d+1)/(d-1) (IPR_bar - 2/(d+1)))^2.
///
/// Kept as the documented formula; it disagrees with the exact value for
/// non-diagonal Hamiltonians (see `frame_potential2_exact`): the seed
/// diagonalizer cancels out of Tr(U+ V) by cyclicity, so the pair average
/// cannot depend on the eigenbasis at all.
pub fn frame_potential2(dz: &Diagonalizer) -> Result<f64> {
    let d = dz.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("d >= 2 required".into()));
    }
    let df = d as f64;
    let ipr = ipr_bar(dz);
    let dev = (df + 1.0) / (df - 1.0) * (ipr - 2.0 / (df + 1.0));
    Ok(2.0 + dev * dev)
}

/// Exact second frame potential of the orbit ensemble.
///
/// With U = diag(e^{i phi}) P_pi C0 and V = diag(e^{i psi}) P_tau C0, the
/// seed C0 cancels in Tr(U+ V) and the phase integral leaves
/// `E_sigma [2 fix(sigma)^2 - fix(sigma)]` over a uniform permutation.
/// `E[fix] = 1` and `E[fix^2] = 2` for every d >= 2, so F2 = 3 identically,
/// independent of the Hamiltonian.
pub fn frame_potential2_exact(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("d >= 2 required".into()));
    }
    Ok(3.0)
}

/// Monte-Carlo pair-sampled frame potential E |Tr U+ V|^4.
pub fn frame_potential2_mc(dz: &Diagonalizer, pairs: usize, seed: u64) -> EnsembleEstimate {
    let stats = (0..pairs)
        .into_par_iter()
        .fold(RunningStats::new, |mut st, k| {
            let mut rng = stream_rng(seed, 100 + k as u64);
            let u = sample_c(dz, &mut rng);
            let v = sample_c(dz, &mut rng);
            let tr = (u.c.adjoint() * &v.c).trace();
            st.push(tr.norm_sqr() * tr.norm_sqr());
            st
        })
        .reduce(RunningStats::new, RunningStats::merge);
    EnsembleEstimate::from_stats(stats, seed)
}

/// Brute-force frame potential by enumerating the permutation pair
/// structure with analytic phase integrals:
/// F2 = E_sigma (2 fix(sigma)^2 - fix(sigma)) with sigma = tau^{-1} pi.
/// Valid for every seed diagonalizer because C0 cancels in Tr(U+ V).
pub fn frame_potential2_bruteforce(d: usize) -> Result<f64> {
    if d > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            dim: d,
            cap: ENUMERATION_CAP,
        });
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for perm in (0..d).permutations(d) {
        let fix = perm.iter().enumerate().filter(|&(i, &p)| i == p).count() as f64;
        acc += 2.0 * fix * fix - fix;
        count += 1;
    }
    Ok(acc / count as f64)
}

/// Moment operators of the diagonal-phase x permutation reference ensemble.
///
/// k = 1 coincides with the Haar value SWAP/d. k = 2 is assembled from the
/// three surviving phase-balance sums with the subgroup-counting weights
/// (d-1)!/d! on coincident index pairs and (d-2)!/d! on distinct ones.
pub fn u1sd_moment(k: usize, d: usize) -> Result<MomentOperator> {
    if d < 2 {
        return Err(Error::InvalidArgument("d >= 2 required".into()));
    }
    match k {
        1 => {
            let mut m = swap_op(d);
            m.scale_mut(1.0 / d as f64);
            Ok(MomentOperator {
                order: 2,
                dimension: d,
                matrix: m,
            })
        }
        2 => {
            let dim = d * d * d * d;
            if dim > MAX_TWOFOLD_DIM * MAX_TWOFOLD_DIM {
                return Err(Error::DimensionCap {
                    dim,
                    cap: MAX_TWOFOLD_DIM * MAX_TWOFOLD_DIM,
                });
            }
            let df = d as f64;
            let w_same = 1.0 / df; // (d-1)!/d!
            let w_diff = if d >= 2 { 1.0 / (df * (df - 1.0)) } else { 0.0 }; // (d-2)!/d!
            let mut m = CMat::zeros(dim, dim);
            // sum over a = sigma(l), b = sigma(k) of
            //   |a b l k><l k a b|  (case s = l, m = k)
            // + |a b k l><l k b a|  (case s = k, m = l)
            // - |a a l l><l l a a|  (overlap correction)
            for l in 0..d {
                for k in 0..d {
                    for a in 0..d {
                        for b in 0..d {
                            let weight = if l == k {
                                if a == b {
                                    w_same
                                } else {
                                    continue;
                                }
                            } else if a != b {
                                w_diff
                            } else {
                                continue;
                            };
                            let w = Complex64::new(weight, 0.0);
                            let row1 = ((a * d + b) * d + l) * d + k;
                            let col1 = ((l * d + k) * d + a) * d + b;
                            m[(row1, col1)] += w;
                            let row2 = ((a * d + b) * d + k) * d + l;
                            let col2 = ((l * d + k) * d + b) * d + a;
                            m[(row2, col2)] += w;
                        }
                    }
                }
            }
            // overlap correction: l = k = s = m counted twice above
            for l in 0..d {
                for a in 0..d {
                    let row = ((a * d + a) * d + l) * d + l;
                    let col = ((l * d + l) * d + a) * d + a;
                    m[(row, col)] -= Complex64::new(w_same, 0.0);
                }
            }
            Ok(MomentOperator {
                order: 4,
                dimension: d,
                matrix: m,
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "u1sd_moment supports k in {{1, 2}}, got {k}"
        ))),
    }
}
