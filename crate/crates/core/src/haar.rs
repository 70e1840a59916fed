//! Haar-ensemble reference quantities: unitary Weingarten functions (exact
//! rationals, n <= 4), 2- and 4-moment operators, the twofold channel, the
//! Haar plateau operator, Haar-averaged two-point functions and a Haar
//! sampler.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::stats::stream_rng;
use crate::tensor::{swap_op, CMat, EigenSystem, HermitianOperator, MAX_TWOFOLD_DIM};

/// Partition of n labelling a symmetric-group conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    /// Builds from cycle lengths; sorts descending.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(
                "cycle type needs positive parts".into(),
            ));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// Cycle type of a permutation given as images (`perm[i] = sigma(i)`).
    pub fn of_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn order(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
}

type Rat = Ratio<i128>;

/// Unitary Weingarten function for cycle types of order n <= 4, as an exact
/// rational in d. Poles at small d are refused.
pub fn weingarten(sigma: &CycleType, d: usize) -> Result<Rat> {
    let n = sigma.order();
    if n > 4 {
        return Err(Error::WeingartenOrder { n });
    }
    // all denominators below are products of d^2 - j^2 for j < n
    if d < n {
        return Err(Error::WeingartenPole { d, n });
    }
    let dd = Rat::from_integer(d as i128);
    let d2 = dd * dd;
    let one = Rat::from_integer(1);
    let v = match sigma.parts() {
        [1] => one / dd,
        [2] => -one / (dd * (d2 - 1)),
        [1, 1] => one / (d2 - 1),
        [3] => Rat::from_integer(2) / (dd * (d2 - 1) * (d2 - 4)),
        [2, 1] => -one / ((d2 - 1) * (d2 - 4)),
        [1, 1, 1] => (d2 - 2) / (dd * (d2 - 1) * (d2 - 4)),
        [4] => Rat::from_integer(-5) * dd / (d2 * (d2 - 1) * (d2 - 4) * (d2 - 9)),
        [3, 1] => (Rat::from_integer(2) * d2 - 3) / (d2 * (d2 - 1) * (d2 - 4) * (d2 - 9)),
        [2, 2] => (d2 + 6) / (d2 * (d2 - 1) * (d2 - 4) * (d2 - 9)),
        [2, 1, 1] => (-dd * dd * dd + Rat::from_integer(4) * dd)
            / (d2 * (d2 - 1) * (d2 - 4) * (d2 - 9)),
        [1, 1, 1, 1] => (d2 * d2 - Rat::from_integer(8) * d2 + 6)
            / (d2 * (d2 - 1) * (d2 - 4) * (d2 - 9)),
        _ => unreachable!("partitions of n <= 4 are covered"),
    };
    Ok(v)
}

/// Weingarten value as f64.
pub fn weingarten_f64(sigma: &CycleType, d: usize) -> Result<f64> {
    let r = weingarten(sigma, d)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// 2k-moment operator <U^(x)k (x) U+^(x)k> on d^(2k).
#[derive(Debug, Clone)]
pub struct MomentOperator {
    pub order: usize,
    pub dimension: usize,
    pub matrix: CMat,
}

/// Haar moment operator for k in {1, 2}.
///
/// k = 1 gives SWAP/d; k = 2 is assembled from the n = 2 Weingarten sum over
/// S2 x S2.
pub fn haar_moment(k: usize, d: usize) -> Result<MomentOperator> {
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
            let dim = d.checked_mul(d).and_then(|x| x.checked_mul(x)).ok_or(
                Error::DimensionCap {
                    dim: usize::MAX,
                    cap: MAX_TWOFOLD_DIM,
                },
            )?;
            if dim > MAX_TWOFOLD_DIM {
                return Err(Error::DimensionCap {
                    dim,
                    cap: MAX_TWOFOLD_DIM,
                });
            }
            let wg_same = weingarten_f64(&CycleType::new(vec![1, 1])?, d)?;
            let wg_diff = weingarten_f64(&CycleType::new(vec![2])?, d)?;
            let mut m = CMat::zeros(dim, dim);
            // row multi-index (a1 a2 a3 a4), column (b1 b2 b3 b4) for
            // <a|U x U x U+ x U+|b>; S2 x S2 delta pattern from the
            // Weingarten formula with rows of the U's paired against
            // columns of the U+'s and vice versa.
            let perms: [[usize; 2]; 2] = [[0, 1], [1, 0]];
            for a1 in 0..d {
                for a2 in 0..d {
                    for a3 in 0..d {
                        for a4 in 0..d {
                            let row = ((a1 * d + a2) * d + a3) * d + a4;
                            for sigma in &perms {
                                // delta(a1 = b_{3+sigma(0)}), delta(a2 = b_{3+sigma(1)})
                                for tau in &perms {
                                    // columns b1, b2 tied to (a3, a4) via tau
                                    let b1 = [a3, a4][tau[0]];
                                    let b2 = [a3, a4][tau[1]];
                                    // rows b3, b4 tied to (a1, a2) via sigma
                                    let mut b34 = [0usize; 2];
                                    b34[sigma[0]] = a1;
                                    b34[sigma[1]] = a2;
                                    let col = ((b1 * d + b2) * d + b34[0]) * d + b34[1];
                                    let w = if sigma == tau { wg_same } else { wg_diff };
                                    m[(row, col)] += Complex64::new(w, 0.0);
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
        _ => Err(Error::InvalidArgument(format!(
            "haar_moment supports k in {{1, 2}}, got {k}"
        ))),
    }
}

/// Pairs one upper replica with one lower one: the unitarity contraction
/// `sum_{m,n} Phi4[(r1, n, m, r4), (c1, m, n, c4)]`, which must equal
/// `d * Phi2[(r1, r4), (c1, c4)]` for any ensemble 4-moment.
pub fn unitarity_contraction(phi4: &MomentOperator) -> CMat {
    let d = phi4.dimension;
    let mut out = CMat::zeros(d * d, d * d);
    for r1 in 0..d {
        for r4 in 0..d {
            for c1 in 0..d {
                for c4 in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in 0..d {
                        for m in 0..d {
                            let row = ((r1 * d + n) * d + m) * d + r4;
                            let col = ((c1 * d + m) * d + n) * d + c4;
                            acc += phi4.matrix[(row, col)];
                        }
                    }
                    out[(r1 * d + r4, c1 * d + c4)] = acc;
                }
            }
        }
    }
    out
}

/// Right twofold channel A -> <U+^(x)2 A U^(x)2> evaluated by contracting a
/// 4-moment operator. Works for any ensemble's 4-moment in the
/// U x U x U+ x U+ index convention.
pub fn right_channel_from_moment(phi4: &MomentOperator, a: &CMat) -> CMat {
    let d = phi4.dimension;
    assert_eq!(a.nrows(), d * d, "operand must live on the twofold space");
    let mut out = CMat::zeros(d * d, d * d);
    // [Phi_R(A)]_{(ab),(ce)} = sum_{lmpq} Phi4[(p q a b), (c e l m)] A[(l m), (p q)]
    for aa in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..d {
                        for m in 0..d {
                            let alm = a.row(l * d + m);
                            for p in 0..d {
                                for q in 0..d {
                                    let row = ((p * d + q) * d + aa) * d + b;
                                    let col = ((cc * d + e) * d + l) * d + m;
                                    let w = phi4.matrix[(row, col)];
                                    if w != Complex64::new(0.0, 0.0) {
                                        acc += w * alm[p * d + q];
                                    }
                                }
                            }
                        }
                    }
                    out[(aa * d + b, cc * d + e)] = acc;
                }
            }
        }
    }
    out
}

/// Haar twofold channel in closed form:
/// Phi2(A) = alpha(A) I(x)I + beta(A) SWAP with the coefficients fixed by
/// trace preservation.
pub fn haar_twofold_channel(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::NotSquareFactorable { dim: n });
    }
    let df = d as f64;
    let sw = swap_op(d);
    let tr_a: Complex64 = a.trace();
    let tr_swap_a: Complex64 = (&sw * a).trace();
    let denom = df * df - 1.0;
    let alpha = (tr_a - tr_swap_a / df) / denom;
    let beta = (tr_swap_a - tr_a / df) / denom;
    Ok(CMat::identity(n, n) * alpha + sw * beta)
}

/// Haar plateau operator G = (I(x)I + SWAP)/(d+1).
pub fn haar_plateau(d: usize) -> CMat {
    let mut g = swap_op(d);
    for i in 0..d * d {
        g[(i, i)] += Complex64::new(1.0, 0.0);
    }
    g.scale_mut(1.0 / (d as f64 + 1.0));
    g
}

/// Infinite-temperature Haar-averaged two-point function
/// `<(1/d) Tr W(t) V> = <W><V> + (|Z(it)|^2 - 1)/(d^2 - 1) (<WV> - <W><V>)`.
pub fn haar_two_point(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
) -> Result<f64> {
    let d = check_dims(w, v, es)?;
    let df = d as f64;
    let mean_w = w.matrix().trace().re / df;
    let mean_v = v.matrix().trace().re / df;
    let mean_wv = (w.matrix() * v.matrix()).trace().re / df;
    let z2 = form_factor_infinite(es, t);
    Ok(mean_w * mean_v + (z2 - 1.0) / (df * df - 1.0) * (mean_wv - mean_w * mean_v))
}

/// Thermally regulated Haar two-point function
/// `<Tr rho^{1/2} W(t) rho^{1/2} V>` with the finite-temperature form
/// factor `|Z(beta/2 - it)|^2`.
pub fn haar_two_point_regulated(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    beta: f64,
    t: f64,
) -> Result<f64> {
    let d = check_dims(w, v, es)?;
    let df = d as f64;
    if beta < 0.0 {
        return Err(Error::InvalidArgument("beta must be >= 0".into()));
    }
    let mean_w = w.matrix().trace().re / df;
    let mean_v = v.matrix().trace().re / df;
    let mean_wv = (w.matrix() * v.matrix()).trace().re / df;
    let zb = partition_real(es, beta);
    let ff = form_factor_regulated(es, beta, t);
    let coeff = ff * df / (zb * (df * df - 1.0)) - 1.0 / (df * df - 1.0);
    Ok(mean_w * mean_v + coeff * (mean_wv - mean_w * mean_v))
}

/// Haar sample via complex Ginibre + QR with the phases of the R diagonal
/// absorbed into Q.
pub fn haar_sample(d: usize, seed: u64) -> Result<CMat> {
    if d == 0 {
        return Err(Error::InvalidArgument("d >= 1 required".into()));
    }
    let mut rng = stream_rng(seed, 7);
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

pub(crate) fn check_dims(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
) -> Result<usize> {
    let d = es.dim();
    if w.dim() != d {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: d,
        });
    }
    if v.dim() != d {
        return Err(Error::DimensionMismatch {
            left: v.dim(),
            right: d,
        });
    }
    Ok(d)
}

/// |Z(it)|^2 = |sum_l e^{i t E_l}|^2.
pub(crate) fn form_factor_infinite(es: &EigenSystem, t: f64) -> f64 {
    let z: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, t * e))
        .sum();
    z.norm_sqr()
}

/// |Z(beta/2 - it)|^2 with Z(u) = Tr e^{-u H}.
pub(crate) fn form_factor_regulated(es: &EigenSystem, beta: f64, t: f64) -> f64 {
    let z: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::new(-0.5 * beta * e, t * e).exp())
        .sum();
    z.norm_sqr()
}

/// Z(beta) = sum_l e^{-beta E_l}.
pub(crate) fn partition_real(es: &EigenSystem, beta: f64) -> f64 {
    es.values.iter().map(|&e| (-beta * e).exp()).sum()
}
