//! Replica-space method: four-point correlators rewritten as two-point ones
//! on the twofold space, split over the symmetric and antisymmetric SWAP
//! eigenspaces, and the ensemble-averaged OTOC closed form built from the
//! projected plateau operators.

use num_complex::Complex64;

use crate::correlators::{form_factor, plateau_contraction, FormFactorKind};
use crate::ensemble::plateau_exact;
use crate::error::{Error, Result};
use crate::tensor::{
    eigh, kron, swap_op, CMat, EigenSystem, HermitianOperator, MAX_TWOFOLD_DIM,
};

/// Sign of the Kronecker-sum Hamiltonian on the replicated space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplicaSign {
    /// H (x) I + I (x) H, spectrum {E_l + E_m}.
    Plus,
    /// H (x) I - I (x) H, spectrum {E_l - E_m}.
    Minus,
}

/// Which SWAP eigenspace to project onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    /// Symmetric, dimension d(d+1)/2.
    Sym,
    /// Antisymmetric, dimension d(d-1)/2.
    Antisym,
}

/// Kronecker-sum Hamiltonian on the twofold space.
pub fn replica_hamiltonian(h: &HermitianOperator, sign: ReplicaSign) -> Result<HermitianOperator> {
    let d = h.dim();
    if d * d > MAX_TWOFOLD_DIM {
        return Err(Error::DimensionCap {
            dim: d * d,
            cap: MAX_TWOFOLD_DIM,
        });
    }
    let id = CMat::identity(d, d);
    let a = kron(h.matrix(), &id)?;
    let b = kron(&id, h.matrix())?;
    let m = match sign {
        ReplicaSign::Plus => a + b,
        ReplicaSign::Minus => a - b,
    };
    HermitianOperator::new(m, 1e-10)
}

/// Deterministic orthonormal basis of the chosen SWAP eigenspace, as a
/// d^2 x D isometry with columns ordered lexicographically in (l, m).
pub fn subspace_isometry(d: usize, which: Subspace) -> CMat {
    let inv_sqrt2 = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut cols: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for l in 0..d {
        for m in l..d {
            match which {
                Subspace::Sym => {
                    let mut v = nalgebra::DVector::zeros(d * d);
                    if l == m {
                        v[l * d + l] = one;
                    } else {
                        v[l * d + m] = inv_sqrt2;
                        v[m * d + l] = inv_sqrt2;
                    }
                    cols.push(v);
                }
                Subspace::Antisym => {
                    if l == m {
                        continue;
                    }
                    let mut v = nalgebra::DVector::zeros(d * d);
                    v[l * d + m] = inv_sqrt2;
                    v[m * d + l] = -inv_sqrt2;
                    cols.push(v);
                }
            }
        }
    }
    CMat::from_columns(&cols)
}

/// Compression B+ M B of a twofold-space operator onto the chosen SWAP
/// eigenspace.
pub fn project_subspace(m: &CMat, which: Subspace) -> Result<CMat> {
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
    let b = subspace_isometry(d, which);
    Ok(b.adjoint() * m * b)
}

/// Exact single-Hamiltonian OTOC (1/d) Tr(W(t) V W(t) V) via eigenbasis
/// phases.
pub fn otoc_direct(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
) -> Result<f64> {
    let d = crate::haar::check_dims(w, v, es)?;
    let u = &es.vectors;
    let w_e = u.adjoint() * w.matrix() * u;
    let v_e = u.adjoint() * v.matrix() * u;
    let phases: Vec<Complex64> = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, t * e))
        .collect();
    // W(t)_{lm} = e^{i(E_l - E_m)t} W_{lm} in the eigenbasis
    let mut tr = Complex64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let wt_ab = phases[a] * w_e[(a, b)] * phases[b].conj();
                    let wt_ce = phases[c] * w_e[(c, e)] * phases[e].conj();
                    tr += wt_ab * v_e[(b, c)] * wt_ce * v_e[(e, a)];
                }
            }
        }
    }
    Ok(tr.re / d as f64)
}

/// Everything fixed by H that the OTOC closed form reuses across times:
/// the projected Hamiltonians' eigensystems, their plateau operators, and
/// the compressed W-hat / (V-hat SWAP) operators.
pub struct OtocClosedForm {
    d: usize,
    es: EigenSystem,
    dims: [usize; 2],
    contractions: [f64; 2],
    tr_wvwv: f64,
    tr_wv_sq: f64,
}

impl OtocClosedForm {
    /// Precomputes the projected plateau data. Requires d >= 3 and
    /// non-degenerate projected spectra.
    pub fn new(
        w: &HermitianOperator,
        v: &HermitianOperator,
        es: &EigenSystem,
    ) -> Result<Self> {
        let d = crate::haar::check_dims(w, v, es)?;
        if d < 3 {
            return Err(Error::OtocDimensionTooSmall);
        }
        let h_eigen = HermitianOperator::from_diagonal(&es.values);
        // work in the eigenbasis of H: spectra and traces are basis-free
        let u = &es.vectors;
        let w_e = HermitianOperator::new(u.adjoint() * w.matrix() * u, 1e-8)?;
        let v_e = HermitianOperator::new(u.adjoint() * v.matrix() * u, 1e-8)?;
        let h_hat = replica_hamiltonian(&h_eigen, ReplicaSign::Plus)?;
        let w_hat = kron(w_e.matrix(), w_e.matrix())?;
        let v_hat_swap = kron(v_e.matrix(), v_e.matrix())? * swap_op(d);

        let mut dims = [0usize; 2];
        let mut contractions = [0.0f64; 2];
        for (slot, which) in [(0, Subspace::Sym), (1, Subspace::Antisym)] {
            let b = subspace_isometry(d, which);
            let h_sub = HermitianOperator::new(b.adjoint() * h_hat.matrix() * &b, 1e-8)?;
            let es_sub = eigh(&h_sub, 1e-11)?;
            es_sub.require_non_degenerate()?;
            let g_sub = plateau_exact(&es_sub)?;
            let w_sub = HermitianOperator::new(b.adjoint() * &w_hat * &b, 1e-8)?;
            // V-hat SWAP commutes with the projectors and is Hermitian on
            // the subspace (SWAP acts as +-1 there)
            let vs_sub = HermitianOperator::new(b.adjoint() * &v_hat_swap * &b, 1e-8)?;
            dims[slot] = h_sub.dim();
            contractions[slot] = plateau_contraction(&g_sub, &w_sub, &vs_sub)?;
        }

        let tr_wvwv = (w.matrix() * v.matrix() * w.matrix() * v.matrix()).trace().re;
        let tr_wv = (w.matrix() * v.matrix()).trace().re;
        Ok(Self {
            d,
            es: es.clone(),
            dims,
            contractions,
            tr_wvwv,
            tr_wv_sq: tr_wv * tr_wv,
        })
    }

    /// Ensemble-averaged <Tr W(t) V W(t) V> (unnormalized trace; equals
    /// Tr(WVWV) exactly at t = 0).
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let _ = self.d;
        let zp = form_factor(&self.es, FormFactorKind::TwofoldSym, t)?;
        let zm = form_factor(&self.es, FormFactorKind::TwofoldAntisym, t)?;
        let dp = self.dims[0] as f64;
        let dm = self.dims[1] as f64;
        let mut out = self.tr_wvwv / 2.0
            * (zp / (dp * (dp - 1.0)) + zm / (dm * (dm - 1.0))
                - 1.0 / (dp - 1.0)
                - 1.0 / (dm - 1.0));
        out += self.tr_wv_sq / 2.0
            * (zp / (dp * (dp - 1.0)) - zm / (dm * (dm - 1.0)) - 1.0 / (dp - 1.0)
                + 1.0 / (dm - 1.0));
        out += self.contractions[0] * (dp / (dp - 1.0) - zp / (dp * (dp - 1.0)));
        out += self.contractions[1] * (dm / (dm - 1.0) - zm / (dm * (dm - 1.0)));
        Ok(out)
    }

    /// Coefficient of the disconnected Tr(WV)^2 term; vanishes at t = 0.
    pub fn disconnected_coefficient(&self, t: f64) -> Result<f64> {
        let zp = form_factor(&self.es, FormFactorKind::TwofoldSym, t)?;
        let zm = form_factor(&self.es, FormFactorKind::TwofoldAntisym, t)?;
        let dp = self.dims[0] as f64;
        let dm = self.dims[1] as f64;
        Ok(
            (zp / (dp * (dp - 1.0)) - zm / (dm * (dm - 1.0)) - 1.0 / (dp - 1.0)
                + 1.0 / (dm - 1.0))
                / 2.0,
        )
    }

    pub fn subspace_dims(&self) -> (usize, usize) {
        (self.dims[0], self.dims[1])
    }
}

/// One-shot evaluation of the OTOC closed form.
pub fn otoc_closed_form(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
) -> Result<f64> {
    OtocClosedForm::new(w, v, es)?.evaluate(t)
}

/// How the squared commutator is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorMethod {
    /// Exact single-Hamiltonian evaluation via eigenbasis phases.
    Direct,
    /// Ensemble average: OTOC pieces from the closed form, ordered pieces
    /// from the two-point closed form applied to W^2, V^2.
    Ensemble,
}

/// Squared commutator C(t) = -<[W(t), V]^2>
///  = 2 Re <W(t)^2 V^2> - 2 Re <W(t) V W(t) V>.
pub fn square_commutator(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
    method: CommutatorMethod,
) -> Result<f64> {
    let d = crate::haar::check_dims(w, v, es)? as f64;
    match method {
        CommutatorMethod::Direct => {
            let u = &es.vectors;
            let dd = es.dim();
            let w_e = u.adjoint() * w.matrix() * u;
            let v_e = u.adjoint() * v.matrix() * u;
            let phases: Vec<Complex64> = es
                .values
                .iter()
                .map(|&e| Complex64::from_polar(1.0, t * e))
                .collect();
            let mut wt = CMat::zeros(dd, dd);
            for a in 0..dd {
                for b in 0..dd {
                    wt[(a, b)] = phases[a] * w_e[(a, b)] * phases[b].conj();
                }
            }
            let ordered = (&wt * &wt * &v_e * &v_e).trace().re / d;
            let otoc = (&wt * &v_e * &wt * &v_e).trace().re / d;
            Ok(2.0 * ordered - 2.0 * otoc)
        }
        CommutatorMethod::Ensemble => {
            let w2 = HermitianOperator::new(w.matrix() * w.matrix(), 1e-8)?;
            let v2 = HermitianOperator::new(v.matrix() * v.matrix(), 1e-8)?;
            let ordered = crate::correlators::c_two_point(&w2, &v2, es, t)?;
            let otoc = otoc_closed_form(w, v, es, t)? / d;
            Ok(2.0 * ordered - 2.0 * otoc)
        }
    }
}
