//! Spectral form factors, closed-form ensemble-averaged one- and two-point
//! functions, the diagonal ensemble, and level-spacing statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{plateau_exact, PlateauOperator};
use crate::error::{Error, Result};
use crate::haar::{
    check_dims, form_factor_infinite, form_factor_regulated, partition_real,
};
use crate::tensor::{kron, EigenSystem, HermitianOperator};

/// Which spectral form factor to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormFactorKind {
    /// |Z(it)|^2 = |Tr e^{itH}|^2.
    InfiniteT,
    /// |Z(beta/2 - it)|^2 with Z(u) = Tr e^{-uH}.
    FiniteT { beta: f64 },
    /// |Z_+(it)|^2 = (|Z|^4 + |Z(2it)|^2 + 2 Re[Z(it)^2 Z(-2it)])/4.
    TwofoldSym,
    /// |Z_-(it)|^2 = (|Z|^4 + |Z(2it)|^2 - 2 Re[Z(it)^2 Z(-2it)])/4.
    TwofoldAntisym,
}

/// Time series of a correlator with its formula id and parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub formula: String,
}

impl CorrelatorSeries {
    pub fn new(formula: impl Into<String>) -> Self {
        Self {
            times: Vec::new(),
            values: Vec::new(),
            formula: formula.into(),
        }
    }

    pub fn push(&mut self, t: f64, v: Complex64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidArgument(
                    "times must be strictly increasing".into(),
                ));
            }
        }
        self.times.push(t);
        self.values.push(v);
        Ok(())
    }
}

/// Spectral form factor of the given kind at time t.
pub fn form_factor(es: &EigenSystem, kind: FormFactorKind, t: f64) -> Result<f64> {
    match kind {
        FormFactorKind::InfiniteT => Ok(form_factor_infinite(es, t)),
        FormFactorKind::FiniteT { beta } => {
            if beta < 0.0 {
                return Err(Error::InvalidArgument("beta must be >= 0".into()));
            }
            Ok(form_factor_regulated(es, beta, t))
        }
        FormFactorKind::TwofoldSym => Ok(twofold_form_factor(es, t, 1.0)),
        FormFactorKind::TwofoldAntisym => Ok(twofold_form_factor(es, t, -1.0)),
    }
}

fn twofold_form_factor(es: &EigenSystem, t: f64, sign: f64) -> f64 {
    let z1: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, t * e))
        .sum();
    let z2: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, 2.0 * t * e))
        .sum();
    // |Z_pm|^2 = |(Z(it)^2 pm Z(2it))/2|^2
    let z = (z1 * z1 + z2 * sign) * Complex64::new(0.5, 0.0);
    z.norm_sqr()
}

/// Trapezoidal time average of the form factor over [0, t_max].
pub fn form_factor_time_average(
    es: &EigenSystem,
    kind: FormFactorKind,
    t_max: f64,
    n_steps: usize,
) -> Result<f64> {
    if n_steps < 1 || t_max <= 0.0 {
        return Err(Error::InvalidArgument(
            "need t_max > 0 and at least one step".into(),
        ));
    }
    let h = t_max / n_steps as f64;
    let mut acc = 0.5 * (form_factor(es, kind, 0.0)? + form_factor(es, kind, t_max)?);
    for k in 1..n_steps {
        acc += form_factor(es, kind, k as f64 * h)?;
    }
    Ok(acc * h / t_max)
}

/// Windowed trapezoidal average over [t0, t1]; used for late-time plateaus.
pub fn form_factor_window_average(
    es: &EigenSystem,
    kind: FormFactorKind,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<f64> {
    if n_steps < 1 || t1 <= t0 {
        return Err(Error::InvalidArgument("need t1 > t0".into()));
    }
    let h = (t1 - t0) / n_steps as f64;
    let mut acc = 0.5 * (form_factor(es, kind, t0)? + form_factor(es, kind, t1)?);
    for k in 1..n_steps {
        acc += form_factor(es, kind, t0 + k as f64 * h)?;
    }
    Ok(acc * h / (t1 - t0))
}

/// Tr(G (W x V)), the plateau contraction entering every closed form.
pub fn plateau_contraction(
    g: &PlateauOperator,
    w: &HermitianOperator,
    v: &HermitianOperator,
) -> Result<f64> {
    let wv = kron(w.matrix(), v.matrix())?;
    Ok((g.matrix() * wv).trace().re)
}

/// Ensemble-averaged infinite-temperature two-point function
///
/// ```text
///   <(1/d) Tr W(t) V> = (Tr(G W x V) - <WV>)/(d-1)
///                     + |Z(it)|^2 / ((d-1) d) (<WV> - Tr(G W x V)/d)
/// ```
pub fn c_two_point(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
) -> Result<f64> {
    let g = plateau_exact(es)?;
    c_two_point_with_plateau(w, v, es, &g, t)
}

/// Same closed form with a caller-supplied plateau operator (used to share
/// one G across a time series and to swap in the Haar plateau).
pub fn c_two_point_with_plateau(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    g: &PlateauOperator,
    t: f64,
) -> Result<f64> {
    let d = check_dims(w, v, es)? as f64;
    let mean_wv = (w.matrix() * v.matrix()).trace().re / d;
    let tg = plateau_contraction(g, w, v)?;
    let z2 = form_factor_infinite(es, t);
    Ok((tg - mean_wv) / (d - 1.0) + z2 / ((d - 1.0) * d) * (mean_wv - tg / d))
}

/// Thermally regulated finite-temperature two-point function
///
/// ```text
///   <Tr rho^{1/2} W(t) rho^{1/2} V> = (Tr(G W x V) - <WV>)/(d-1)
///       + |Z(beta/2 - it)|^2 / ((d-1) Z(beta)) (<WV> - Tr(G W x V)/d)
/// ```
pub fn c_two_point_regulated(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    beta: f64,
    t: f64,
) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::InvalidArgument("beta must be >= 0".into()));
    }
    let d = check_dims(w, v, es)? as f64;
    let g = plateau_exact(es)?;
    let mean_wv = (w.matrix() * v.matrix()).trace().re / d;
    let tg = plateau_contraction(&g, w, v)?;
    let zb = partition_real(es, beta);
    let ff = form_factor_regulated(es, beta, t);
    Ok((tg - mean_wv) / (d - 1.0) + ff / ((d - 1.0) * zb) * (mean_wv - tg / d))
}

/// Non-regulated ordering <Tr rho_beta W(t) V>: the regulated kernel
/// |Z(beta/2 - it)|^2 continues to Z(beta - it) Z(it), which is complex.
pub fn c_two_point_nonregulated(
    w: &HermitianOperator,
    v: &HermitianOperator,
    es: &EigenSystem,
    beta: f64,
    t: f64,
) -> Result<Complex64> {
    if beta < 0.0 {
        return Err(Error::InvalidArgument("beta must be >= 0".into()));
    }
    let d = check_dims(w, v, es)? as f64;
    let g = plateau_exact(es)?;
    let mean_wv = (w.matrix() * v.matrix()).trace().re / d;
    let tg = plateau_contraction(&g, w, v)?;
    let zb = partition_real(es, beta);
    // Z(beta - it) Z(it) with Z(u) = Tr e^{-uH}
    let za: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::new(-beta * e, t * e).exp())
        .sum();
    let zc: Complex64 = es
        .values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -t * e))
        .sum();
    let kernel = za * zc;
    Ok(Complex64::new((tg - mean_wv) / (d - 1.0), 0.0)
        + kernel / ((d - 1.0) * zb) * (mean_wv - tg / d))
}

/// Ensemble-averaged out-of-equilibrium expectation value `<Tr A(t) rho>`.
///
/// ```text
/// exact:   (d/(d-1)) (Tr(G A x rho) - <A>_rho / d)
///          + |Z(it)|^2/(d(d-1)) (<A>_rho - Tr(G A x rho))
/// large d: |Z|^2/d^2 <A>_rho + (1 - |Z|^2/d^2) Tr(G A x rho)
/// ```
pub fn out_eq_expectation(
    a: &HermitianOperator,
    rho: &HermitianOperator,
    es: &EigenSystem,
    t: f64,
    large_d: bool,
) -> Result<f64> {
    let g = plateau_exact(es)?;
    out_eq_expectation_with_plateau(a, rho, es, &g, t, large_d)
}

/// Same expectation value with a caller-supplied plateau operator, for
/// sharing one G across a time series.
pub fn out_eq_expectation_with_plateau(
    a: &HermitianOperator,
    rho: &HermitianOperator,
    es: &EigenSystem,
    g: &PlateauOperator,
    t: f64,
    large_d: bool,
) -> Result<f64> {
    let d = check_dims(a, rho, es)? as f64;
    let tr_rho = rho.matrix().trace().re;
    if (tr_rho - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("Tr rho = {tr_rho} != 1")));
    }
    let min_eig = rho
        .matrix()
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -1e-10 {
        return Err(Error::InvalidState(format!(
            "rho has negative eigenvalue {min_eig}"
        )));
    }
    let a_rho = (a.matrix() * rho.matrix()).trace().re;
    let tg = plateau_contraction(g, a, rho)?;
    let z2 = form_factor_infinite(es, t);
    if large_d {
        let w = z2 / (d * d);
        Ok(w * a_rho + (1.0 - w) * tg)
    } else {
        Ok(d / (d - 1.0) * (tg - a_rho / d) + z2 / (d * (d - 1.0)) * (a_rho - tg))
    }
}

/// Diagonal ensemble (1/d) sum_l <E_l|A|E_l>^2, the long-time average of
/// the two-point self-correlation.
pub fn diagonal_ensemble(a: &HermitianOperator, es: &EigenSystem) -> Result<f64> {
    let d = es.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: d,
        });
    }
    let in_eigen = es.vectors.adjoint() * a.matrix() * &es.vectors;
    let mut acc = 0.0;
    for l in 0..d {
        acc += in_eigen[(l, l)].re.powi(2);
    }
    Ok(acc / d as f64)
}

/// Predicted squared ETH off-diagonal function |f^A|^2 = <A^2> - (1/d) Tr(G A x A).
/// Non-negative for Hermitian A.
pub fn eth_f2(a: &HermitianOperator, es: &EigenSystem) -> Result<f64> {
    let d = es.dim() as f64;
    let mean_a2 = (a.matrix() * a.matrix()).trace().re / d;
    Ok(mean_a2 - diagonal_ensemble(a, es)?)
}

/// Consecutive-spacing ratios r_l = min(delta_l, delta_{l+1}) /
/// max(delta_l, delta_{l+1}) on the raw spacings, plus their mean.
pub fn spacing_ratios(es: &EigenSystem) -> Result<(Vec<f64>, f64)> {
    let d = es.dim();
    if d < 3 {
        return Err(Error::InvalidArgument("need d >= 3".into()));
    }
    es.require_non_degenerate()?;
    let gaps: Vec<f64> = es.values.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = gaps
        .windows(2)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok((ratios, mean))
}
