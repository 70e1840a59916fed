//! Ensemble volume (partition function), inversion duality, epsilon-ball
//! cardinality, entropy estimates and circuit-complexity lower bounds. All
//! arithmetic runs in the log domain: the factorials and Vandermonde
//! products overflow f64 far below the supported dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{stream_rng, EnsembleEstimate, RunningStats};
use crate::tensor::EigenSystem;
use rand_distr::{Distribution, StandardNormal};

/// Sign-carrying logarithm of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log_magnitude: f64,
    /// +1, -1 or 0; when 0 the magnitude is ignored.
    pub sign: i8,
}

impl LogValue {
    pub fn positive(log_magnitude: f64) -> Self {
        Self {
            log_magnitude,
            sign: 1,
        }
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.log_magnitude.exp(),
        }
    }
}

/// Universal gate set acting on N qubits with q-local gates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GateSetSpec {
    pub cardinality: usize,
    pub locality: usize,
    pub qubits: usize,
}

impl GateSetSpec {
    pub fn new(cardinality: usize, locality: usize, qubits: usize) -> Result<Self> {
        if cardinality == 0 || locality == 0 || qubits == 0 || locality > qubits {
            return Err(Error::InvalidArgument(
                "gate set needs positive counts and q <= N".into(),
            ));
        }
        Ok(Self {
            cardinality,
            locality,
            qubits,
        })
    }

    /// log(|G| * C(N, q)), the per-step choice count.
    pub fn log_choices(&self) -> f64 {
        (self.cardinality as f64).ln() + log_binomial(self.qubits, self.locality)
    }
}

fn log_binomial(n: usize, k: usize) -> f64 {
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// ln(n!) via the log-gamma function.
pub fn log_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Lanczos approximation of ln Gamma(x) for x > 0; |error| < 1e-13 over the
/// range used here.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().abs().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// log Vol(B_eps(m)) for an m-dimensional ball: (m/2) ln pi + m ln eps
/// - ln Gamma(m/2 + 1).
pub fn log_ball_volume(dim: usize, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let m = dim as f64;
    Ok(0.5 * m * std::f64::consts::PI.ln() + m * eps.ln() - ln_gamma(0.5 * m + 1.0))
}

/// log Vol(U(d)) = (d + C(d,2)) ln(2 pi) - sum_{l=1}^{d-1} ln l!.
pub fn log_unitary_group_volume(d: usize) -> f64 {
    let pairs = (d * (d - 1) / 2) as f64;
    let mut acc = (d as f64 + pairs) * (2.0 * std::f64::consts::PI).ln();
    for l in 1..d {
        acc -= log_factorial(l);
    }
    acc
}

/// log Vol(U(1)^d x S_d) = d ln(2 pi) + ln d!.
pub fn log_orbit_group_volume(d: usize) -> f64 {
    d as f64 * (2.0 * std::f64::consts::PI).ln() + log_factorial(d)
}

/// log of the squared Vandermonde: sum_{l<m} ln (E_m - E_l)^2, optionally
/// with differences scaled by the mean level spacing.
fn log_vandermonde_sq(values: &[f64], scale: f64) -> f64 {
    let mut acc = 0.0;
    for l in 0..values.len() {
        for m in l + 1..values.len() {
            acc += 2.0 * ((values[m] - values[l]) / scale).abs().ln();
        }
    }
    acc
}

/// Ensemble volume in the log domain.
///
/// Dimensionful: Vol = (prod_{l=1}^d l!) / pi^{C(d,2)} * Delta(H)^{-2}.
/// Normalized: the same expression with every difference divided by the
/// mean level spacing, i.e. the volume of H / mean_spacing.
pub fn log_volume(es: &EigenSystem, normalized: bool) -> Result<LogValue> {
    es.require_non_degenerate()?;
    let d = es.dim();
    let pairs = (d * (d - 1) / 2) as f64;
    let mut acc = -pairs * std::f64::consts::PI.ln();
    for l in 1..=d {
        acc += log_factorial(l);
    }
    let scale = if normalized { es.mean_spacing } else { 1.0 };
    acc -= log_vandermonde_sq(&es.values, scale);
    Ok(LogValue::positive(acc))
}

/// Residual of the inversion duality
/// |log Vol(H) - (log Vol(H^{-1}) - 2(d-1) log det H)| for positive spectra.
pub fn duality_check(es: &EigenSystem) -> Result<f64> {
    es.require_non_degenerate()?;
    let min = es.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { min });
    }
    let d = es.dim();
    let lhs = log_volume(es, false)?.log_magnitude;
    let mut inv_values: Vec<f64> = es.values.iter().map(|e| 1.0 / e).collect();
    inv_values.sort_by(f64::total_cmp);
    let es_inv = EigenSystem::from_values(inv_values)?;
    let log_det: f64 = es.values.iter().map(|e| e.ln()).sum();
    let rhs = log_volume(&es_inv, false)?.log_magnitude - 2.0 * (d as f64 - 1.0) * log_det;
    Ok((lhs - rhs).abs())
}

/// Which group volume regularizes the epsilon-counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalityKind {
    /// |E_C|_eps = Vol(U(d)) Vol_norm(H) / Vol(B_eps(d^2)).
    Ensemble,
    /// |U(d)|_eps = Vol(U(d)) / Vol(B_eps(d^2)).
    Haar,
    /// |E_{U(1)^d x S_d}|_eps = Vol(U(1)^d x S_d) / Vol(B_eps(d^2)).
    Orbit,
}

/// Epsilon-ball cardinality in the log domain. Uses the normalized
/// (mean-spacing-scaled) volume so the count is dimensionless.
pub fn cardinality(es: &EigenSystem, eps: f64) -> Result<LogValue> {
    let d = es.dim();
    let vol = log_volume(es, true)?.log_magnitude;
    let ball = log_ball_volume(d * d, eps)?;
    Ok(LogValue::positive(
        log_unitary_group_volume(d) + vol - ball,
    ))
}

/// Reference cardinalities for the Haar ensemble and the bare orbit group.
pub fn reference_cardinality(d: usize, eps: f64, kind: CardinalityKind) -> Result<LogValue> {
    let ball = log_ball_volume(d * d, eps)?;
    let log_vol = match kind {
        CardinalityKind::Haar => log_unitary_group_volume(d),
        CardinalityKind::Orbit => log_orbit_group_volume(d),
        CardinalityKind::Ensemble => {
            return Err(Error::InvalidArgument(
                "ensemble cardinality needs a spectrum; use cardinality()".into(),
            ))
        }
    };
    Ok(LogValue::positive(log_vol - ball))
}

/// Circuit-complexity lower bound log|E| / log(|G| C(N, q)).
pub fn complexity_bound(card_log: LogValue, gates: &GateSetSpec) -> Result<f64> {
    if card_log.sign <= 0 {
        return Err(Error::InvalidArgument(
            "cardinality must be positive".into(),
        ));
    }
    Ok(card_log.log_magnitude / gates.log_choices())
}

/// Frame-potential variant of the bound: (2k log d - log F_k) / log choices,
/// here for k = 2.
pub fn complexity_bound_frame_potential(
    d: usize,
    frame_potential2: f64,
    gates: &GateSetSpec,
) -> Result<f64> {
    if frame_potential2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "frame potential must be positive".into(),
        ));
    }
    Ok((4.0 * (d as f64).ln() - frame_potential2.ln()) / gates.log_choices())
}

/// n-th harmonic number H^{(n)} = sum_{k=1}^n 1/k.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Leading-order entropy estimate for a spectrum with level-spacing
/// variance sigma^2:
///
///   log|E_C| ~ C(d,2) ln 2 + log|E_{U(1)^d x S_d}|_eps
///            - 2 ln prod_{l<d} l^{d-l} + sigma^2 (d (H^{(d-1)} - 1) + 1).
pub fn entropy_estimate(d: usize, sigma_sq: f64, eps: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("d >= 2 required".into()));
    }
    if sigma_sq < 0.0 {
        return Err(Error::InvalidArgument("sigma^2 must be >= 0".into()));
    }
    let pairs = (d * (d - 1) / 2) as f64;
    let orbit = log_orbit_group_volume(d) - log_ball_volume(d * d, eps)?;
    // 2 ln prod l^{d-l} = 2 sum (d-l) ln l, identical to 2 ln prod_{l<d} l!
    let vandermonde: f64 = (1..d).map(|l| 2.0 * (d - l) as f64 * (l as f64).ln()).sum();
    let variance_term = sigma_sq * (d as f64 * (harmonic(d - 1) - 1.0) + 1.0);
    Ok(pairs * 2.0_f64.ln() + orbit - vandermonde + variance_term)
}

/// Spacing distribution for the direct log-Vandermonde sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacingDistribution {
    /// Unit-mean exponential: level clustering, sigma^2 = 1.
    Poisson,
    /// Unitary-class surmise (32/pi^2) s^2 e^{-4 s^2 / pi}: level repulsion,
    /// sigma^2 = 3 pi / 8 - 1.
    WignerDysonSurmise,
    /// Unit-mean Gamma distribution with the given variance.
    Custom { sigma_sq: f64 },
}

impl SpacingDistribution {
    pub fn variance(&self) -> f64 {
        match self {
            SpacingDistribution::Poisson => 1.0,
            SpacingDistribution::WignerDysonSurmise => 3.0 * std::f64::consts::PI / 8.0 - 1.0,
            SpacingDistribution::Custom { sigma_sq } => *sigma_sq,
        }
    }

    fn sample(&self, rng: &mut impl rand::Rng) -> f64 {
        match self {
            SpacingDistribution::Poisson => {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            }
            SpacingDistribution::WignerDysonSurmise => {
                // scaled chi(3): |3d standard normal| has density prop. to
                // x^2 e^{-x^2/2}; dividing by E|v| = sqrt(8/pi) gives the
                // unit-mean surmise density exactly
                let v: [f64; 3] = [
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                ];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                norm / (8.0 / std::f64::consts::PI).sqrt()
            }
            SpacingDistribution::Custom { sigma_sq } => {
                // Gamma(k, theta) with k = 1/sigma^2, theta = sigma^2
                let k = 1.0 / sigma_sq;
                let gamma = rand_distr::Gamma::new(k, *sigma_sq).expect("valid gamma");
                gamma.sample(rng)
            }
        }
    }
}

/// Direct Monte-Carlo of log Delta^2 = sum_{l<m} ln(sum_{k=l}^{m-1} s_k)^2
/// over sampled spacing sequences.
pub fn clt_log_vandermonde(
    dist: SpacingDistribution,
    d: usize,
    n_trials: usize,
    seed: u64,
) -> Result<EnsembleEstimate> {
    if n_trials == 0 || d < 2 {
        return Err(Error::InvalidArgument(
            "need trials >= 1 and d >= 2".into(),
        ));
    }
    if let SpacingDistribution::Custom { sigma_sq } = dist {
        if sigma_sq <= 0.0 {
            return Err(Error::InvalidArgument("sigma^2 must be positive".into()));
        }
    }
    let mut stats = RunningStats::new();
    for trial in 0..n_trials {
        let mut rng = stream_rng(seed, 1000 + trial as u64);
        let spacings: Vec<f64> = (0..d - 1).map(|_| dist.sample(&mut rng)).collect();
        stats.push(log_vandermonde_sq_from_spacings(&spacings));
    }
    Ok(EnsembleEstimate::from_stats(stats, seed))
}

/// log Delta^2 from a spacing sequence via cumulative sums.
pub fn log_vandermonde_sq_from_spacings(spacings: &[f64]) -> f64 {
    let d = spacings.len() + 1;
    let mut cum = Vec::with_capacity(d);
    cum.push(0.0);
    let mut acc = 0.0;
    for &s in spacings {
        acc += s;
        cum.push(acc);
    }
    let mut out = 0.0;
    for l in 0..d {
        for m in l + 1..d {
            out += 2.0 * (cum[m] - cum[l]).abs().ln();
        }
    }
    out
}
