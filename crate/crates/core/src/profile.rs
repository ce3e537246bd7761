//! Scoring probabilistic forecasts on the probability scale.
//!
//! The input is not a distribution: it is the list of probabilities the
//! forecaster assigned to the events that actually happened, one per trial.
//! The classical log score is the mean surprisal `-(1/N) sum ln p_i`; its
//! probability-domain counterpart is the unweighted generalized mean
//!
//! ```text
//! profile_point(p, r) = ((1/N) sum p_i^r)^{1/r}
//! ```
//!
//! (geometric mean at `r = 0`), which equals `exp_r` of the negated
//! generalized surprisal wherever that deformed pair is defined. Sweeping the
//! risk bias `r` traces a Risk Profile; three named points summarize it:
//! decisiveness (`r = 1`, arithmetic mean), accuracy (`r = 0`, geometric
//! mean), and robustness (`r = -2/3`). Equal weighting is not a convenience
//! but an identity: the coupled reweighting of a uniform vector is uniform at
//! every `r`, which [`equal_weight_reduction_check`] codifies.
//!
//! A single zero forecast drives every point with `r <= 0` to exactly zero
//! and saturates surprisal to infinity. Nothing here floors probabilities
//! silently; [`ForecastSet::with_floor`] exists for exploratory use only.

use crate::coupled::gen_log;
use crate::error::{Error, Result};
use crate::metrics::{coupled_probability, weighted_gen_mean, ProbDistribution, WeightVector};

/// Risk bias of the decisiveness point (arithmetic mean).
pub const DECISIVENESS_R: f64 = 1.0;
/// Risk bias of the accuracy point (geometric mean).
pub const ACCURACY_R: f64 = 0.0;
/// Risk bias of the robustness point.
pub const ROBUSTNESS_R: f64 = -2.0 / 3.0;

/// Probabilities assigned to realized events, one per forecast trial.
///
/// Values lie in [0, 1] but need not sum to anything: they are test samples,
/// not a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSet {
    probs: Vec<f64>,
}

impl ForecastSet {
    /// Requires at least one probability, each finite and in [0, 1].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty);
        }
        for &p in &probs {
            if !p.is_finite() {
                return Err(Error::NonFinite("forecast probability"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::OutOfRange("forecast probability outside [0, 1]"));
            }
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Count of exact-zero forecasts.
    pub fn n_zero(&self) -> usize {
        self.probs.iter().filter(|&&p| p == 0.0).count()
    }

    /// Copy with every probability raised to at least `floor`.
    ///
    /// Exploratory use only: flooring hides the zero-probability penalty that
    /// the robustness and accuracy metrics are designed to expose, so no
    /// scoring path applies it implicitly.
    pub fn with_floor(&self, floor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&floor) {
            return Err(Error::Parameter("floor must lie in [0, 1)"));
        }
        Self::new(self.probs.iter().map(|&p| p.max(floor)).collect())
    }
}

/// The three named profile points plus the zero-forecast count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    /// Arithmetic mean of the realized probabilities (r = 1).
    pub decisiveness: f64,
    /// Geometric mean (r = 0).
    pub accuracy: f64,
    /// Generalized mean at r = -2/3.
    pub robustness: f64,
    pub n_zero: usize,
}

/// A Risk Profile: `(r, profile_point)` pairs over an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfileCurve {
    points: Vec<(f64, f64)>,
}

impl RiskProfileCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Mean surprisal `-(1/N) sum ln p_i` in nats.
///
/// Any zero forecast saturates the score to `f64::INFINITY`; the saturation
/// is a defined result, never approximated by a large finite number.
pub fn surprisal(fs: &ForecastSet) -> f64 {
    let mut sum = 0.0;
    for &p in fs.probs() {
        if p == 0.0 {
            return f64::INFINITY;
        }
        sum -= p.ln();
    }
    sum / fs.len() as f64
}

/// Mean generalized surprisal `-(1/N) sum ln_r p_i` for `r > -1`.
///
/// Reduces to [`surprisal`] at `r = 0`. A zero forecast saturates to infinity
/// for `r <= 0` but contributes the finite limit `(1+r)/r` for `r > 0`.
pub fn generalized_surprisal(fs: &ForecastSet, r: f64) -> Result<f64> {
    if !r.is_finite() || r <= -1.0 {
        return Err(Error::Parameter("generalized surprisal requires r > -1"));
    }
    let mut sum = 0.0;
    for &p in fs.probs() {
        if p == 0.0 && r <= 0.0 {
            return Ok(f64::INFINITY);
        }
        sum -= gen_log(p, r)?;
    }
    Ok(sum / fs.len() as f64)
}

/// Unweighted generalized mean of the forecast set at risk bias `r`.
///
/// Defined for every finite `r` via the direct power-mean form (the deformed
/// exp/log route would require `r > -1`). A zero forecast forces the value to
/// exactly 0 for all `r <= 0`.
pub fn profile_point(fs: &ForecastSet, r: f64) -> Result<f64> {
    let w = WeightVector::uniform(fs.len())?;
    weighted_gen_mean(&w, fs.probs(), r)
}

/// Decisiveness, accuracy, and robustness of a forecast set.
pub fn metric_summary(fs: &ForecastSet) -> Result<MetricSummary> {
    Ok(MetricSummary {
        decisiveness: profile_point(fs, DECISIVENESS_R)?,
        accuracy: profile_point(fs, ACCURACY_R)?,
        robustness: profile_point(fs, ROBUSTNESS_R)?,
        n_zero: fs.n_zero(),
    })
}

/// Evaluates the profile over a strictly increasing risk-bias grid.
pub fn profile_curve(fs: &ForecastSet, r_grid: &[f64]) -> Result<RiskProfileCurve> {
    if r_grid.is_empty() {
        return Err(Error::Empty);
    }
    if r_grid.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("risk bias grid"));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("risk bias grid must be strictly increasing"));
    }
    let points = r_grid
        .iter()
        .map(|&r| Ok((r, profile_point(fs, r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskProfileCurve { points })
}

/// Default grid: -1 to 1 in steps of 0.1 with the robustness point -2/3
/// spliced in, 22 points total; the named points {-2/3, 0, 1} are exact.
pub fn default_r_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (-10..=10).map(|i| i as f64 / 10.0).collect();
    grid.insert(4, ROBUSTNESS_R); // between -0.7 and -0.6
    grid
}

/// Reweights the uniform distribution over `n` by the coupled probability at
/// `r` and checks it comes back uniform, the identity that justifies scoring
/// forecasts with plain unweighted means.
pub fn equal_weight_reduction_check(n: usize, r: f64) -> Result<ProbDistribution> {
    let uniform = ProbDistribution::uniform(n)?;
    let reweighted = coupled_probability(&uniform, r)?;
    if reweighted != uniform {
        return Err(Error::Domain("uniform forecasts did not reweight to uniform"));
    }
    Ok(reweighted)
}
