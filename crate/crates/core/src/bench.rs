//! Synthetic classification benchmark scored with the Risk Profile.
//!
//! A source emits independent unit-variance Gaussian features; class `c` is
//! offset by `c * class_separation` on every feature. Per trial, a classifier
//! learns per-class, per-dimension sample means and variances from a small
//! training set and models each class as a diagonal multivariate coupled
//! Gaussian with a configurable tail power `model_r_D` (0 is the plain
//! Gaussian). Test samples are scored by their posterior probability of the
//! class that actually occurred; those realized probabilities form the
//! [`ForecastSet`] whose summary metrics and profile curve the sweep reports
//! per dimension count.
//!
//! The sweep exposes three regimes: the Gaussian model grows decisive but
//! overconfident as dimensions accumulate (accuracy peaks at an intermediate
//! dimension count and robustness collapses), a mildly heavy-tailed model
//! keeps accuracy and robustness at high dimension counts, and a
//! compact-support model eventually assigns probability zero to events that
//! happen, zeroing accuracy exactly.
//!
//! Determinism contract: every trial's generator stream is derived from
//! `(seed, trial)` alone, so parallel execution over (dims, trial) pairs is
//! bit-identical to sequential execution, and data never depends on the
//! model's tail power (paired model comparisons see the same draws).

use crate::distributions::MultivariateCoupledGaussian;
use crate::error::{Error, Result};
use crate::profile::{metric_summary, profile_curve, ForecastSet, MetricSummary, RiskProfileCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Smallest admissible fitted variance; smaller estimates are clamped and flagged.
pub const MIN_VARIANCE: f64 = 1e-12;

/// Per-feature class-mean offset, in source standard deviations, calibrated
/// once by grid search so the Gaussian reference model's trial-averaged
/// classification rate under the default configuration stays inside
/// [0.80, 0.88] for every dimension count from 6 to 10 (it runs 0.809 at
/// 6 dims to 0.869 at 10), then frozen.
pub const DEFAULT_CLASS_SEPARATION: f64 = 0.81;

/// Benchmark configuration; [`Default`] reproduces the reference experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Features the source emits per sample.
    pub n_features: usize,
    /// Training samples per class.
    pub n_train: usize,
    /// Test samples per class.
    pub n_test: usize,
    /// Equiprobable classes.
    pub n_classes: usize,
    /// Per-feature mean offset between consecutive classes (source-sigma units).
    pub class_separation: f64,
    /// Tail power of the classifier's coupled-Gaussian class models.
    pub model_r_d: f64,
    /// Dimension counts to sweep; each uses the first `dims` features.
    pub dims_swept: Vec<usize>,
    /// Trials per dimension count.
    pub n_trials: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_features: 10,
            n_train: 25,
            n_test: 1000,
            n_classes: 2,
            class_separation: DEFAULT_CLASS_SEPARATION,
            model_r_d: 0.0,
            dims_swept: (1..=10).collect(),
            n_trials: 100,
            seed: 20240 + 821,
        }
    }
}

impl ExperimentConfig {
    /// Checks counts, sweep bounds, and tail-power admissibility.
    pub fn validate(&self) -> Result<()> {
        if self.n_features == 0 {
            return Err(Error::Parameter("n_features must be at least 1"));
        }
        if self.n_test == 0 {
            return Err(Error::Parameter("n_test must be at least 1"));
        }
        if self.n_classes == 0 {
            return Err(Error::Parameter("n_classes must be at least 1"));
        }
        if self.n_trials == 0 {
            return Err(Error::Parameter("n_trials must be at least 1"));
        }
        if self.n_train < 2 {
            return Err(Error::Parameter("n_train must be at least 2 per class"));
        }
        if self.dims_swept.is_empty() {
            return Err(Error::Empty);
        }
        if self.dims_swept.iter().any(|&d| d == 0 || d > self.n_features) {
            return Err(Error::Parameter("swept dims must lie in 1..=n_features"));
        }
        if !self.class_separation.is_finite() {
            return Err(Error::NonFinite("class separation"));
        }
        let max_dims = *self.dims_swept.iter().max().unwrap() as f64;
        if !self.model_r_d.is_finite() || 2.0 + max_dims * self.model_r_d <= 0.0 {
            return Err(Error::Parameter("model tail power requires 2 + dims*r_D > 0"));
        }
        Ok(())
    }
}

/// One trial's draws: `data[class][sample][feature]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Vec<Vec<f64>>>,
    pub test: Vec<Vec<Vec<f64>>>,
}

/// Draws a trial's training and test sets, deterministic in `(seed, trial)`
/// and independent of the model tail power.
pub fn generate_data(cfg: &ExperimentConfig, trial: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let mut draw_class = |class: usize, rows: usize| -> Vec<Vec<f64>> {
        let offset = class as f64 * cfg.class_separation;
        (0..rows)
            .map(|_| {
                (0..cfg.n_features)
                    .map(|_| offset + rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect()
    };
    let train = (0..cfg.n_classes).map(|c| draw_class(c, cfg.n_train)).collect();
    let test = (0..cfg.n_classes).map(|c| draw_class(c, cfg.n_test)).collect();
    Dataset { train, test }
}

/// Per-class diagonal coupled-Gaussian models over the first `dims` features.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    dims: usize,
    model_r_d: f64,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
    class_models: Vec<MultivariateCoupledGaussian>,
    variance_clamped: bool,
}

impl TrainedModel {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn model_r_d(&self) -> f64 {
        self.model_r_d
    }

    pub fn n_classes(&self) -> usize {
        self.class_models.len()
    }

    /// Fitted per-dimension sample means of one class.
    pub fn means(&self, class: usize) -> &[f64] {
        &self.means[class]
    }

    /// Fitted per-dimension unbiased sample variances (post-clamp).
    pub fn variances(&self, class: usize) -> &[f64] {
        &self.variances[class]
    }

    /// True when some fitted variance hit the [`MIN_VARIANCE`] clamp.
    pub fn variance_clamped(&self) -> bool {
        self.variance_clamped
    }

    /// Class-conditional log density of a test row's first `dims` features.
    pub fn class_ln_density(&self, class: usize, row: &[f64]) -> Result<f64> {
        self.class_models[class].ln_pdf(&row[..self.dims])
    }
}

/// Fits per-class sample means and unbiased variances on the first `dims`
/// features and assembles the diagonal coupled-Gaussian class models.
pub fn fit_model(train: &[Vec<Vec<f64>>], dims: usize, model_r_d: f64) -> Result<TrainedModel> {
    if train.is_empty() {
        return Err(Error::Empty);
    }
    let mut means = Vec::with_capacity(train.len());
    let mut variances = Vec::with_capacity(train.len());
    let mut class_models = Vec::with_capacity(train.len());
    let mut clamped = false;
    for rows in train {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Parameter("training needs at least 2 samples per class"));
        }
        if rows.iter().any(|r| r.len() < dims) {
            return Err(Error::LengthMismatch {
                left: dims,
                right: rows.iter().map(|r| r.len()).min().unwrap_or(0),
            });
        }
        let mut mu = vec![0.0; dims];
        for row in rows {
            for (m, &x) in mu.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut mu {
            *m /= n as f64;
        }
        let mut var = vec![0.0; dims];
        for row in rows {
            for ((v, &x), &m) in var.iter_mut().zip(row).zip(&mu) {
                *v += (x - m) * (x - m);
            }
        }
        for v in &mut var {
            *v /= (n - 1) as f64;
            if *v < MIN_VARIANCE {
                *v = MIN_VARIANCE;
                clamped = true;
            }
        }
        let mut sigma = vec![vec![0.0; dims]; dims];
        for (i, &v) in var.iter().enumerate() {
            sigma[i][i] = v;
        }
        class_models.push(MultivariateCoupledGaussian::from_tail_power(
            mu.clone(),
            sigma,
            model_r_d,
        )?);
        means.push(mu);
        variances.push(var);
    }
    Ok(TrainedModel {
        dims,
        model_r_d,
        means,
        variances,
        class_models,
        variance_clamped: clamped,
    })
}

/// Classification outcome of one trial.
#[derive(Debug, Clone)]
pub struct ClassificationOutcome {
    /// Fraction of test samples whose posterior argmax was the true class.
    pub pct_correct: f64,
    /// Posterior probability assigned to each sample's true class.
    pub forecasts: ForecastSet,
    /// Samples where every class likelihood was zero (compact-support miss).
    pub zero_likelihood_samples: usize,
}

/// Scores a model on test data: equal-prior posteriors by log-sum-exp, argmax
/// prediction (ties and all-zero likelihoods resolve to the lowest class
/// index), and the realized-class posterior recorded per sample.
pub fn classify_and_score(
    model: &TrainedModel,
    test: &[Vec<Vec<f64>>],
) -> Result<ClassificationOutcome> {
    if test.len() != model.n_classes() {
        return Err(Error::LengthMismatch {
            left: model.n_classes(),
            right: test.len(),
        });
    }
    let n_classes = model.n_classes();
    let total: usize = test.iter().map(|rows| rows.len()).sum();
    if total == 0 {
        return Err(Error::Empty);
    }
    let mut forecasts = Vec::with_capacity(total);
    let mut correct = 0usize;
    let mut zero_likelihood = 0usize;
    let mut ln_lik = vec![0.0; n_classes];
    for (true_class, rows) in test.iter().enumerate() {
        for row in rows {
            for (c, l) in ln_lik.iter_mut().enumerate() {
                *l = model.class_ln_density(c, row)?;
            }
            let max_ln = ln_lik.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max_ln == f64::NEG_INFINITY {
                // Outside every class support: honest zero for the realized
                // class, deterministic fallback prediction.
                zero_likelihood += 1;
                forecasts.push(0.0);
                if true_class == 0 {
                    correct += 1;
                }
                continue;
            }
            let mut denom = 0.0;
            let mut best = 0usize;
            for (c, &l) in ln_lik.iter().enumerate() {
                denom += (l - max_ln).exp();
                if l > ln_lik[best] {
                    best = c;
                }
            }
            forecasts.push((ln_lik[true_class] - max_ln).exp() / denom);
            if best == true_class {
                correct += 1;
            }
        }
    }
    Ok(ClassificationOutcome {
        pct_correct: correct as f64 / total as f64,
        forecasts: ForecastSet::new(forecasts)?,
        zero_likelihood_samples: zero_likelihood,
    })
}

/// One (dims, trial) cell of the sweep.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub dims: usize,
    pub trial: usize,
    pub pct_correct: f64,
    pub summary: MetricSummary,
    pub curve: RiskProfileCurve,
    pub variance_clamped: bool,
    pub zero_likelihood_samples: usize,
}

/// Trial-averaged metrics for one dimension count.
#[derive(Debug, Clone)]
pub struct DimsAggregate {
    pub dims: usize,
    pub pct_correct: f64,
    pub decisiveness: f64,
    pub accuracy: f64,
    pub robustness: f64,
    /// Trials whose accuracy was exactly zero (a zero forecast occurred).
    pub zero_accuracy_trials: usize,
    /// Pointwise trial-averaged profile curve over the sweep's grid.
    pub mean_curve: Vec<(f64, f64)>,
}

/// Full sweep output: every trial cell, per-dims aggregates, config echo.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub aggregates: Vec<DimsAggregate>,
}

/// Runs the benchmark over every (dims, trial) pair, scoring each trial's
/// forecast set on `r_grid`. Deterministic in the config alone; trials run in
/// parallel with results identical to sequential order.
pub fn run_sweep(cfg: &ExperimentConfig, r_grid: &[f64]) -> Result<SweepResult> {
    cfg.validate()?;
    let pairs: Vec<(usize, usize)> = cfg
        .dims_swept
        .iter()
        .flat_map(|&dims| (0..cfg.n_trials).map(move |trial| (dims, trial)))
        .collect();
    let trials: Vec<TrialResult> = pairs
        .par_iter()
        .map(|&(dims, trial)| -> Result<TrialResult> {
            let data = generate_data(cfg, trial);
            let model = fit_model(&data.train, dims, cfg.model_r_d)?;
            let outcome = classify_and_score(&model, &data.test)?;
            let summary = metric_summary(&outcome.forecasts)?;
            let curve = profile_curve(&outcome.forecasts, r_grid)?;
            Ok(TrialResult {
                dims,
                trial,
                pct_correct: outcome.pct_correct,
                summary,
                curve,
                variance_clamped: model.variance_clamped(),
                zero_likelihood_samples: outcome.zero_likelihood_samples,
            })
        })
        .collect::<Result<_>>()?;

    let aggregates = cfg
        .dims_swept
        .iter()
        .map(|&dims| {
            let cells: Vec<&TrialResult> = trials.iter().filter(|t| t.dims == dims).collect();
            let n = cells.len() as f64;
            let mean = |f: &dyn Fn(&TrialResult) -> f64| cells.iter().map(|t| f(t)).sum::<f64>() / n;
            let grid_len = cells[0].curve.len();
            let mean_curve = (0..grid_len)
                .map(|i| {
                    let r = cells[0].curve.points()[i].0;
                    let v = cells.iter().map(|t| t.curve.points()[i].1).sum::<f64>() / n;
                    (r, v)
                })
                .collect();
            DimsAggregate {
                dims,
                pct_correct: mean(&|t| t.pct_correct),
                decisiveness: mean(&|t| t.summary.decisiveness),
                accuracy: mean(&|t| t.summary.accuracy),
                robustness: mean(&|t| t.summary.robustness),
                zero_accuracy_trials: cells.iter().filter(|t| t.summary.accuracy == 0.0).count(),
                mean_curve,
            }
        })
        .collect();

    Ok(SweepResult {
        config: cfg.clone(),
        trials,
        aggregates,
    })
}
