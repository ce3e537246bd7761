//! Probability-domain translations of information metrics.
//!
//! Shannon's measures are usually reported on the entropy scale. Exponentiating
//! moves them onto scales with direct probabilistic meaning:
//!
//! - average probability `P_avg = exp(-H(p)) = prod p_i^{p_i}`, the weighted
//!   geometric mean of the distribution under itself (the reciprocal of
//!   perplexity);
//! - divergence `prod (q_i/p_i)^{p_i} = exp(-D_KL(p||q))`, a probability ratio
//!   in (0, 1] that equals 1 exactly when the distributions agree on the
//!   support of `p`;
//! - cross entropy `prod q_i^{p_i}`, which factors multiplicatively as
//!   `P_avg(p) * divergence(p, q)`.
//!
//! The generalized family replaces the geometric mean with the weighted power
//! mean `P_r(w, p) = (sum w_i p_i^r)^{1/r}`, whose risk bias `r` interpolates
//! from decisive (`r = 1`, arithmetic) through neutral (`r = 0`, geometric) to
//! robust (`r < 0`) readings of the same probabilities. Two derived forms close
//! the algebra:
//!
//! - the coupled probability `P_i^{(r)} = p_i^{1-r} / sum_j p_j^{1-r}`, the
//!   reweighting under which the power mean of `p` reduces to the closed form
//!   `(sum p_i^{1-r})^{-1/r} = P_{-r}(p, p)`;
//! - the aggregation identity, where the deformed-exponential sandwich
//!   `(exp_{k,d}(sum w_i ln_{k,d} p_i^{-a}))^{-1/a}` collapses to exactly
//!   `P_r(w, p)` at `r = -a*k/(1 + d*k)`.
//!
//! All products run through the log domain to avoid underflow on long vectors;
//! power-mean sums are rescaled by the extreme support element so no
//! intermediate overflows. Exact zeros never get floored: a zero probability
//! with positive weight makes every mean with `r <= 0` exactly zero, and that
//! exactness is load-bearing for downstream scoring.

use crate::coupled::{CouplingParams, LIMIT_BRANCH_EPS};
use crate::error::{Error, Result};

/// Tolerance on |sum - 1| accepted by the normalized-vector constructors.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A discrete probability distribution: nonnegative entries summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDistribution {
    p: Vec<f64>,
}

/// Nonnegative weights summing to 1, paired elementwise with a value vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

fn validate_normalized(v: &[f64], what: &'static str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Empty);
    }
    let mut sum = 0.0;
    for &x in v {
        if !x.is_finite() {
            return Err(Error::NonFinite(what));
        }
        if x < 0.0 {
            return Err(Error::Domain("negative entry in normalized vector"));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

impl ProbDistribution {
    /// Validates nonnegativity and unit sum (within [`NORMALIZATION_TOL`]).
    pub fn new(p: Vec<f64>) -> Result<Self> {
        validate_normalized(&p, "probability")?;
        Ok(Self { p })
    }

    /// Uniform distribution over `n` states.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            p: vec![1.0 / n as f64; n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Reinterprets the probabilities as a weight vector (they already sum to 1).
    pub fn as_weights(&self) -> WeightVector {
        WeightVector { w: self.p.clone() }
    }
}

impl WeightVector {
    /// Validates nonnegativity and unit sum (within [`NORMALIZATION_TOL`]).
    pub fn new(w: Vec<f64>) -> Result<Self> {
        validate_normalized(&w, "weight")?;
        Ok(Self { w })
    }

    /// Equal weights over `n` elements.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            w: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Entropy together with its exponential readouts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoTriple {
    /// Shannon entropy in nats, convention 0 ln 0 = 0.
    pub entropy: f64,
    /// exp(entropy): effective number of equally likely states.
    pub perplexity: f64,
    /// exp(-entropy) = prod p_i^{p_i}: probability of the typical state.
    pub avg_probability: f64,
}

impl InfoTriple {
    /// Entropy in bits; display convenience, all internal math is in nats.
    pub fn entropy_bits(&self) -> f64 {
        self.entropy / std::f64::consts::LN_2
    }
}

/// Entropy, perplexity, and average probability of a distribution.
pub fn info_triple(p: &ProbDistribution) -> InfoTriple {
    let mut h = 0.0;
    for &x in p.probs() {
        if x > 0.0 {
            h -= x * x.ln();
        }
    }
    // Entries <= 1 make each term >= 0; clamp shields the sub-ulp case only.
    let h = h.max(0.0);
    InfoTriple {
        entropy: h,
        perplexity: h.exp(),
        avg_probability: (-h).exp(),
    }
}

/// Standard deviation of the surprisal -ln p_i under p; 0 for uniform input.
pub fn sigma_ln_p(p: &ProbDistribution) -> f64 {
    let mut mean = 0.0;
    let mut second = 0.0;
    for &x in p.probs() {
        if x > 0.0 {
            let l = x.ln();
            mean -= x * l;
            second += x * l * l;
        }
    }
    // Exact cancellation for uniform input can round a hair below zero.
    (second - mean * mean).max(0.0).sqrt()
}

/// True when some state has positive probability under `p` but zero under `q`,
/// i.e. when [`divergence_prob`] saturates to 0.
pub fn support_mismatch(p: &ProbDistribution, q: &ProbDistribution) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .any(|(&pi, &qi)| pi > 0.0 && qi == 0.0))
}

/// Probability-domain divergence `prod (q_i/p_i)^{p_i} = exp(-D_KL(p||q))`.
///
/// Always in [0, 1]; equals 1 exactly when `q` matches `p` on the support of
/// `p`. A support mismatch (infinite divergence) translates to 0; detect it
/// with [`support_mismatch`].
pub fn divergence_prob(p: &ProbDistribution, q: &ProbDistribution) -> Result<f64> {
    if support_mismatch(p, q)? {
        return Ok(0.0);
    }
    let mut log_ratio = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            log_ratio += pi * (qi.ln() - pi.ln());
        }
    }
    // Gibbs: sum p ln(q/p) <= 0; clamp sheds rounding excess only.
    Ok(log_ratio.min(0.0).exp())
}

/// Probability-domain cross entropy `prod q_i^{p_i} = exp(-H(p, q))`.
///
/// Factors as `avg_probability(p) * divergence_prob(p, q)`. A zero `q_i`
/// against positive `p_i` yields 0.
pub fn cross_entropy_prob(p: &ProbDistribution, q: &ProbDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut log_prod = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi == 0.0 {
                return Ok(0.0);
            }
            log_prod += pi * qi.ln();
        }
    }
    Ok(log_prod.exp())
}

fn validate_values(p: &[f64]) -> Result<()> {
    for &x in p {
        if !x.is_finite() {
            return Err(Error::NonFinite("mean argument"));
        }
        if x < 0.0 {
            return Err(Error::Domain("negative mean argument"));
        }
    }
    Ok(())
}

/// Weighted generalized mean `P_r(w, p) = (sum w_i p_i^r)^{1/r}`.
///
/// `r = 0` is the weighted geometric mean `prod p_i^{w_i}`. Entries with zero
/// weight are ignored. A zero entry with positive weight makes the result
/// exactly 0 for every `r <= 0` (limit semantics, never floored). The sum is
/// evaluated in the log domain rescaled by the extreme support element, so the
/// result is confined to `[min p, max p]` over the support without overflow.
pub fn weighted_gen_mean(w: &WeightVector, p: &[f64], r: f64) -> Result<f64> {
    if w.len() != p.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: p.len(),
        });
    }
    if !r.is_finite() {
        return Err(Error::NonFinite("risk bias"));
    }
    validate_values(p)?;

    let support: Vec<usize> = (0..p.len()).filter(|&i| w.weights()[i] > 0.0).collect();
    let has_zero = support.iter().any(|&i| p[i] == 0.0);

    if r.abs() < LIMIT_BRANCH_EPS {
        if has_zero {
            return Ok(0.0);
        }
        let log_gm: f64 = support.iter().map(|&i| w.weights()[i] * p[i].ln()).sum();
        return Ok(log_gm.exp());
    }
    if r < 0.0 && has_zero {
        return Ok(0.0);
    }

    // Rescale by the extreme element so every exponent is <= 0.
    let scale = if r > 0.0 {
        support.iter().map(|&i| p[i]).fold(0.0, f64::max)
    } else {
        support.iter().map(|&i| p[i]).fold(f64::INFINITY, f64::min)
    };
    if scale == 0.0 {
        return Ok(0.0);
    }
    let ln_scale = scale.ln();
    let mut sum = 0.0;
    for &i in &support {
        if p[i] > 0.0 {
            sum += w.weights()[i] * (r * (p[i].ln() - ln_scale)).exp();
        }
    }
    Ok((ln_scale + sum.ln() / r).exp())
}

/// True when [`coupled_probability`] at this `r` drops exact zeros from the
/// support because the exponent `1 - r` is negative.
pub fn coupled_probability_excludes_zeros(p: &ProbDistribution, r: f64) -> bool {
    r > 1.0 && p.probs().contains(&0.0)
}

/// Coupled probability `P_i^{(r)} = p_i^{1-r} / sum_j p_j^{1-r}`.
///
/// `r = 0` returns the input unchanged, and an all-equal input is returned
/// unchanged for every `r` (the uniform reduction is exact, not approximate).
/// Exact zeros stay zero: for `r < 1` they map to zero anyway, and for
/// `r >= 1` they are excluded from the renormalization (flag this with
/// [`coupled_probability_excludes_zeros`]).
pub fn coupled_probability(p: &ProbDistribution, r: f64) -> Result<ProbDistribution> {
    if !r.is_finite() {
        return Err(Error::NonFinite("risk bias"));
    }
    let probs = p.probs();
    if r == 0.0 || probs.iter().all(|&x| x == probs[0]) {
        return Ok(p.clone());
    }
    let e = 1.0 - r;
    // Softmax in the log domain: stable for any exponent sign.
    let mut t = vec![f64::NEG_INFINITY; probs.len()];
    let mut t_max = f64::NEG_INFINITY;
    for (i, &x) in probs.iter().enumerate() {
        if x > 0.0 {
            t[i] = e * x.ln();
            t_max = t_max.max(t[i]);
        }
    }
    let mut out = vec![0.0; probs.len()];
    let mut total = 0.0;
    for (o, &ti) in out.iter_mut().zip(&t) {
        if ti > f64::NEG_INFINITY {
            *o = (ti - t_max).exp();
            total += *o;
        }
    }
    for o in &mut out {
        *o /= total;
    }
    ProbDistribution::new(out)
}

/// Generalized mean of a distribution under itself: `(sum p_i^{1-r})^{-1/r}`,
/// equal to `P_r(P^{(r)}, p)` and to `P_{-r}(p, p)`.
///
/// `r = 0` is the geometric limit `prod p_i^{p_i}` (the average probability).
/// The sum runs over the support of `p`; with zeros present and `r > 1` the
/// zero states contribute nothing, consistent with their zero weight in
/// `P_{-r}(p, p)`.
pub fn dist_gen_mean(p: &ProbDistribution, r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite("risk bias"));
    }
    if r.abs() < LIMIT_BRANCH_EPS {
        return Ok(info_triple(p).avg_probability);
    }
    let support: Vec<f64> = p.probs().iter().copied().filter(|&x| x > 0.0).collect();
    let e = 1.0 - r;
    if e == 0.0 {
        return Ok(1.0 / support.len() as f64);
    }
    let scale = if e > 0.0 {
        support.iter().copied().fold(0.0, f64::max)
    } else {
        support.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let ln_scale = scale.ln();
    let sum: f64 = support.iter().map(|&x| (e * (x.ln() - ln_scale)).exp()).sum();
    let ln_sum = e * ln_scale + sum.ln();
    Ok((-ln_sum / r).exp())
}

/// Deformed logarithm `ln_{k,d}(x) = ((x^{k/(1+dk)}) - 1) / k` via expm1.
fn coupled_log_d(x: f64, kappa: f64, d: u32) -> f64 {
    let c = kappa / (1.0 + d as f64 * kappa);
    if x == 0.0 {
        // x^c -> 0 for c > 0, +inf for c < 0.
        return if c > 0.0 {
            -1.0 / kappa
        } else {
            f64::INFINITY
        };
    }
    (c * x.ln()).exp_m1() / kappa
}

/// Deformed exponential `exp_{k,d}(y) = (1 + k y)_+^{(1+dk)/k}` via ln_1p.
fn coupled_exp_d(y: f64, kappa: f64, d: u32) -> f64 {
    if y.is_infinite() && y > 0.0 {
        return if kappa > 0.0 { f64::INFINITY } else { 0.0 };
    }
    let z = kappa * y;
    if z <= -1.0 {
        return 0.0;
    }
    (z.ln_1p() * (1.0 + d as f64 * kappa) / kappa).exp()
}

/// Aggregates probabilities through the literal deformed-exponential sandwich
/// `(exp_{k,d}(sum w_i ln_{k,d}(p_i^{-a})))^{-1/a}`.
///
/// Algebraically this collapses to `weighted_gen_mean(w, p, r)` at the mapped
/// risk bias `r = -a*k/(1 + d*k)`; the function exists to compute the
/// composed route independently so the collapse can be verified numerically.
/// `k = 0` is the geometric limit. Intermediates `p_i^{-a}` must stay within
/// double range, which holds for any probabilities of practical interest.
pub fn generalized_aggregate(
    w: &WeightVector,
    p: &[f64],
    params: &CouplingParams,
) -> Result<f64> {
    if w.len() != p.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: p.len(),
        });
    }
    validate_values(p)?;
    let (kappa, alpha, d) = (params.kappa(), params.alpha(), params.d());

    if kappa.abs() < LIMIT_BRANCH_EPS {
        // ln_{k,d} -> ln and exp_{k,d} -> exp: weighted geometric mean.
        let mut log_sum = 0.0;
        for (&wi, &pi) in w.weights().iter().zip(p) {
            if wi > 0.0 {
                if pi == 0.0 {
                    return Ok(0.0);
                }
                log_sum += wi * (-alpha) * pi.ln();
            }
        }
        return Ok((log_sum / -alpha).exp());
    }

    let mut s = 0.0;
    for (&wi, &pi) in w.weights().iter().zip(p) {
        if wi > 0.0 {
            s += wi * coupled_log_d(pi.powf(-alpha), kappa, d);
        }
    }
    let inner = coupled_exp_d(s, kappa, d);
    if inner == 0.0 {
        return Ok(f64::INFINITY); // 0^{-1/a}; unreachable for valid params
    }
    Ok((inner.ln() * (-1.0 / alpha)).exp())
}

/// Evaluates the aggregation identity's closed form
/// `(sum p_i^{1 + a*k/(1+d*k)})^{(1+d*k)/(a*k)}` over the support of `p`.
///
/// With `r = -a*k/(1 + d*k)` the exponents read `1 - r` inside and `-1/r`
/// outside, so the value equals `dist_gen_mean(p, r)` at the coupling's own
/// risk bias; tests pin that equality. `k = 0` is the geometric limit
/// `prod p_i^{p_i}`.
pub fn distribution_aggregate_identity(
    p: &ProbDistribution,
    params: &CouplingParams,
) -> Result<f64> {
    let (kappa, alpha, d) = (params.kappa(), params.alpha(), params.d());
    if kappa.abs() < LIMIT_BRANCH_EPS {
        return Ok(info_triple(p).avg_probability);
    }
    let lead = 1.0 + d as f64 * kappa;
    let inner = 1.0 + alpha * kappa / lead;
    let outer = lead / (alpha * kappa);
    let support: Vec<f64> = p.probs().iter().copied().filter(|&x| x > 0.0).collect();
    let scale = if inner > 0.0 {
        support.iter().copied().fold(0.0, f64::max)
    } else {
        support.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let ln_scale = scale.ln();
    let sum: f64 = support
        .iter()
        .map(|&x| (inner * (x.ln() - ln_scale)).exp())
        .sum();
    Ok((outer * (inner * ln_scale + sum.ln())).exp())
}
