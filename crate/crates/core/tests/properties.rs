//! Randomized invariant checks across the library: deformed log/exp inverse
//! pairs, coupling algebra involutions, generalized-mean order and bound
//! properties, coupled-probability reweighting, risk-profile structure, and
//! distribution function shape. Sampling determinism is checked bit-for-bit.

use proptest::prelude::*;
use riskprof::bench::{run_sweep, ExperimentConfig};
use riskprof::coupled::{
    conjugate_risk, coupled_exp, coupled_log, dual_coupling, gen_exp, gen_log,
};
use riskprof::distributions::{CoupledExponential1D, CoupledGaussian1D};
use riskprof::metrics::{
    coupled_probability, dist_gen_mean, divergence_prob, info_triple, weighted_gen_mean,
    ProbDistribution, WeightVector,
};
use riskprof::profile::{
    equal_weight_reduction_check, generalized_surprisal, profile_point, surprisal,
    ForecastSet,
};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= tol * scale
}

/// Positive entries that sum to 1 within a few ulp.
fn distribution(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-4f64..1.0, len).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn values_in_unit(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-4f64..=1.0, len)
}

/// Risk bias clear of the geometric-limit branch switch, or exactly 0.
fn branch_safe_r() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -2.0..=-1e-6, 1e-6..=2.0]
}

/// Same-length pair: raw values in (0, 1] and a normalized weight vector.
fn values_with_weights() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..10).prop_flat_map(|n| {
        (
            prop::collection::vec(1e-4f64..=1.0, n),
            prop::collection::vec(1e-4f64..1.0, n).prop_map(|v| {
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
            }),
        )
    })
}

/// Same-length pair of distributions.
fn distribution_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..10).prop_flat_map(|n| {
        let one = prop::collection::vec(1e-4f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        });
        (one.clone(), one)
    })
}

proptest! {
    // Inverse pairs, restricted to the well-conditioned region |r ln x| < 7
    // where 1e-12 relative accuracy is representable at all.
    #[test]
    fn gen_pair_inverts(x in 1e-4f64..1e4, r in -0.9f64..3.0) {
        prop_assume!((r * x.ln()).abs() < 7.0);
        let back = gen_exp(gen_log(x, r).unwrap(), r).unwrap();
        prop_assert!(rel_close(back, x, 1e-12), "x={x} r={r} back={back}");
    }

    #[test]
    fn coupled_pair_inverts(x in 1e-4f64..1e4, kappa in -0.9f64..3.0) {
        prop_assume!((kappa / (1.0 + kappa) * x.ln()).abs() < 7.0);
        let back = coupled_exp(coupled_log(x, kappa).unwrap(), kappa).unwrap();
        prop_assert!(rel_close(back, x, 1e-12), "x={x} k={kappa} back={back}");
    }

    #[test]
    fn gen_log_is_increasing_and_anchored(
        x1 in 1e-3f64..1e3,
        x2 in 1e-3f64..1e3,
        r in -0.9f64..3.0,
    ) {
        prop_assert_eq!(gen_log(1.0, r).unwrap(), 0.0);
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        prop_assert!(gen_log(lo, r).unwrap() <= gen_log(hi, r).unwrap());
    }

    #[test]
    fn dual_coupling_is_involution(kappa in -0.2f64..5.0, d in 1u32..5) {
        prop_assume!(1.0 + d as f64 * kappa > 1e-3);
        let dual = dual_coupling(kappa, d).unwrap();
        prop_assert!(rel_close(dual_coupling(dual, d).unwrap(), kappa, 1e-12));
    }

    #[test]
    fn conjugate_risk_is_involution(r in -0.45f64..4.0, alpha in 0.5f64..3.0, d in 1u32..4) {
        prop_assume!(alpha + d as f64 * r > 1e-3);
        let conj = conjugate_risk(r, alpha, d).unwrap();
        prop_assume!(alpha + d as f64 * conj > 1e-3);
        let back = conjugate_risk(conj, alpha, d).unwrap();
        // involution with fixed point 0
        prop_assert!((back - r).abs() <= 1e-10 * (1.0 + r.abs()), "r={r} back={back}");
        prop_assert_eq!(conjugate_risk(0.0, alpha, d).unwrap(), 0.0);
    }

    // Power-mean order: nondecreasing in r, confined to [min p, max p],
    // permutation invariant.
    #[test]
    fn weighted_mean_monotone_in_r(
        (p, w) in values_with_weights(),
        r1 in -3.0f64..3.0,
        r2 in -3.0f64..3.0,
    ) {
        let w = WeightVector::new(w).unwrap();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = weighted_gen_mean(&w, &p, lo).unwrap();
        let b = weighted_gen_mean(&w, &p, hi).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12), "r {lo}->{hi}: {a} > {b}");
    }

    #[test]
    fn weighted_mean_bounded_and_permutation_invariant(
        (p, w) in values_with_weights(),
        r in -3.0f64..3.0,
        shift in 0usize..10,
    ) {
        let wv = WeightVector::new(w.clone()).unwrap();
        let m = weighted_gen_mean(&wv, &p, r).unwrap();
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));

        let k = shift % p.len();
        let mut p2 = p.clone();
        let mut w2 = w.clone();
        p2.rotate_left(k);
        w2.rotate_left(k);
        let m2 = weighted_gen_mean(&WeightVector::new(w2).unwrap(), &p2, r).unwrap();
        prop_assert!(rel_close(m, m2, 1e-12));
    }

    // A zero value with positive weight collapses the mean for every r <= 0
    // and leaves it positive for r > 0.
    #[test]
    fn zero_semantics(
        mut p in values_in_unit(2..8),
        idx in 0usize..8,
        r_neg in -3.0f64..0.0,
        r_pos in 0.1f64..3.0,
    ) {
        let k = idx % p.len();
        p[k] = 0.0;
        let w = WeightVector::uniform(p.len()).unwrap();
        prop_assert_eq!(weighted_gen_mean(&w, &p, r_neg).unwrap(), 0.0);
        prop_assert_eq!(weighted_gen_mean(&w, &p, 0.0).unwrap(), 0.0);
        prop_assert!(weighted_gen_mean(&w, &p, r_pos).unwrap() > 0.0);
    }

    // Coupled probability: a distribution out, zeros preserved, exact
    // identity at r = 0, uniform is a fixed point for every r.
    #[test]
    fn coupled_probability_reweights(p in distribution(2..10), r in -2.0f64..2.0) {
        let dist = ProbDistribution::new(p).unwrap();
        let cp = coupled_probability(&dist, r).unwrap();
        let sum: f64 = cp.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        let id = coupled_probability(&dist, 0.0).unwrap();
        prop_assert_eq!(id.probs(), dist.probs());
    }

    #[test]
    fn uniform_reduction(n in 1usize..40, r in -3.0f64..3.0) {
        prop_assert!(equal_weight_reduction_check(n, r).is_ok());
    }

    // The three routes to the distribution generalized mean agree: direct,
    // coupled-probability weights at r, and raw-probability weights at -r.
    #[test]
    fn dist_gen_mean_routes_agree(p in distribution(2..10), r in branch_safe_r()) {
        let dist = ProbDistribution::new(p).unwrap();
        let direct = dist_gen_mean(&dist, r).unwrap();
        let cp = coupled_probability(&dist, r).unwrap();
        let via_cp =
            weighted_gen_mean(&cp.as_weights(), dist.probs(), r).unwrap();
        let via_neg =
            weighted_gen_mean(&dist.as_weights(), dist.probs(), -r).unwrap();
        prop_assert!(rel_close(direct, via_cp, 1e-10), "{direct} vs {via_cp} at r={r}");
        prop_assert!(rel_close(direct, via_neg, 1e-10), "{direct} vs {via_neg} at r={r}");
    }

    // Information triple consistency and range.
    #[test]
    fn info_triple_consistent(p in distribution(2..12)) {
        let n = p.len();
        let dist = ProbDistribution::new(p).unwrap();
        let t = info_triple(&dist);
        prop_assert!(t.entropy >= -1e-12);
        prop_assert!(rel_close(t.perplexity, t.entropy.exp(), 1e-12));
        prop_assert!(rel_close(t.avg_probability, 1.0 / t.perplexity, 1e-12));
        prop_assert!(t.perplexity <= n as f64 * (1.0 + 1e-12));
    }

    // Probability-domain Gibbs inequality: exp(-cross entropy gap) <= 1 with
    // equality against itself.
    #[test]
    fn divergence_gibbs((p, q) in distribution_pair()) {
        let dp = ProbDistribution::new(p).unwrap();
        let dq = ProbDistribution::new(q).unwrap();
        let d = divergence_prob(&dp, &dq).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert_eq!(divergence_prob(&dp, &dp).unwrap(), 1.0);
    }

    // Risk profile structure over forecast sets.
    #[test]
    fn profile_monotone_bounded_permutation_invariant(
        probs in values_in_unit(2..12),
        r1 in -3.0f64..3.0,
        r2 in -3.0f64..3.0,
        shift in 0usize..12,
    ) {
        let fs = ForecastSet::new(probs.clone()).unwrap();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = profile_point(&fs, lo).unwrap();
        let b = profile_point(&fs, hi).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12));
        let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = probs.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!(a >= min * (1.0 - 1e-12) && b <= max * (1.0 + 1e-12));

        let mut rotated = probs.clone();
        rotated.rotate_left(shift % probs.len());
        let fs2 = ForecastSet::new(rotated).unwrap();
        prop_assert!(rel_close(a, profile_point(&fs2, lo).unwrap(), 1e-12));
    }

    // Generalized mean = deformed exp of minus the mean deformed surprisal,
    // in the well-conditioned parameter region.
    #[test]
    fn profile_point_is_exp_of_neg_surprisal(
        probs in prop::collection::vec(1e-3f64..=1.0, 1..12),
        r in -0.9f64..=1.0,
    ) {
        let fs = ForecastSet::new(probs).unwrap();
        let direct = profile_point(&fs, r).unwrap();
        let via = gen_exp(-generalized_surprisal(&fs, r).unwrap(), r).unwrap();
        prop_assert!(rel_close(direct, via, 1e-10), "{direct} vs {via} at r={r}");
    }

    #[test]
    fn accuracy_is_exp_of_neg_surprisal(probs in prop::collection::vec(1e-6f64..=1.0, 1..12)) {
        let fs = ForecastSet::new(probs).unwrap();
        let acc = profile_point(&fs, 0.0).unwrap();
        prop_assert!(rel_close(acc, (-surprisal(&fs)).exp(), 1e-12));
    }

    // Distribution shape: nonnegative density, monotone CDF in [0, 1],
    // exact zero outside compact support.
    #[test]
    fn coupled_gaussian_shape(
        mu in -2.0f64..2.0,
        sigma in 0.3f64..3.0,
        r_d in -1.8f64..1.5,
        z1 in -6.0f64..6.0,
        z2 in -6.0f64..6.0,
    ) {
        let g = CoupledGaussian1D::new(mu, sigma, r_d).unwrap();
        let (x1, x2) = (mu + sigma * z1.min(z2), mu + sigma * z1.max(z2));
        let (c1, c2) = (g.cdf(x1), g.cdf(x2));
        prop_assert!((0.0..=1.0).contains(&c1) && (0.0..=1.0).contains(&c2));
        prop_assert!(c1 <= c2 + 1e-12);
        prop_assert!(g.pdf(x1) >= 0.0);
        if r_d > 0.0 {
            let (lo, hi) = g.support();
            prop_assert_eq!(g.pdf(hi + sigma), 0.0);
            prop_assert_eq!(g.pdf(lo - sigma), 0.0);
            prop_assert_eq!(g.cdf(hi + sigma), 1.0);
        }
    }

    #[test]
    fn coupled_exponential_shape(
        mu in -2.0f64..2.0,
        sigma in 0.3f64..3.0,
        r_d in -0.9f64..2.0,
        z1 in -1.0f64..8.0,
        z2 in -1.0f64..8.0,
    ) {
        let e = CoupledExponential1D::new(mu, sigma, r_d).unwrap();
        let (x1, x2) = (mu + sigma * z1.min(z2), mu + sigma * z1.max(z2));
        let (c1, c2) = (e.cdf(x1), e.cdf(x2));
        prop_assert!((0.0..=1.0).contains(&c1) && (0.0..=1.0).contains(&c2));
        prop_assert!(c1 <= c2 + 1e-12);
        prop_assert_eq!(e.pdf(mu - sigma * 0.5), 0.0);
        prop_assert!(e.pdf(x2.max(mu)) >= 0.0);
    }
}

// Bit-identical determinism of every seeded path.
#[test]
fn sampling_is_bit_identical_across_reruns() {
    let g = CoupledGaussian1D::new(0.5, 1.5, -0.4).unwrap();
    let a = g.sample(512, 9);
    let b = g.sample(512, 9);
    assert_eq!(a.values, b.values);
    assert_eq!(a.proposals, b.proposals);
    let c = g.sample(512, 10);
    assert_ne!(a.values, c.values);

    let e = CoupledExponential1D::new(-1.0, 2.0, 0.7).unwrap();
    assert_eq!(e.sample(512, 3).values, e.sample(512, 3).values);
}

#[test]
fn sweep_is_bit_identical_across_reruns() {
    let cfg = ExperimentConfig {
        n_features: 4,
        n_train: 8,
        n_test: 30,
        n_trials: 3,
        dims_swept: vec![1, 4],
        ..ExperimentConfig::default()
    };
    let grid = [-0.5, 0.0, 1.0];
    let a = run_sweep(&cfg, &grid).unwrap();
    let b = run_sweep(&cfg, &grid).unwrap();
    for (x, y) in a.trials.iter().zip(&b.trials) {
        assert_eq!(x.pct_correct.to_bits(), y.pct_correct.to_bits());
        assert_eq!(x.summary.accuracy.to_bits(), y.summary.accuracy.to_bits());
        assert_eq!(x.summary.robustness.to_bits(), y.summary.robustness.to_bits());
        for (p, q) in x.curve.points().iter().zip(y.curve.points()) {
            assert_eq!(p.1.to_bits(), q.1.to_bits());
        }
    }
    for (x, y) in a.aggregates.iter().zip(&b.aggregates) {
        assert_eq!(x.pct_correct.to_bits(), y.pct_correct.to_bits());
        assert_eq!(x.robustness.to_bits(), y.robustness.to_bits());
    }
}
