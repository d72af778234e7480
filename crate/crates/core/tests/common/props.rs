//! Invariant checks shared by the property tests and the acceptance run.
//! Each check panics on the first violation.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use remeta::bayes::{conditional_mu_moments, Component};
use remeta::freq::{hksj_interval, q_profile_interval, q_statistic, random_effects_normal};
use remeta::numerics::integrate;
use remeta::{BayesFit, Dataset, EffectPrior, HeterogeneityPrior, Interval, IntervalKind, NormalMixture, TauMethod};

pub fn random_dataset(rng: &mut StdRng, k: usize) -> Dataset {
    let y: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let s: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    Dataset::from_estimates(&y, &s).unwrap()
}

pub fn random_mixture(rng: &mut StdRng) -> NormalMixture {
    let n = rng.gen_range(1..6);
    let comps = (0..n).map(|_| Component {
        weight: rng.gen_range(0.05..1.0),
        mean: rng.gen_range(-3.0..3.0),
        sd: rng.gen_range(0.2..2.0),
    });
    NormalMixture::from_unnormalized(comps).unwrap()
}

/// Every μ- and τ-valued output of one Bayesian fit.
struct Outputs {
    mu: Vec<f64>,
    tau: Vec<f64>,
}

fn bayes_outputs(d: &Dataset, hp: &HeterogeneityPrior) -> Outputs {
    let fit = BayesFit::new(d, hp, &EffectPrior::ImproperUniform).unwrap();
    let mut mu = Vec::new();
    for kind in [IntervalKind::Shortest, IntervalKind::Central] {
        let s = fit.mu_summary(0.95, kind).unwrap();
        mu.extend([s.mean, s.median, s.interval.lo, s.interval.hi]);
        let p = fit.predictive_mixture().unwrap().credible_interval(0.95, kind).unwrap();
        mu.extend([p.lo, p.hi]);
    }
    let t = fit.tau_summary(0.95).unwrap();
    Outputs {
        mu,
        tau: vec![t.mean, t.sd, t.median, t.interval.lo, t.interval.hi],
    }
}

fn freq_outputs(d: &Dataset) -> Outputs {
    let mut mu = Vec::new();
    let mut tau = Vec::new();
    for m in [TauMethod::Dl, TauMethod::Reml] {
        let r = random_effects_normal(d, m, 0.95).unwrap();
        mu.extend([r.mu_hat, r.interval.lo, r.interval.hi]);
        tau.push(r.tau_hat);
        let h = hksj_interval(d, m, 0.95, false).unwrap();
        mu.extend([h.interval.lo, h.interval.hi]);
    }
    let q = q_profile_interval(d, 0.95).unwrap();
    tau.extend([q.lo, q.hi]);
    Outputs { mu, tau }
}

pub fn translation_equivariance() {
    let mut rng = StdRng::seed_from_u64(11);
    let hp = HeterogeneityPrior::half_normal(0.5).unwrap();
    for k in [1usize, 2, 3, 5] {
        let d = random_dataset(&mut rng, k);
        for c in [-3.7, 0.25, 12.0] {
            let shifted = d.shifted(c).unwrap();
            let (a, b) = (bayes_outputs(&d, &hp), bayes_outputs(&shifted, &hp));
            for (x, y) in a.mu.iter().zip(&b.mu) {
                assert!((x + c - y).abs() < 1e-9, "k={k} c={c}: {x} + c vs {y}");
            }
            for (x, y) in a.tau.iter().zip(&b.tau) {
                assert!((x - y).abs() < 1e-9, "k={k} c={c}: tau {x} vs {y}");
            }
            if k >= 2 {
                let (a, b) = (freq_outputs(&d), freq_outputs(&shifted));
                for (x, y) in a.mu.iter().zip(&b.mu) {
                    assert!((x + c - y).abs() < 1e-9, "freq k={k} c={c}");
                }
                for (x, y) in a.tau.iter().zip(&b.tau) {
                    assert!((x - y).abs() < 1e-9, "freq tau k={k} c={c}: {x} vs {y}");
                }
            }
        }
    }
}

pub fn scale_equivariance() {
    let mut rng = StdRng::seed_from_u64(12);
    let hp = HeterogeneityPrior::half_normal(0.5).unwrap();
    for k in [1usize, 2, 3, 5] {
        let d = random_dataset(&mut rng, k);
        for c in [0.05, 1.7, 40.0] {
            let scaled = d.scaled(c).unwrap();
            let (a, b) = (bayes_outputs(&d, &hp), bayes_outputs(&scaled, &hp.scaled(c).unwrap()));
            for (x, y) in a.mu.iter().chain(&a.tau).zip(b.mu.iter().chain(&b.tau)) {
                assert!((c * x - y).abs() <= 1e-9 * (c * x).abs().max(c), "k={k} c={c}: c*{x} vs {y}");
            }
            if k >= 2 {
                let (a, b) = (freq_outputs(&d), freq_outputs(&scaled));
                for (x, y) in a.mu.iter().chain(&a.tau).zip(b.mu.iter().chain(&b.tau)) {
                    assert!((c * x - y).abs() <= 1e-9 * (c * x).abs().max(c), "freq k={k} c={c}: c*{x} vs {y}");
                }
            }
        }
    }
}

pub fn q_is_non_increasing_in_tau() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..100 {
        let k = rng.gen_range(2..15);
        let d = random_dataset(&mut rng, k);
        let mut last = f64::INFINITY;
        for i in 0..=200 {
            let tau = 5.0 * i as f64 / 200.0;
            let q = q_statistic(&d, tau).unwrap();
            assert!(q <= last * (1.0 + 1e-12), "k={k} tau={tau}");
            last = q;
        }
    }
}

pub fn mixture_cdf_monotone_and_normalised() {
    let mut rng = StdRng::seed_from_u64(14);
    let hp = HeterogeneityPrior::half_normal(0.5).unwrap();
    let mut mixtures = Vec::new();
    for i in 0..10 {
        let d = random_dataset(&mut rng, 1 + i % 5);
        mixtures.push(BayesFit::new(&d, &hp, &EffectPrior::ImproperUniform).unwrap().mu_mixture().unwrap());
    }
    mixtures.extend((0..20).map(|_| random_mixture(&mut rng)));
    for m in mixtures {
        let (mean, sd) = m.moment_matched();
        let (lo, hi) = (mean - 30.0 * sd, mean + 30.0 * sd);
        assert!(m.cdf(lo) < 1e-12 && m.cdf(hi) > 1.0 - 1e-12);
        let mut last = 0.0;
        for i in 0..=2000 {
            let p = m.cdf(lo + (hi - lo) * i as f64 / 2000.0);
            assert!(p >= last);
            last = p;
        }
        let total = integrate(|x| m.density(x), Interval::new(lo, hi).unwrap(), 1e-10).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}

pub fn posterior_variance_exceeds_tau_zero_conditional() {
    let mut rng = StdRng::seed_from_u64(15);
    let hp = HeterogeneityPrior::half_normal(0.5).unwrap();
    for i in 0..20 {
        let d = random_dataset(&mut rng, 1 + i % 6);
        let m = BayesFit::new(&d, &hp, &EffectPrior::ImproperUniform).unwrap().mu_mixture().unwrap();
        let (_, v0) = conditional_mu_moments(&d, 0.0, &EffectPrior::ImproperUniform);
        assert!(m.variance() >= v0, "{} < {v0}", m.variance());
    }
}

pub fn hksj_shares_the_normal_point_estimate() {
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..100 {
        let k = rng.gen_range(2..12);
        let d = random_dataset(&mut rng, k);
        for m in [TauMethod::Dl, TauMethod::Reml] {
            let n = random_effects_normal(&d, m, 0.95).unwrap();
            let h = hksj_interval(&d, m, 0.95, false).unwrap();
            assert_eq!(n.mu_hat, h.mu_hat);
            assert_eq!(n.tau_hat, h.tau_hat);
        }
    }
}

pub fn shortest_never_wider_than_central() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..100 {
        let m = random_mixture(&mut rng);
        let level = rng.gen_range(0.5..0.99);
        let s = m.credible_interval(level, IntervalKind::Shortest).unwrap();
        let c = m.credible_interval(level, IntervalKind::Central).unwrap();
        assert!(s.width() <= c.width(), "{} > {}", s.width(), c.width());
        let mass = m.cdf(s.hi) - m.cdf(s.lo);
        assert!((mass - level).abs() < 1e-8, "mass {mass} vs {level}");
    }
}
