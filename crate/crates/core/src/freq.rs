//! Frequentist random-effects estimates: common-effect pooling,
//! DerSimonian-Laird and REML heterogeneity, normal and HKSJ intervals and
//! the Q-profile interval for τ.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::numerics::{
    check_probability, chisq_quantile, find_root, minimize_scalar, normal_quantile, student_t_quantile, Interval,
};

pub const REML_TOL: f64 = 1e-8;
const REML_SCAN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bayes,
    Common,
    Dl,
    Reml,
    Hksj,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bayes => "bayes",
            Method::Common => "common",
            Method::Dl => "dl",
            Method::Reml => "reml",
            Method::Hksj => "hksj",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bayes" => Ok(Method::Bayes),
            "common" => Ok(Method::Common),
            "dl" => Ok(Method::Dl),
            "reml" => Ok(Method::Reml),
            "hksj" => Ok(Method::Hksj),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected bayes, common, dl, reml or hksj)"
            ))),
        }
    }
}

/// Heterogeneity estimator used by the random-effects methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TauMethod {
    #[default]
    Dl,
    Reml,
}

impl TauMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TauMethod::Dl => "dl",
            TauMethod::Reml => "reml",
        }
    }
}

impl std::str::FromStr for TauMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dl" => Ok(TauMethod::Dl),
            "reml" => Ok(TauMethod::Reml),
            other => Err(Error::Config(format!("unknown tau estimator {other:?} (expected dl or reml)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequentistResult {
    pub method: Method,
    pub mu_hat: f64,
    pub se_mu: f64,
    pub interval: Interval,
    pub level: f64,
    pub tau_hat: f64,
    pub tau_interval: Interval,
    pub q_statistic: f64,
    /// Set when the interval has zero width (HKSJ on perfectly homogeneous data).
    pub degenerate: bool,
}

fn require_k(d: &Dataset, needed: usize) -> Result<()> {
    if d.k() < needed {
        Err(Error::TooFewStudies { needed, k: d.k() })
    } else {
        Ok(())
    }
}

struct Pooled {
    mu: f64,
    sum_w: f64,
}

fn pooled(d: &Dataset, tau: f64) -> Pooled {
    let t2 = tau * tau;
    if d.y_range() == 0.0 {
        // keep exactly homogeneous data exactly homogeneous
        let sum_w = d.studies().iter().map(|s| 1.0 / (s.variance() + t2)).sum();
        return Pooled { mu: d.studies()[0].y, sum_w };
    }
    let (sw, swy) = d.studies().iter().fold((0.0, 0.0), |(sw, swy), s| {
        let w = 1.0 / (s.variance() + t2);
        (sw + w, swy + w * s.y)
    });
    Pooled { mu: swy / sw, sum_w: sw }
}

fn weighted_rss(d: &Dataset, tau: f64, mu: f64) -> f64 {
    let t2 = tau * tau;
    d.studies()
        .iter()
        .map(|s| {
            let e = s.y - mu;
            e * e / (s.variance() + t2)
        })
        .sum()
}

/// Search range for τ used by REML and the Q-profile.
pub fn tau_search_upper(d: &Dataset) -> f64 {
    10.0 * (d.max_sigma() + d.y_range())
}

/// Generalised Q statistic at heterogeneity `tau`.
pub fn q_statistic(d: &Dataset, tau: f64) -> Result<f64> {
    require_k(d, 2)?;
    Ok(q_unchecked(d, tau))
}

fn q_unchecked(d: &Dataset, tau: f64) -> f64 {
    let p = pooled(d, tau);
    weighted_rss(d, tau, p.mu)
}

fn normal_result(d: &Dataset, method: Method, tau_hat: f64, level: f64) -> Result<FrequentistResult> {
    check_probability(level, "confidence level")?;
    let p = pooled(d, tau_hat);
    let se = p.sum_w.sqrt().recip();
    let z = normal_quantile(0.5 * (1.0 + level))?;
    let (tau_interval, q) = if d.k() >= 2 {
        (q_profile_interval(d, level)?, q_unchecked(d, 0.0))
    } else {
        (Interval::point(0.0), 0.0)
    };
    Ok(FrequentistResult {
        method,
        mu_hat: p.mu,
        se_mu: se,
        interval: Interval::new(p.mu - z * se, p.mu + z * se)?,
        level,
        tau_hat,
        tau_interval,
        q_statistic: q,
        degenerate: false,
    })
}

/// Inverse-variance (common-effect) pooling.
pub fn common_effect(d: &Dataset, level: f64) -> Result<FrequentistResult> {
    normal_result(d, Method::Common, 0.0, level)
}

/// DerSimonian-Laird moment estimate of τ (truncated at zero).
pub fn dl_tau(d: &Dataset) -> Result<f64> {
    require_k(d, 2)?;
    let q = q_unchecked(d, 0.0);
    let (s1, s2) = d.studies().iter().fold((0.0, 0.0), |(s1, s2), s| {
        let w = 1.0 / s.variance();
        (s1 + w, s2 + w * w)
    });
    let excess = q - (d.k() - 1) as f64;
    if excess <= 0.0 {
        return Ok(0.0);
    }
    Ok((excess / (s1 - s2 / s1)).sqrt())
}

/// Negative restricted log-likelihood (up to a constant) at `tau`.
fn neg_restricted_loglik(d: &Dataset, tau: f64) -> f64 {
    let t2 = tau * tau;
    let p = pooled(d, tau);
    let log_var: f64 = d.studies().iter().map(|s| (s.variance() + t2).ln()).sum();
    0.5 * (log_var + p.sum_w.ln() + weighted_rss(d, tau, p.mu))
}

/// Derivative of the restricted log-likelihood with respect to τ².
fn restricted_score(d: &Dataset, tau: f64) -> f64 {
    let t2 = tau * tau;
    let p = pooled(d, tau);
    let (sw2, sw2e2) = d.studies().iter().fold((0.0, 0.0), |(a, b), s| {
        let w = 1.0 / (s.variance() + t2);
        let e = s.y - p.mu;
        (a + w * w, b + w * w * e * e)
    });
    0.5 * (sw2e2 - p.sum_w + sw2 / p.sum_w)
}

/// Restricted maximum-likelihood estimate of τ.
///
/// A coarse scan locates the best region, Brent's minimiser narrows it down
/// to [`REML_TOL`], and the score equation is then solved inside the final
/// bracket whenever it changes sign there.
pub fn reml_tau(d: &Dataset) -> Result<f64> {
    require_k(d, 2)?;
    let upper = tau_search_upper(d);
    let grid: Vec<f64> = (0..=REML_SCAN).map(|i| upper * i as f64 / REML_SCAN as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&t| neg_restricted_loglik(d, t)).collect();
    let best = (0..grid.len())
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    if best == 0 && restricted_score(d, 0.0) <= 0.0 {
        return Ok(0.0);
    }
    let bracket = Interval {
        lo: grid[best.saturating_sub(1)],
        hi: grid[(best + 1).min(REML_SCAN)],
    };
    let mut tau = minimize_scalar(|t| neg_restricted_loglik(d, t), bracket, REML_TOL);
    let (ulo, uhi) = (restricted_score(d, bracket.lo), restricted_score(d, bracket.hi));
    if ulo > 0.0 && uhi < 0.0 {
        if let Ok(root) = find_root(|t| restricted_score(d, t), bracket, 1e-15 * upper) {
            let (at_root, at_min) = (neg_restricted_loglik(d, root), neg_restricted_loglik(d, tau));
            if at_root <= at_min + 1e-12 * at_min.abs() {
                tau = root;
            }
        }
    }
    if neg_restricted_loglik(d, 0.0) <= neg_restricted_loglik(d, tau) {
        return Ok(0.0);
    }
    Ok(tau)
}

pub fn estimate_tau(d: &Dataset, method: TauMethod) -> Result<f64> {
    match method {
        TauMethod::Dl => dl_tau(d),
        TauMethod::Reml => reml_tau(d),
    }
}

fn tau_method_tag(m: TauMethod) -> Method {
    match m {
        TauMethod::Dl => Method::Dl,
        TauMethod::Reml => Method::Reml,
    }
}

/// Random-effects estimate with a normal-approximation interval.
pub fn random_effects_normal(d: &Dataset, tau_method: TauMethod, level: f64) -> Result<FrequentistResult> {
    let tau = estimate_tau(d, tau_method)?;
    normal_result(d, tau_method_tag(tau_method), tau, level)
}

/// Hartung-Knapp-Sidik-Jonkman interval. With `modified`, the variance
/// scaling factor is floored at one.
pub fn hksj_interval(d: &Dataset, tau_method: TauMethod, level: f64, modified: bool) -> Result<FrequentistResult> {
    require_k(d, 2)?;
    check_probability(level, "confidence level")?;
    let tau = estimate_tau(d, tau_method)?;
    let p = pooled(d, tau);
    let dof = (d.k() - 1) as f64;
    let mut q = weighted_rss(d, tau, p.mu) / dof;
    if modified {
        q = q.max(1.0);
    }
    let se = (q / p.sum_w).sqrt();
    let t = student_t_quantile(0.5 * (1.0 + level), dof)?;
    Ok(FrequentistResult {
        method: Method::Hksj,
        mu_hat: p.mu,
        se_mu: se,
        interval: Interval::new(p.mu - t * se, p.mu + t * se)?,
        level,
        tau_hat: tau,
        tau_interval: q_profile_interval(d, level)?,
        q_statistic: q_unchecked(d, 0.0),
        degenerate: se == 0.0,
    })
}

/// Q-profile confidence interval for τ. Bounds without a solution are 0.
pub fn q_profile_interval(d: &Dataset, level: f64) -> Result<Interval> {
    require_k(d, 2)?;
    check_probability(level, "confidence level")?;
    let dof = (d.k() - 1) as f64;
    let q0 = q_unchecked(d, 0.0);
    let solve = |target: f64| -> Result<f64> {
        if q0 <= target {
            return Ok(0.0);
        }
        let mut hi = tau_search_upper(d).max(f64::MIN_POSITIVE);
        let mut tries = 0;
        while q_unchecked(d, hi) > target {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::NonConvergence("Q-profile bound not bracketed".into()));
            }
        }
        find_root(|t| q_unchecked(d, t) - target, Interval { lo: 0.0, hi }, 1e-14 * hi)
    };
    let lo = solve(chisq_quantile(0.5 * (1.0 + level), dof)?)?;
    let hi = solve(chisq_quantile(0.5 * (1.0 - level), dof)?)?;
    Interval::new(lo, hi)
}
