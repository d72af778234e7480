//! Exact Bayesian inference for the normal-normal hierarchical model
//!
//! ```text
//! y_i ~ N(θ_i, σ_i²),   θ_i ~ N(μ, τ²)
//! ```
//!
//! Conditional on τ everything is conjugate: μ | τ, y is normal and so is
//! each θ_i | τ, y. The marginal posterior of τ is one-dimensional, so it is
//! evaluated on an adaptive grid and every μ-related posterior becomes a
//! finite normal mixture over the grid nodes.

mod mixture;
mod tau;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::numerics::Interval;
use crate::priors::{EffectPrior, HeterogeneityPrior};

pub use mixture::{Component, NormalMixture, PRUNE_WEIGHT, SHORTEST_ALPHA_TOL};
pub use tau::{tau_grid_upper, TauNode, TauPosterior, MAX_NEIGHBOUR_KL, MAX_NODES, MAX_SEGMENT_MASS, TAIL_MASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    #[default]
    Shortest,
    Central,
}

impl std::str::FromStr for IntervalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shortest" => Ok(IntervalKind::Shortest),
            "central" => Ok(IntervalKind::Central),
            _ => Err(Error::Config(format!("unknown interval kind {s:?} (expected shortest or central)"))),
        }
    }
}

impl IntervalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntervalKind::Shortest => "shortest",
            IntervalKind::Central => "central",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub interval: Interval,
    pub level: f64,
    pub interval_kind: IntervalKind,
}

/// Data plus priors.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub data: Dataset,
    pub tau_prior: HeterogeneityPrior,
    pub effect_prior: EffectPrior,
}

impl Model {
    pub fn new(data: Dataset, tau_prior: HeterogeneityPrior, effect_prior: EffectPrior) -> Self {
        Model {
            data,
            tau_prior,
            effect_prior,
        }
    }
}

// Observations entering the conditional μ posterior: the studies with
// variance σ² + τ², plus a pseudo-study for a normal effect prior.
fn observations<'a>(
    d: &'a Dataset,
    tau: f64,
    ep: &'a EffectPrior,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let t2 = tau * tau;
    let pseudo = match *ep {
        EffectPrior::ImproperUniform => None,
        EffectPrior::Normal { mean, sd } => Some((mean, sd * sd)),
    };
    d.studies()
        .iter()
        .map(move |s| (s.y, s.variance() + t2))
        .chain(pseudo)
}

/// Mean and variance of μ | τ, y.
pub fn conditional_mu_moments(d: &Dataset, tau: f64, ep: &EffectPrior) -> (f64, f64) {
    let (sw, swy) = observations(d, tau, ep).fold((0.0, 0.0), |(sw, swy), (y, v)| (sw + 1.0 / v, swy + y / v));
    (swy / sw, 1.0 / sw)
}

/// Unnormalised log marginal posterior of τ: log prior plus the log
/// likelihood with μ integrated out.
pub fn tau_log_marginal_posterior(
    d: &Dataset,
    hp: &HeterogeneityPrior,
    ep: &EffectPrior,
    tau: f64,
) -> Result<f64> {
    let log_prior = hp.ln_density(tau)?;
    if log_prior == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let (mean, var) = conditional_mu_moments(d, tau, ep);
    let t2 = tau * tau;
    let (log_var_sum, resid) = d.studies().iter().fold((0.0, 0.0), |(lv, r), s| {
        let v = s.variance() + t2;
        let e = s.y - mean;
        (lv + v.ln(), r + e * e / v)
    });
    let prior_resid = match *ep {
        EffectPrior::ImproperUniform => 0.0,
        EffectPrior::Normal { mean: m0, sd } => (m0 - mean) * (m0 - mean) / (sd * sd),
    };
    // -1/2 log Σw = +1/2 log var
    Ok(log_prior - 0.5 * log_var_sum + 0.5 * var.ln() - 0.5 * (resid + prior_resid))
}

/// A fitted model: the τ posterior and everything derived from its grid.
#[derive(Debug, Clone)]
pub struct BayesFit {
    model: Model,
    tau: TauPosterior,
}

impl BayesFit {
    pub fn new(data: &Dataset, hp: &HeterogeneityPrior, ep: &EffectPrior) -> Result<Self> {
        let model = Model::new(data.clone(), *hp, *ep);
        let tau = TauPosterior::build(&model)?;
        Ok(BayesFit { model, tau })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn tau_posterior(&self) -> &TauPosterior {
        &self.tau
    }

    fn mix(&self, f: impl Fn(&TauNode) -> (f64, f64)) -> Result<NormalMixture> {
        NormalMixture::from_unnormalized(self.tau.nodes().iter().map(|n| {
            let (mean, var) = f(n);
            Component {
                weight: n.weight,
                mean,
                sd: var.sqrt(),
            }
        }))
    }

    /// Marginal posterior of μ.
    pub fn mu_mixture(&self) -> Result<NormalMixture> {
        self.mix(|n| (n.mu_mean, n.mu_variance))
    }

    /// Posterior predictive distribution of a new study's true effect.
    pub fn predictive_mixture(&self) -> Result<NormalMixture> {
        self.mix(|n| (n.mu_mean, n.mu_variance + n.tau * n.tau))
    }

    /// Posterior of the study-specific effect θ_i (zero-based index).
    pub fn shrinkage_mixture(&self, study_index: usize) -> Result<NormalMixture> {
        let k = self.model.data.k();
        let study = self
            .model
            .data
            .studies()
            .get(study_index)
            .ok_or(Error::StudyIndex { index: study_index, k })?;
        let (y, s2) = (study.y, study.variance());
        self.mix(|n| {
            let t2 = n.tau * n.tau;
            // weight on the study's own estimate
            let b = t2 / (s2 + t2);
            let mean = b * y + (1.0 - b) * n.mu_mean;
            let var = s2 * b + (1.0 - b) * (1.0 - b) * n.mu_variance;
            (mean, var)
        })
    }

    pub fn mu_summary(&self, level: f64, kind: IntervalKind) -> Result<PosteriorSummary> {
        let m = self.mu_mixture()?;
        summarize(&m, level, kind)
    }

    pub fn tau_summary(&self, level: f64) -> Result<PosteriorSummary> {
        self.tau.summary(level)
    }
}

/// Mean, sd, median and credible interval of a mixture.
pub fn summarize(m: &NormalMixture, level: f64, kind: IntervalKind) -> Result<PosteriorSummary> {
    let (mean, sd) = m.moment_matched();
    Ok(PosteriorSummary {
        mean,
        sd,
        median: m.quantile(0.5)?,
        interval: m.credible_interval(level, kind)?,
        level,
        interval_kind: kind,
    })
}

pub fn build_tau_posterior(d: &Dataset, hp: &HeterogeneityPrior, ep: &EffectPrior) -> Result<TauPosterior> {
    TauPosterior::build(&Model::new(d.clone(), *hp, *ep))
}

pub fn mu_marginal_mixture(d: &Dataset, hp: &HeterogeneityPrior, ep: &EffectPrior) -> Result<NormalMixture> {
    BayesFit::new(d, hp, ep)?.mu_mixture()
}

pub fn predictive_mixture(d: &Dataset, hp: &HeterogeneityPrior, ep: &EffectPrior) -> Result<NormalMixture> {
    BayesFit::new(d, hp, ep)?.predictive_mixture()
}

pub fn shrinkage_mixture(
    d: &Dataset,
    hp: &HeterogeneityPrior,
    ep: &EffectPrior,
    study_index: usize,
) -> Result<NormalMixture> {
    BayesFit::new(d, hp, ep)?.shrinkage_mixture(study_index)
}

pub fn mixture_density(m: &NormalMixture, x: f64) -> f64 {
    m.density(x)
}

pub fn mixture_cdf(m: &NormalMixture, x: f64) -> f64 {
    m.cdf(x)
}

pub fn mixture_quantile(m: &NormalMixture, p: f64) -> Result<f64> {
    m.quantile(p)
}

pub fn credible_interval(m: &NormalMixture, level: f64, kind: IntervalKind) -> Result<Interval> {
    m.credible_interval(level, kind)
}

pub fn moment_matched_normal(m: &NormalMixture) -> (f64, f64) {
    m.moment_matched()
}

pub fn tau_posterior_summary(tp: &TauPosterior, level: f64) -> Result<PosteriorSummary> {
    tp.summary(level)
}
