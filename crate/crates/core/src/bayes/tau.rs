use serde::Serialize;

use super::{conditional_mu_moments, tau_log_marginal_posterior, IntervalKind, Model, PosteriorSummary};
use crate::error::{Error, Result};
use crate::numerics::{check_probability, find_root, integrate, Interval};
use crate::priors::HeterogeneityPrior;

/// Upper prior tail mass cut off by the grid.
pub const TAIL_MASS: f64 = 1e-7;
/// Largest symmetrised KL divergence allowed between neighbouring conditional μ components.
pub const MAX_NEIGHBOUR_KL: f64 = 1e-3;
/// Largest share of the posterior mass allowed in a single grid segment.
pub const MAX_SEGMENT_MASS: f64 = 0.01;
pub const MAX_NODES: usize = 10_000;
const NORMALIZATION_REL_TOL: f64 = 1e-10;
const INITIAL_SEGMENTS: usize = 32;

/// A grid node of the heterogeneity posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauNode {
    pub tau: f64,
    /// Log of the normalised posterior density at `tau`.
    pub log_density: f64,
    /// Trapezoidal quadrature weight (the node weights sum to one).
    pub weight: f64,
    /// Conditional posterior mean of μ given this τ.
    pub mu_mean: f64,
    /// Conditional posterior variance of μ given this τ.
    pub mu_variance: f64,
}

/// Marginal posterior of τ on an adaptive grid.
///
/// The grid only drives the mixture discretisation. The density itself is
/// evaluated exactly, so the CDF and quantiles come from adaptive quadrature
/// between grid nodes.
#[derive(Debug, Clone)]
pub struct TauPosterior {
    model: Model,
    nodes: Vec<TauNode>,
    log_normalizer: f64,
    cumulative: Vec<f64>,
    point_mass: Option<f64>,
}

fn sym_kl(m1: f64, v1: f64, m2: f64, v2: f64) -> f64 {
    let dm = m1 - m2;
    0.5 * (v1 / v2 + v2 / v1 - 2.0) + 0.5 * dm * dm * (1.0 / v1 + 1.0 / v2)
}

/// Upper end of the τ grid: the prior's 1 - 1e-7 quantile or ten times the
/// data scale, whichever is larger, capped at the prior support.
pub fn tau_grid_upper(model: &Model) -> Result<f64> {
    let d = &model.data;
    let prior_q = model.tau_prior.quantile(1.0 - TAIL_MASS)?;
    let data_scale = 10.0 * (d.max_sigma() + d.y_range());
    Ok(prior_q.max(data_scale).min(model.tau_prior.support_upper()))
}

#[derive(Clone, Copy)]
struct Raw {
    tau: f64,
    log_post: f64,
    mean: f64,
    var: f64,
}

impl Raw {
    fn at(model: &Model, tau: f64) -> Result<Raw> {
        let (mean, var) = conditional_mu_moments(&model.data, tau, &model.effect_prior);
        let log_post = tau_log_marginal_posterior(&model.data, &model.tau_prior, &model.effect_prior, tau)?;
        Ok(Raw { tau, log_post, mean, var })
    }
}

impl TauPosterior {
    pub(crate) fn build(model: &Model) -> Result<TauPosterior> {
        if let HeterogeneityPrior::PointMass { value } = model.tau_prior {
            let (mean, var) = conditional_mu_moments(&model.data, value, &model.effect_prior);
            return Ok(TauPosterior {
                model: model.clone(),
                nodes: vec![TauNode {
                    tau: value,
                    log_density: 0.0,
                    weight: 1.0,
                    mu_mean: mean,
                    mu_variance: var,
                }],
                log_normalizer: 0.0,
                cumulative: vec![0.0, 1.0],
                point_mass: Some(value),
            });
        }

        let upper = tau_grid_upper(model)?;
        let mut taus: Vec<f64> = (0..=INITIAL_SEGMENTS)
            .map(|i| upper * i as f64 / INITIAL_SEGMENTS as f64)
            .collect();
        let start = 1e-2 * model.data.min_sigma();
        if start < upper {
            let ratio = (upper / start).ln() / INITIAL_SEGMENTS as f64;
            taus.extend((0..INITIAL_SEGMENTS).map(|i| start * (ratio * i as f64).exp()));
        }
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let mut raw = taus
            .into_iter()
            .map(|t| Raw::at(model, t))
            .collect::<Result<Vec<_>>>()?;

        loop {
            let shift = raw.iter().map(|r| r.log_post).fold(f64::NEG_INFINITY, f64::max);
            if !shift.is_finite() {
                return Err(Error::NonConvergence("posterior of tau vanishes on the grid".into()));
            }
            let dens: Vec<f64> = raw.iter().map(|r| (r.log_post - shift).exp()).collect();
            let seg_mass: Vec<f64> = raw
                .windows(2)
                .zip(dens.windows(2))
                .map(|(r, p)| 0.5 * (p[0] + p[1]) * (r[1].tau - r[0].tau))
                .collect();
            let total: f64 = seg_mass.iter().sum();

            let mut next = Vec::with_capacity(2 * raw.len());
            for (i, pair) in raw.windows(2).enumerate() {
                let (a, b) = (&pair[0], &pair[1]);
                next.push(*a);
                let too_coarse = sym_kl(a.mean, a.var, b.mean, b.var) > MAX_NEIGHBOUR_KL
                    || seg_mass[i] > MAX_SEGMENT_MASS * total;
                let mid = 0.5 * (a.tau + b.tau);
                if too_coarse && mid > a.tau && mid < b.tau {
                    next.push(Raw::at(model, mid)?);
                }
            }
            next.push(raw[raw.len() - 1]);
            if next.len() == raw.len() {
                break;
            }
            if next.len() > MAX_NODES {
                return Err(Error::NonConvergence(format!(
                    "tau grid refinement exceeded {MAX_NODES} nodes"
                )));
            }
            raw = next;
        }

        // exact normalisation by quadrature, segment by segment
        let shift = raw.iter().map(|r| r.log_post).fold(f64::NEG_INFINITY, f64::max);
        let shifted = |t: f64| -> f64 {
            tau_log_marginal_posterior(&model.data, &model.tau_prior, &model.effect_prior, t)
                .map(|lp| (lp - shift).exp())
                .unwrap_or(0.0)
        };
        let mut cumulative = Vec::with_capacity(raw.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for pair in raw.windows(2) {
            acc += integrate(shifted, Interval { lo: pair[0].tau, hi: pair[1].tau }, NORMALIZATION_REL_TOL)?;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::NonConvergence("tau posterior has zero mass".into()));
        }
        for c in cumulative.iter_mut() {
            *c /= acc;
        }
        let log_normalizer = shift + acc.ln();

        let n = raw.len();
        let mut weights: Vec<f64> = (0..n)
            .map(|j| {
                let left = if j > 0 { raw[j].tau - raw[j - 1].tau } else { 0.0 };
                let right = if j + 1 < n { raw[j + 1].tau - raw[j].tau } else { 0.0 };
                0.5 * (left + right) * (raw[j].log_post - shift).exp()
            })
            .collect();
        let wsum: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= wsum;
        }
        let nodes = raw
            .iter()
            .zip(weights)
            .map(|(r, weight)| TauNode {
                tau: r.tau,
                log_density: r.log_post - log_normalizer,
                weight,
                mu_mean: r.mean,
                mu_variance: r.var,
            })
            .collect();
        Ok(TauPosterior {
            model: model.clone(),
            nodes,
            log_normalizer,
            cumulative,
            point_mass: None,
        })
    }

    pub fn nodes(&self) -> &[TauNode] {
        &self.nodes
    }

    /// `(tau, log_density)` pairs of the grid.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().map(|n| (n.tau, n.log_density))
    }

    /// Log of the normalisation constant of the (unnormalised) log posterior
    /// returned by [`super::tau_log_marginal_posterior`].
    pub fn log_normalization_constant(&self) -> f64 {
        self.log_normalizer
    }

    pub fn point_mass(&self) -> Option<f64> {
        self.point_mass
    }

    pub fn upper(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].tau
    }

    /// Normalised posterior density; zero outside the grid range.
    pub fn density(&self, tau: f64) -> Result<f64> {
        if self.point_mass.is_some() {
            return Err(Error::PointMassDensity);
        }
        if tau < 0.0 || tau > self.upper() {
            return Ok(0.0);
        }
        let m = &self.model;
        Ok((tau_log_marginal_posterior(&m.data, &m.tau_prior, &m.effect_prior, tau)? - self.log_normalizer).exp())
    }

    fn density_or_zero(&self, tau: f64) -> f64 {
        self.density(tau).unwrap_or(0.0)
    }

    pub fn cdf(&self, tau: f64) -> Result<f64> {
        if let Some(v) = self.point_mass {
            return Ok(if tau >= v { 1.0 } else { 0.0 });
        }
        if tau <= 0.0 {
            return Ok(0.0);
        }
        if tau >= self.upper() {
            return Ok(1.0);
        }
        let j = self.nodes.partition_point(|n| n.tau <= tau) - 1;
        let start = self.nodes[j].tau;
        let part = integrate(|t| self.density_or_zero(t), Interval { lo: start, hi: tau }, NORMALIZATION_REL_TOL)?;
        Ok((self.cumulative[j] + part).min(1.0))
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p, "probability")?;
        if let Some(v) = self.point_mass {
            return Ok(v);
        }
        let j = self.cumulative.partition_point(|&c| c < p).clamp(1, self.nodes.len() - 1);
        let bracket = Interval {
            lo: self.nodes[j - 1].tau,
            hi: self.nodes[j].tau,
        };
        let tol = 1e-14 * self.upper();
        find_root(|t| self.cdf(t).unwrap_or(f64::NAN) - p, bracket, tol)
    }

    fn moment(&self, power: i32) -> Result<f64> {
        if let Some(v) = self.point_mass {
            return Ok(v.powi(power));
        }
        let mut acc = 0.0;
        for pair in self.nodes.windows(2) {
            acc += integrate(
                |t| t.powi(power) * self.density_or_zero(t),
                Interval { lo: pair[0].tau, hi: pair[1].tau },
                NORMALIZATION_REL_TOL,
            )?;
        }
        Ok(acc)
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1)
    }

    pub fn sd(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok((self.moment(2)? - m * m).max(0.0).sqrt())
    }

    /// Median, central interval, mean and sd of τ.
    pub fn summary(&self, level: f64) -> Result<PosteriorSummary> {
        check_probability(level, "credible level")?;
        let interval = Interval::new(self.quantile(0.5 * (1.0 - level))?, self.quantile(0.5 * (1.0 + level))?)?;
        Ok(PosteriorSummary {
            mean: self.mean()?,
            sd: self.sd()?,
            median: self.quantile(0.5)?,
            interval,
            level,
            interval_kind: IntervalKind::Central,
        })
    }
}
