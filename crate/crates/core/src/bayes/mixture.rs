use serde::{Deserialize, Serialize};

use super::IntervalKind;
use crate::error::{Error, Result};
use crate::numerics::{
    check_probability, find_root, minimize_scalar, normal_cdf, normal_pdf, normal_quantile, Interval,
};

/// Weights at or below this are dropped when a mixture is assembled.
pub const PRUNE_WEIGHT: f64 = 1e-12;
/// Tolerance on α₁ (lower-tail mass) for the shortest-interval search.
pub const SHORTEST_ALPHA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// A finite mixture of normal distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalMixture {
    components: Vec<Component>,
}

impl NormalMixture {
    /// Validates a mixture whose weights already sum to one.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("mixture needs at least one component".into()));
        }
        for c in &components {
            if !(c.weight > 0.0) || !c.mean.is_finite() || !(c.sd > 0.0) || !c.sd.is_finite() {
                return Err(Error::Domain(format!("invalid mixture component {c:?}")));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(NormalMixture { components })
    }

    /// Builds a mixture from unnormalised weights, dropping components whose
    /// normalised weight is at most [`PRUNE_WEIGHT`] and renormalising.
    pub fn from_unnormalized(components: impl IntoIterator<Item = Component>) -> Result<Self> {
        let raw: Vec<Component> = components.into_iter().filter(|c| c.weight > 0.0).collect();
        let total: f64 = raw.iter().map(|c| c.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Domain("mixture has no positive weight".into()));
        }
        let kept: Vec<Component> = raw
            .into_iter()
            .filter(|c| c.weight / total > PRUNE_WEIGHT)
            .collect();
        let kept_total: f64 = kept.iter().map(|c| c.weight).sum();
        let components = kept
            .into_iter()
            .map(|c| Component {
                weight: c.weight / kept_total,
                ..c
            })
            .collect();
        NormalMixture::new(components)
    }

    pub fn single(mean: f64, sd: f64) -> Result<Self> {
        NormalMixture::new(vec![Component { weight: 1.0, mean, sd }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_pdf((x - c.mean) / c.sd) / c.sd)
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let p: f64 = self
            .components
            .iter()
            .map(|c| c.weight * normal_cdf((x - c.mean) / c.sd))
            .sum();
        p.clamp(0.0, 1.0)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p, "probability")?;
        let z = normal_quantile(p)?;
        if let [c] = self.components.as_slice() {
            return Ok(c.mean + c.sd * z);
        }
        // every component CDF is <= p at the smallest component quantile and
        // >= p at the largest, so these bracket the mixture quantile
        let (lo, hi) = self.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            let q = c.mean + c.sd * z;
            (lo.min(q), hi.max(q))
        });
        // rounding can erase the sign change when the bracket is a few ulps
        // wide (e.g. p = 1/2 with a shared component mean)
        if self.cdf(lo) >= p {
            return Ok(lo);
        }
        if self.cdf(hi) <= p {
            return Ok(hi);
        }
        let tol = 1e-14 * (lo.abs() + hi.abs() + (hi - lo));
        find_root(|x| self.cdf(x) - p, Interval { lo, hi }, tol)
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Variance by the law of total variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let v: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (c.sd * c.sd + (c.mean - mean) * (c.mean - mean)))
            .sum();
        v.max(0.0)
    }

    /// Normal with the same mean and variance.
    pub fn moment_matched(&self) -> (f64, f64) {
        (self.mean(), self.variance().sqrt())
    }

    pub fn credible_interval(&self, level: f64, kind: IntervalKind) -> Result<Interval> {
        check_probability(level, "credible level")?;
        let central = Interval::new(self.quantile(0.5 * (1.0 - level))?, self.quantile(0.5 * (1.0 + level))?)?;
        match kind {
            IntervalKind::Central => Ok(central),
            IntervalKind::Shortest if self.len() == 1 => Ok(central),
            IntervalKind::Shortest => {
                let shortest = self.shortest_interval(level)?;
                Ok(if shortest.width() < central.width() { shortest } else { central })
            }
        }
    }

    fn shortest_interval(&self, level: f64) -> Result<Interval> {
        let spare = 1.0 - level;
        let edge = 1e-10 * spare;
        let (amin, amax) = (edge, spare - edge);
        let interval_at = |alpha: f64| -> Result<Interval> {
            Interval::new(self.quantile(alpha)?, self.quantile(alpha + level)?)
        };
        let width = |alpha: f64| interval_at(alpha).map(|i| i.width()).unwrap_or(f64::INFINITY);

        // coarse scan guards against a non-unimodal width profile
        const SCAN: usize = 16;
        let alphas: Vec<f64> = (0..=SCAN).map(|i| amin + (amax - amin) * i as f64 / SCAN as f64).collect();
        let widths: Vec<f64> = alphas.iter().map(|&a| width(a)).collect();
        let best = (0..=SCAN)
            .min_by(|&i, &j| widths[i].total_cmp(&widths[j]))
            .unwrap_or(SCAN / 2);
        let lo = alphas[best.saturating_sub(1)];
        let hi = alphas[(best + 1).min(SCAN)];
        let mut alpha = minimize_scalar(width, Interval { lo, hi }, SHORTEST_ALPHA_TOL);
        if widths[best] < width(alpha) {
            alpha = alphas[best];
        }

        // At the optimum both endpoints have equal density; solving for that
        // pins α₁ far more tightly than the minimiser's flat objective can.
        let gap = |a: f64| match interval_at(a) {
            Ok(i) => self.density(i.lo) - self.density(i.hi),
            Err(_) => f64::NAN,
        };
        let mut step = SHORTEST_ALPHA_TOL;
        while step < spare {
            let b = Interval {
                lo: (alpha - step).max(amin),
                hi: (alpha + step).min(amax),
            };
            let (ga, gb) = (gap(b.lo), gap(b.hi));
            if ga.is_finite() && gb.is_finite() && ga.signum() != gb.signum() {
                if let Ok(polished) = find_root(gap, b, 1e-15 * spare.max(1e-300)) {
                    if width(polished) <= width(alpha) + 1e-12 * width(alpha).abs() {
                        alpha = polished;
                    }
                }
                break;
            }
            step *= 4.0;
        }
        interval_at(alpha)
    }
}
