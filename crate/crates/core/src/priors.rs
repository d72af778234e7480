//! Prior distributions for the overall effect μ and the heterogeneity τ.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{check_probability, erfc, normal_cdf, normal_quantile};

/// Prior for the overall effect μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum EffectPrior {
    ImproperUniform,
    Normal { mean: f64, sd: f64 },
}

impl EffectPrior {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::Domain(format!("invalid normal effect prior ({mean}, {sd})")));
        }
        Ok(EffectPrior::Normal { mean, sd })
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, EffectPrior::ImproperUniform)
    }
}

/// Prior for the between-study standard deviation τ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum HeterogeneityPrior {
    HalfNormal { scale: f64 },
    HalfCauchy { scale: f64 },
    Uniform { upper: f64 },
    LogNormal { mu_log: f64, sd_log: f64 },
    PointMass { value: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl HeterogeneityPrior {
    pub fn half_normal(scale: f64) -> Result<Self> {
        Ok(HeterogeneityPrior::HalfNormal {
            scale: positive("scale", scale)?,
        })
    }

    pub fn half_cauchy(scale: f64) -> Result<Self> {
        Ok(HeterogeneityPrior::HalfCauchy {
            scale: positive("scale", scale)?,
        })
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        Ok(HeterogeneityPrior::Uniform {
            upper: positive("upper", upper)?,
        })
    }

    pub fn log_normal(mu_log: f64, sd_log: f64) -> Result<Self> {
        if !mu_log.is_finite() {
            return Err(Error::Domain(format!("mu_log must be finite, got {mu_log}")));
        }
        Ok(HeterogeneityPrior::LogNormal {
            mu_log,
            sd_log: positive("sd_log", sd_log)?,
        })
    }

    /// Log-normal prior with spread `sd_log` whose `q`-quantile is `value`.
    pub fn log_normal_with_quantile(q: f64, value: f64, sd_log: f64) -> Result<Self> {
        check_probability(q, "quantile level")?;
        let value = positive("quantile value", value)?;
        let mu_log = value.ln() - sd_log * normal_quantile(q)?;
        HeterogeneityPrior::log_normal(mu_log, sd_log)
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!("point mass must be finite and >= 0, got {value}")));
        }
        Ok(HeterogeneityPrior::PointMass { value })
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self, HeterogeneityPrior::PointMass { .. })
    }

    /// Upper end of the support (∞ except for the uniform prior).
    pub fn support_upper(&self) -> f64 {
        match *self {
            HeterogeneityPrior::Uniform { upper } => upper,
            HeterogeneityPrior::PointMass { value } => value,
            _ => f64::INFINITY,
        }
    }

    /// The same family with every scale parameter multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        positive("scale factor", c)?;
        Ok(match *self {
            HeterogeneityPrior::HalfNormal { scale } => HeterogeneityPrior::HalfNormal { scale: c * scale },
            HeterogeneityPrior::HalfCauchy { scale } => HeterogeneityPrior::HalfCauchy { scale: c * scale },
            HeterogeneityPrior::Uniform { upper } => HeterogeneityPrior::Uniform { upper: c * upper },
            HeterogeneityPrior::LogNormal { mu_log, sd_log } => HeterogeneityPrior::LogNormal {
                mu_log: mu_log + c.ln(),
                sd_log,
            },
            HeterogeneityPrior::PointMass { value } => HeterogeneityPrior::PointMass { value: c * value },
        })
    }

    /// Log density at `tau`; `-inf` outside the support.
    pub fn ln_density(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) {
            return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
        }
        Ok(match *self {
            HeterogeneityPrior::HalfNormal { scale } => {
                let z = tau / scale;
                0.5 * (2.0 / PI).ln() - scale.ln() - 0.5 * z * z
            }
            HeterogeneityPrior::HalfCauchy { scale } => {
                let z = tau / scale;
                (2.0 / PI).ln() - scale.ln() - (z * z).ln_1p()
            }
            HeterogeneityPrior::Uniform { upper } => {
                if tau <= upper {
                    -upper.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            HeterogeneityPrior::LogNormal { mu_log, sd_log } => {
                if tau == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let z = (tau.ln() - mu_log) / sd_log;
                    -0.5 * z * z - tau.ln() - sd_log.ln() - 0.5 * (2.0 * PI).ln()
                }
            }
            HeterogeneityPrior::PointMass { .. } => return Err(Error::PointMassDensity),
        })
    }

    pub fn density(&self, tau: f64) -> Result<f64> {
        self.ln_density(tau).map(f64::exp)
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return match *self {
                HeterogeneityPrior::PointMass { value } if value <= tau => 1.0,
                _ => 0.0,
            };
        }
        match *self {
            HeterogeneityPrior::HalfNormal { scale } => 1.0 - erfc(tau / scale * FRAC_1_SQRT_2),
            HeterogeneityPrior::HalfCauchy { scale } => 2.0 / PI * (tau / scale).atan(),
            HeterogeneityPrior::Uniform { upper } => (tau / upper).min(1.0),
            HeterogeneityPrior::LogNormal { mu_log, sd_log } => normal_cdf((tau.ln() - mu_log) / sd_log),
            HeterogeneityPrior::PointMass { value } => {
                if tau >= value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_probability(q, "quantile level")?;
        Ok(match *self {
            HeterogeneityPrior::HalfNormal { scale } => scale * normal_quantile(0.5 + 0.5 * q)?,
            HeterogeneityPrior::HalfCauchy { scale } => scale * (0.5 * PI * q).tan(),
            HeterogeneityPrior::Uniform { upper } => q * upper,
            HeterogeneityPrior::LogNormal { mu_log, sd_log } => {
                (mu_log + sd_log * normal_quantile(q)?).exp()
            }
            HeterogeneityPrior::PointMass { value } => value,
        })
    }
}

pub fn tau_prior_density(p: &HeterogeneityPrior, tau: f64) -> Result<f64> {
    p.density(tau)
}

pub fn tau_prior_quantile(p: &HeterogeneityPrior, q: f64) -> Result<f64> {
    p.quantile(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities() {
        let hn = HeterogeneityPrior::half_normal(0.5).unwrap();
        assert!((hn.density(0.0).unwrap() - 1.595_769_121_605_731).abs() < 1e-14);
        let u = HeterogeneityPrior::uniform(2.0).unwrap();
        assert_eq!(u.density(1.0).unwrap(), 0.5);
        assert_eq!(u.density(2.5).unwrap(), 0.0);
        let hc = HeterogeneityPrior::half_cauchy(1.0).unwrap();
        assert!((hc.density(1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn point_mass_has_no_density() {
        let pm = HeterogeneityPrior::point_mass(0.3).unwrap();
        assert!(matches!(pm.density(0.3), Err(Error::PointMassDensity)));
        assert_eq!(pm.quantile(0.01).unwrap(), 0.3);
        assert_eq!(pm.quantile(0.99).unwrap(), 0.3);
    }

    #[test]
    fn quantiles() {
        let hn = HeterogeneityPrior::half_normal(0.5).unwrap();
        assert!((hn.quantile(0.95).unwrap() - 0.979_981_992_270_027).abs() < 1e-12);
        let hc = HeterogeneityPrior::half_cauchy(1.0).unwrap();
        assert!((hc.quantile(0.5).unwrap() - 1.0).abs() < 1e-15);
        let u = HeterogeneityPrior::uniform(2.0).unwrap();
        assert_eq!(u.quantile(0.25).unwrap(), 0.5);
        assert!(hn.quantile(0.0).is_err());
        assert!(hn.quantile(1.0).is_err());
    }

    #[test]
    fn negative_tau_rejected() {
        let hn = HeterogeneityPrior::half_normal(0.5).unwrap();
        assert!(hn.density(-0.1).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(HeterogeneityPrior::half_normal(0.0).is_err());
        assert!(HeterogeneityPrior::uniform(-1.0).is_err());
        assert!(HeterogeneityPrior::log_normal(0.0, 0.0).is_err());
        assert!(HeterogeneityPrior::point_mass(-1.0).is_err());
        assert!(EffectPrior::normal(0.0, 0.0).is_err());
    }

    #[test]
    fn log_normal_from_quantile() {
        let p = HeterogeneityPrior::log_normal_with_quantile(0.95, 1.16, 1.0).unwrap();
        assert!((p.quantile(0.95).unwrap() - 1.16).abs() < 1e-12);
        assert!((p.cdf(1.16) - 0.95).abs() < 1e-12);
    }
}
