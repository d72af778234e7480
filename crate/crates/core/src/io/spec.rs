//! Text grammar for prior specifications.
//!
//! Heterogeneity: `half-normal:<scale>`, `half-cauchy:<scale>`,
//! `uniform:<upper>`, `log-normal:<mu>,<sd>`, `fixed:<value>`.
//! Effect: `uniform` or `normal:<mean>,<sd>`.

use crate::error::{Error, Result};
use crate::priors::{EffectPrior, HeterogeneityPrior};

fn spec_err(spec: &str, reason: impl Into<String>) -> Error {
    Error::PriorSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn numbers<const N: usize>(spec: &str, args: Option<&str>) -> Result<[f64; N]> {
    let args = args.ok_or_else(|| spec_err(spec, format!("expected {N} parameter(s)")))?;
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(spec_err(spec, format!("expected {N} parameter(s), got {}", parts.len())));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|_| spec_err(spec, format!("{part:?} is not a number")))?;
    }
    Ok(out)
}

pub fn parse_tau_prior(spec: &str) -> Result<HeterogeneityPrior> {
    let trimmed = spec.trim();
    let (family, args) = match trimmed.split_once(':') {
        Some((f, a)) => (f.trim(), Some(a)),
        None => (trimmed, None),
    };
    let built = match family {
        "half-normal" => numbers::<1>(spec, args).and_then(|[s]| HeterogeneityPrior::half_normal(s)),
        "half-cauchy" => numbers::<1>(spec, args).and_then(|[s]| HeterogeneityPrior::half_cauchy(s)),
        "uniform" => numbers::<1>(spec, args).and_then(|[u]| HeterogeneityPrior::uniform(u)),
        "log-normal" => numbers::<2>(spec, args).and_then(|[m, s]| HeterogeneityPrior::log_normal(m, s)),
        "fixed" => numbers::<1>(spec, args).and_then(|[v]| HeterogeneityPrior::point_mass(v)),
        other => return Err(spec_err(spec, format!("unknown heterogeneity prior family {other:?}"))),
    };
    built.map_err(|e| match e {
        Error::Domain(reason) => spec_err(spec, reason),
        other => other,
    })
}

pub fn parse_effect_prior(spec: &str) -> Result<EffectPrior> {
    let trimmed = spec.trim();
    if trimmed == "uniform" {
        return Ok(EffectPrior::ImproperUniform);
    }
    match trimmed.split_once(':') {
        Some(("normal", args)) => {
            let [m, s] = numbers::<2>(spec, Some(args))?;
            EffectPrior::normal(m, s).map_err(|e| spec_err(spec, e.to_string()))
        }
        _ => Err(spec_err(spec, "expected `uniform` or `normal:<mean>,<sd>`")),
    }
}

/// Splits a comma-separated list of heterogeneity prior specs. A bare number
/// continues the previous spec, so
/// `half-normal:0.5,log-normal:-1.5,1` yields two specs.
pub fn split_tau_prior_list(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in s.split(',') {
        match out.last_mut() {
            Some(last) if piece.trim().parse::<f64>().is_ok() => {
                last.push(',');
                last.push_str(piece);
            }
            _ => out.push(piece.to_string()),
        }
    }
    out
}

/// Canonical text form; parses back to the identical prior.
pub fn format_tau_prior(p: &HeterogeneityPrior) -> String {
    match *p {
        HeterogeneityPrior::HalfNormal { scale } => format!("half-normal:{scale}"),
        HeterogeneityPrior::HalfCauchy { scale } => format!("half-cauchy:{scale}"),
        HeterogeneityPrior::Uniform { upper } => format!("uniform:{upper}"),
        HeterogeneityPrior::LogNormal { mu_log, sd_log } => format!("log-normal:{mu_log},{sd_log}"),
        HeterogeneityPrior::PointMass { value } => format!("fixed:{value}"),
    }
}

pub fn format_effect_prior(p: &EffectPrior) -> String {
    match *p {
        EffectPrior::ImproperUniform => "uniform".to_string(),
        EffectPrior::Normal { mean, sd } => format!("normal:{mean},{sd}"),
    }
}
