use std::path::PathBuf;

use serde::Serialize;

use super::spec::{format_effect_prior, format_tau_prior, parse_effect_prior, parse_tau_prior};
use crate::bayes::{summarize, BayesFit, IntervalKind};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::freq::{self, FrequentistResult, Method, TauMethod};
use crate::numerics::check_probability;
use crate::priors::{EffectPrior, HeterogeneityPrior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!("unknown output format {other:?} (expected json or text)"))),
        }
    }
}

/// Everything that determines one analysis run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub tau_prior_spec: String,
    pub effect_prior_spec: String,
    pub level: f64,
    pub interval_kind: IntervalKind,
    pub methods: Vec<Method>,
    /// Keep only the last `n` studies.
    pub subset: Option<usize>,
    pub plot_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// Heterogeneity estimator behind the HKSJ interval.
    pub hksj_tau: TauMethod,
    pub hksj_modified: bool,
    /// Input file, echoed in the report.
    pub input: Option<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tau_prior_spec: "half-normal:0.5".into(),
            effect_prior_spec: "uniform".into(),
            level: 0.95,
            interval_kind: IntervalKind::Shortest,
            methods: vec![Method::Bayes, Method::Dl, Method::Reml],
            subset: None,
            plot_path: None,
            output_format: OutputFormat::Json,
            hksj_tau: TauMethod::Dl,
            hksj_modified: false,
            input: None,
        }
    }
}

/// Parses `bayes,dl,...`, keeping first-mention order and dropping repeats.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no methods selected".into()));
    }
    Ok(out)
}

/// Parses `last:<n>`.
pub fn parse_subset(s: &str) -> Result<usize> {
    s.strip_prefix("last:")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Config(format!("invalid subset {s:?} (expected last:<n> with n >= 1)")))
}

impl AnalysisConfig {
    pub fn tau_prior(&self) -> Result<HeterogeneityPrior> {
        parse_tau_prior(&self.tau_prior_spec)
    }

    pub fn effect_prior(&self) -> Result<EffectPrior> {
        parse_effect_prior(&self.effect_prior_spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.level, "level").map_err(|e| Error::Config(e.to_string()))?;
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        self.tau_prior()?;
        self.effect_prior()?;
        Ok(())
    }

    /// The dataset after applying the configured subset.
    pub fn select(&self, d: &Dataset) -> Result<Dataset> {
        match self.subset {
            Some(n) => d.subset_last(n),
            None => Ok(d.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub tau_prior: String,
    pub mu_prior: String,
    pub level: f64,
    pub interval: IntervalKind,
    pub methods: Vec<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<String>,
    pub hksj_tau: TauMethod,
    pub hksj_modified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodBlock {
    pub method: Method,
    pub estimate: f64,
    pub se_or_sd: f64,
    pub interval: [f64; 2],
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_kind: Option<IntervalKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct TauBlock {
    pub estimate: Option<f64>,
    pub estimator: Option<TauMethod>,
    pub interval: Option<[f64; 2]>,
    pub q_statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_median: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_interval: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub input: Option<String>,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub k: usize,
    pub config: ConfigEcho,
    pub results: Vec<MethodBlock>,
    pub tau: TauBlock,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn result(&self, method: Method) -> Option<&MethodBlock> {
        self.results.iter().find(|b| b.method == method)
    }
}

fn freq_block(r: &FrequentistResult) -> MethodBlock {
    MethodBlock {
        method: r.method,
        estimate: r.mu_hat,
        se_or_sd: r.se_mu,
        interval: r.interval.as_array(),
        level: r.level,
        interval_kind: None,
        mean: None,
        prediction_interval: None,
        tau_hat: Some(r.tau_hat),
        degenerate: (r.method == Method::Hksj).then_some(r.degenerate),
    }
}

/// Runs every configured method on the (possibly subsetted) dataset.
pub fn run_analysis(d: &Dataset, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let tau_prior = cfg.tau_prior()?;
    let effect_prior = cfg.effect_prior()?;
    let data = cfg.select(d)?;
    let level = cfg.level;

    let mut results = Vec::with_capacity(cfg.methods.len());
    let mut tau = TauBlock::default();
    for &method in &cfg.methods {
        let tag = method.as_str();
        match method {
            Method::Bayes => {
                let run = || -> Result<(MethodBlock, TauBlock)> {
                    let fit = BayesFit::new(&data, &tau_prior, &effect_prior)?;
                    let mu = summarize(&fit.mu_mixture()?, level, cfg.interval_kind)?;
                    let pred = fit.predictive_mixture()?.credible_interval(level, cfg.interval_kind)?;
                    let ts = fit.tau_summary(level)?;
                    let block = MethodBlock {
                        method,
                        estimate: mu.median,
                        se_or_sd: mu.sd,
                        interval: mu.interval.as_array(),
                        level,
                        interval_kind: Some(cfg.interval_kind),
                        mean: Some(mu.mean),
                        prediction_interval: Some(pred.as_array()),
                        tau_hat: None,
                        degenerate: None,
                    };
                    let tb = TauBlock {
                        posterior_median: Some(ts.median),
                        posterior_mean: Some(ts.mean),
                        posterior_interval: Some(ts.interval.as_array()),
                        ..TauBlock::default()
                    };
                    Ok((block, tb))
                };
                let (block, tb) = run().map_err(|e| e.in_method(tag))?;
                tau.posterior_median = tb.posterior_median;
                tau.posterior_mean = tb.posterior_mean;
                tau.posterior_interval = tb.posterior_interval;
                results.push(block);
            }
            Method::Common => {
                let r = freq::common_effect(&data, level).map_err(|e| e.in_method(tag))?;
                results.push(freq_block(&r));
            }
            Method::Dl | Method::Reml => {
                let tm = if method == Method::Dl { TauMethod::Dl } else { TauMethod::Reml };
                let r = freq::random_effects_normal(&data, tm, level).map_err(|e| e.in_method(tag))?;
                if tau.estimator.is_none() {
                    tau.estimate = Some(r.tau_hat);
                    tau.estimator = Some(tm);
                }
                results.push(freq_block(&r));
            }
            Method::Hksj => {
                let r = freq::hksj_interval(&data, cfg.hksj_tau, level, cfg.hksj_modified)
                    .map_err(|e| e.in_method(tag))?;
                results.push(freq_block(&r));
            }
        }
    }
    if data.k() >= 2 {
        if tau.estimator.is_none() {
            let tm = if cfg.methods.contains(&Method::Hksj) { cfg.hksj_tau } else { TauMethod::Dl };
            tau.estimate = Some(freq::estimate_tau(&data, tm)?);
            tau.estimator = Some(tm);
        }
        tau.interval = Some(freq::q_profile_interval(&data, level)?.as_array());
        tau.q_statistic = Some(freq::q_statistic(&data, 0.0)?);
    }

    Ok(AnalysisReport {
        k: data.k(),
        config: ConfigEcho {
            tau_prior: format_tau_prior(&tau_prior),
            mu_prior: format_effect_prior(&effect_prior),
            level,
            interval: cfg.interval_kind,
            methods: cfg.methods.clone(),
            subset: cfg.subset.map(|n| format!("last:{n}")),
            hksj_tau: cfg.hksj_tau,
            hksj_modified: cfg.hksj_modified,
        },
        results,
        tau,
        provenance: Provenance {
            input: cfg.input.clone(),
            generator: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
        },
    })
}

/// Outcome of one heterogeneity prior in a sensitivity run.
#[derive(Debug)]
pub struct SensitivityRun {
    pub tau_prior_spec: String,
    pub outcome: Result<AnalysisReport>,
}

/// Repeats the analysis once per heterogeneity prior. A spec that fails to
/// parse (or an analysis that fails) does not stop the remaining ones.
pub fn run_sensitivity(d: &Dataset, base: &AnalysisConfig, tau_prior_specs: &[String]) -> Vec<SensitivityRun> {
    tau_prior_specs
        .iter()
        .map(|spec| {
            let cfg = AnalysisConfig {
                tau_prior_spec: spec.clone(),
                ..base.clone()
            };
            SensitivityRun {
                tau_prior_spec: spec.clone(),
                outcome: run_analysis(d, &cfg),
            }
        })
        .collect()
}
