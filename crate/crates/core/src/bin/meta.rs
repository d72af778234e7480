use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use remeta::io::{
    emit_report, format_tau_prior, parse_csv, parse_methods, parse_subset, parse_tau_prior, plot_density_comparison,
    run_analysis, run_sensitivity, split_tau_prior_list, to_json, AnalysisConfig,
};
use remeta::{Error, ErrorClass, IntervalKind, Result, TauMethod};

#[derive(Parser)]
#[command(name = "meta", version, about = "Random-effects meta-analysis: exact Bayesian posterior and frequentist estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one dataset.
    Analyze(AnalyzeArgs),
    /// Repeat the analysis under several heterogeneity priors.
    Sensitivity {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated heterogeneity prior specs.
        #[arg(long)]
        tau_priors: String,
    },
    /// Print a quantile of a heterogeneity prior.
    Prior {
        #[arg(long)]
        tau_prior: String,
        #[arg(long, default_value_t = 0.95)]
        q: f64,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// CSV with header `study,y,se` or `study,events_t,n_t,events_c,n_c`.
    csv: PathBuf,
    #[arg(long, default_value = "uniform")]
    mu_prior: String,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// shortest or central.
    #[arg(long, default_value = "shortest")]
    interval: String,
    /// Comma-separated subset of bayes,common,dl,reml,hksj.
    #[arg(long, default_value = "bayes,dl,reml")]
    methods: String,
    /// Keep only the last n studies (`last:n`).
    #[arg(long)]
    subset: Option<String>,
    /// Heterogeneity estimator behind HKSJ (dl or reml).
    #[arg(long, default_value = "dl")]
    hksj_tau: String,
    /// Floor the HKSJ variance scale at 1.
    #[arg(long)]
    hksj_modified: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "half-normal:0.5")]
    tau_prior: String,
    /// Write the density comparison SVG here.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// json or text.
    #[arg(long, default_value = "json")]
    format: String,
}

fn config(c: &CommonArgs, tau_prior: &str) -> Result<AnalysisConfig> {
    let interval_kind: IntervalKind = c.interval.parse()?;
    let hksj_tau: TauMethod = c.hksj_tau.parse()?;
    let cfg = AnalysisConfig {
        tau_prior_spec: tau_prior.to_string(),
        effect_prior_spec: c.mu_prior.clone(),
        level: c.level,
        interval_kind,
        methods: parse_methods(&c.methods)?,
        subset: c.subset.as_deref().map(parse_subset).transpose()?,
        hksj_tau,
        hksj_modified: c.hksj_modified,
        input: Some(c.csv.display().to_string()),
        ..AnalysisConfig::default()
    };
    Ok(cfg)
}

fn analyze(args: &AnalyzeArgs) -> Result<String> {
    let mut cfg = config(&args.common, &args.tau_prior)?;
    cfg.output_format = args.format.parse()?;
    cfg.plot_path = args.plot.clone();
    cfg.validate()?;
    let data = parse_csv(&args.common.csv)?;
    let report = run_analysis(&data, &cfg)?;
    if let Some(path) = &cfg.plot_path {
        plot_density_comparison(&data, &cfg, path)?;
    }
    emit_report(&report, cfg.output_format)
}

/// Returns the JSON array and the first failure, if any.
fn sensitivity(common: &CommonArgs, specs: &[String]) -> Result<(String, Option<Error>)> {
    let base = config(common, specs.first().map(String::as_str).unwrap_or_default())?;
    let data = parse_csv(&common.csv)?;
    let mut first_error = None;
    let mut entries = Vec::new();
    for run in run_sensitivity(&data, &base, specs) {
        match run.outcome {
            Ok(report) => entries.push(json!({ "tau_prior_spec": run.tau_prior_spec, "report": report })),
            Err(e) => {
                entries.push(json!({
                    "tau_prior_spec": run.tau_prior_spec,
                    "error": { "class": e.class().tag(), "message": e.to_string() },
                }));
                first_error.get_or_insert(e);
            }
        }
    }
    Ok((to_json(&entries)?, first_error))
}

fn prior(spec: &str, q: f64) -> Result<String> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Config(format!("--q must lie in (0, 1), got {q}")));
    }
    let p = parse_tau_prior(spec)?;
    let value = p.quantile(q)?;
    to_json(&json!({ "tau_prior": format_tau_prior(&p), "q": q, "quantile": value }))
}

fn fail(e: &Error) -> ExitCode {
    let class = e.class();
    let msg = e.to_string().replace('\n', " ");
    eprintln!("error[{}]: {}", class.tag(), msg);
    ExitCode::from(class.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            eprintln!("error[{}]: {}", ErrorClass::Usage.tag(), first);
            return ExitCode::from(ErrorClass::Usage.exit_code() as u8);
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Prior { tau_prior, q } => prior(tau_prior, *q),
        Command::Sensitivity { common, tau_priors } => match sensitivity(common, &split_tau_prior_list(tau_priors)) {
            Ok((out, None)) => Ok(out),
            Ok((out, Some(e))) => {
                print!("{out}");
                return fail(&e);
            }
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
