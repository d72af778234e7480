//! CSV ingestion, analysis orchestration, JSON/text reports and plots.

mod analysis;
mod csv;
mod plot;
mod report;
mod spec;

pub use analysis::{
    parse_methods, parse_subset, run_analysis, run_sensitivity, AnalysisConfig, AnalysisReport, ConfigEcho,
    MethodBlock, OutputFormat, Provenance, SensitivityRun, TauBlock,
};
pub use csv::{parse_csv, parse_csv_reader};
pub use plot::{plot_density_comparison, render_density_svg, Curve, HEIGHT, SAMPLES, WIDTH};
pub use report::{emit_report, round_significant, to_json, SIGNIFICANT_DIGITS};
pub use spec::{format_effect_prior, format_tau_prior, parse_effect_prior, parse_tau_prior, split_tau_prior_list};
