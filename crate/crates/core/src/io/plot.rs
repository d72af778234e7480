//! Hand-written SVG comparing the exact posterior of μ with normal
//! approximations.
//!
//! Three curves are drawn over mean ± 4 sd of the moment-matched normal: the
//! mixture posterior density, the frequentist normal approximation, and the
//! moment-matched normal (dashed). Point estimates with intervals are drawn
//! as whiskers below the axis. Each curve also carries its raw abscissae and
//! densities in `data-x` / `data-density` attributes.

use std::fmt::Write as _;
use std::path::Path;

use super::analysis::AnalysisConfig;
use crate::bayes::{summarize, BayesFit};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::freq::{self, FrequentistResult, Method, TauMethod};
use crate::numerics::normal_pdf;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
pub const SAMPLES: usize = 401;

const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const PLOT_BOTTOM: f64 = 370.0;

const POSTERIOR_COLOR: &str = "#1f4fd8";
const FREQ_COLOR: &str = "#d62728";
const MATCHED_COLOR: &str = "#333333";

/// One sampled density curve.
#[derive(Debug, Clone)]
pub struct Curve {
    pub id: &'static str,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
}

struct Whisker {
    label: String,
    estimate: f64,
    lo: f64,
    hi: f64,
    color: &'static str,
}

fn frequentist_reference(d: &Dataset, cfg: &AnalysisConfig) -> Result<FrequentistResult> {
    let level = cfg.level;
    for &m in &cfg.methods {
        let r = match m {
            Method::Common => freq::common_effect(d, level),
            Method::Dl => freq::random_effects_normal(d, TauMethod::Dl, level),
            Method::Reml => freq::random_effects_normal(d, TauMethod::Reml, level),
            Method::Hksj => freq::hksj_interval(d, cfg.hksj_tau, level, cfg.hksj_modified),
            Method::Bayes => continue,
        };
        return r.map_err(|e| e.in_method(m.as_str()));
    }
    if d.k() >= 2 {
        freq::random_effects_normal(d, TauMethod::Reml, level)
    } else {
        freq::common_effect(d, level)
    }
}

fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn join_raw(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ")
}

/// Curves and SVG text for the density comparison.
pub fn render_density_svg(d: &Dataset, cfg: &AnalysisConfig) -> Result<(String, Vec<Curve>)> {
    if !cfg.methods.contains(&Method::Bayes) {
        return Err(Error::Config("the density plot needs the bayes method".into()));
    }
    cfg.validate()?;
    let data = cfg.select(d)?;
    let fit = BayesFit::new(&data, &cfg.tau_prior()?, &cfg.effect_prior()?).map_err(|e| e.in_method("bayes"))?;
    let mixture = fit.mu_mixture()?;
    let post = summarize(&mixture, cfg.level, cfg.interval_kind)?;
    let (mm_mean, mm_sd) = mixture.moment_matched();
    let fr = frequentist_reference(&data, cfg)?;

    let x_lo = mm_mean - 4.0 * mm_sd;
    let x_hi = mm_mean + 4.0 * mm_sd;
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (SAMPLES - 1) as f64)
        .collect();
    let normal = |mean: f64, sd: f64| -> Vec<f64> { xs.iter().map(|&x| normal_pdf((x - mean) / sd) / sd).collect() };
    let curves = vec![
        Curve {
            id: "posterior",
            x: xs.clone(),
            density: xs.iter().map(|&x| mixture.density(x)).collect(),
        },
        Curve {
            id: "frequentist",
            x: xs.clone(),
            density: normal(fr.mu_hat, fr.se_mu),
        },
        Curve {
            id: "moment-matched",
            x: xs.clone(),
            density: normal(mm_mean, mm_sd),
        },
    ];

    let y_max = curves
        .iter()
        .flat_map(|c| c.density.iter().copied())
        .fold(0.0, f64::max)
        * 1.05;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| PLOT_BOTTOM - y / y_max * (PLOT_BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axis and ticks
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{PLOT_BOTTOM}" x2="{}" y2="{PLOT_BOTTOM}" stroke="black"/>"#,
        fmt_coord(LEFT),
        fmt_coord(WIDTH - RIGHT)
    );
    for i in 0..=8 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 8.0;
        let tx = fmt_coord(px(x));
        let _ = writeln!(
            svg,
            r#"<line x1="{tx}" y1="{PLOT_BOTTOM}" x2="{tx}" y2="{}" stroke="black"/><text x="{tx}" y="{}" text-anchor="middle">{:.2}</text>"#,
            PLOT_BOTTOM + 5.0,
            PLOT_BOTTOM + 18.0,
            x + 0.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">effect</text>"#,
        fmt_coord(0.5 * (LEFT + WIDTH - RIGHT)),
        PLOT_BOTTOM + 34.0
    );

    for curve in &curves {
        let mut path = String::new();
        for (i, (&x, &y)) in curve.x.iter().zip(&curve.density).enumerate() {
            let _ = write!(path, "{}{},{}", if i == 0 { "M" } else { " L" }, fmt_coord(px(x)), fmt_coord(py(y)));
        }
        let (color, dash) = match curve.id {
            "posterior" => (POSTERIOR_COLOR, ""),
            "frequentist" => (FREQ_COLOR, ""),
            _ => (MATCHED_COLOR, r#" stroke-dasharray="6,4""#),
        };
        let _ = writeln!(
            svg,
            r#"<path id="{}" class="density" d="{}" fill="none" stroke="{color}" stroke-width="2"{dash} data-x="{}" data-density="{}"/>"#,
            curve.id,
            path,
            join_raw(&curve.x),
            join_raw(&curve.density)
        );
    }

    let whiskers = [
        Whisker {
            label: format!("Bayesian {}", fmt_interval_label(post.median, post.interval.lo, post.interval.hi)),
            estimate: post.median,
            lo: post.interval.lo,
            hi: post.interval.hi,
            color: POSTERIOR_COLOR,
        },
        Whisker {
            label: format!(
                "{} {}",
                fr.method.as_str(),
                fmt_interval_label(fr.mu_hat, fr.interval.lo, fr.interval.hi)
            ),
            estimate: fr.mu_hat,
            lo: fr.interval.lo,
            hi: fr.interval.hi,
            color: FREQ_COLOR,
        },
    ];
    let clamp = |x: f64| px(x.clamp(x_lo, x_hi));
    for (row, w) in whiskers.iter().enumerate() {
        let y = 420.0 + 28.0 * row as f64;
        let _ = writeln!(
            svg,
            r#"<g class="whisker"><line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><circle cx="{}" cy="{y}" r="4" fill="{}"/><text x="{}" y="{}">{}</text></g>"#,
            fmt_coord(clamp(w.lo)),
            fmt_coord(clamp(w.hi)),
            w.color,
            fmt_coord(clamp(w.estimate)),
            w.color,
            fmt_coord(LEFT),
            y - 8.0,
            w.label
        );
    }
    svg.push_str("</svg>\n");
    Ok((svg, curves))
}

fn fmt_interval_label(est: f64, lo: f64, hi: f64) -> String {
    format!("{est:.2} [{lo:.2}, {hi:.2}]")
}

/// Writes the density comparison SVG to `out_path`.
pub fn plot_density_comparison(d: &Dataset, cfg: &AnalysisConfig, out_path: &Path) -> Result<()> {
    let (svg, _) = render_density_svg(d, cfg)?;
    std::fs::write(out_path, svg)?;
    Ok(())
}
