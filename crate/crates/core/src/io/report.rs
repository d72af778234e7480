use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::analysis::{AnalysisReport, OutputFormat};
use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 6;

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x, SIGNIFICANT_DIGITS)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to six significant digits. Keys keep
/// their declaration order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_report(r: &AnalysisReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Text => Ok(text_report(r)),
    }
}

fn num(x: f64) -> String {
    format!("{}", round_significant(x, SIGNIFICANT_DIGITS))
}

fn text_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(
        out,
        "k = {}  tau prior: {}  mu prior: {}  level: {}",
        r.k, c.tau_prior, c.mu_prior, c.level
    );
    let rows: Vec<[String; 5]> = r
        .results
        .iter()
        .map(|b| {
            [
                b.method.as_str().to_string(),
                num(b.estimate),
                num(b.se_or_sd),
                num(b.interval[0]),
                num(b.interval[1]),
            ]
        })
        .collect();
    let header = ["method", "estimate", "se/sd", "lower", "upper"].map(String::from);
    let mut widths = header.each_ref().map(|h| h.len());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    for row in std::iter::once(&header).chain(&rows) {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (cell, w))| if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    let t = &r.tau;
    if let (Some(est), Some(by)) = (t.estimate, t.estimator) {
        let _ = write!(out, "tau: {} ({})", num(est), by.as_str());
        if let Some([lo, hi]) = t.interval {
            let _ = write!(out, "  Q-profile [{}, {}]", num(lo), num(hi));
        }
        if let Some(q) = t.q_statistic {
            let _ = write!(out, "  Q = {}", num(q));
        }
        out.push('\n');
    }
    if let (Some(med), Some([lo, hi])) = (t.posterior_median, t.posterior_interval) {
        let _ = writeln!(out, "tau posterior: median {}  [{}, {}]", num(med), num(lo), num(hi));
    }
    out
}
