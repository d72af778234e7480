//! Study-level data and log odds ratios from 2×2 tables.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One study: an effect estimate `y` and its standard error `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub label: String,
    pub y: f64,
    pub sigma: f64,
}

impl Study {
    pub fn new(label: impl Into<String>, y: f64, sigma: f64) -> Result<Self> {
        let label = label.into();
        if !y.is_finite() {
            return Err(Error::InvalidStudy(format!("{label}: estimate {y} is not finite")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidStudy(format!(
                "{label}: standard error {sigma} must be positive and finite"
            )));
        }
        Ok(Study { label, y, sigma })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Ordered, non-empty collection of studies with unique labels.
///
/// Row order is meaningful: [`Dataset::subset_last`] assumes the studies are
/// listed chronologically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    studies: Vec<Study>,
}

impl Dataset {
    pub fn new(studies: Vec<Study>) -> Result<Self> {
        if studies.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::new();
        for s in &studies {
            if !seen.insert(s.label.as_str()) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(Dataset { studies })
    }

    /// Builds a dataset labelled `1..=k` from parallel slices.
    pub fn from_estimates(y: &[f64], sigma: &[f64]) -> Result<Self> {
        if y.len() != sigma.len() {
            return Err(Error::InvalidStudy(format!(
                "{} estimates but {} standard errors",
                y.len(),
                sigma.len()
            )));
        }
        let studies = y
            .iter()
            .zip(sigma)
            .enumerate()
            .map(|(i, (&y, &s))| Study::new((i + 1).to_string(), y, s))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(studies)
    }

    pub fn k(&self) -> usize {
        self.studies.len()
    }

    pub fn studies(&self) -> &[Study] {
        &self.studies
    }

    pub fn y(&self) -> impl Iterator<Item = f64> + '_ {
        self.studies.iter().map(|s| s.y)
    }

    pub fn sigma(&self) -> impl Iterator<Item = f64> + '_ {
        self.studies.iter().map(|s| s.sigma)
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma().fold(0.0, f64::max)
    }

    pub fn min_sigma(&self) -> f64 {
        self.sigma().fold(f64::INFINITY, f64::min)
    }

    /// max(y) - min(y).
    pub fn y_range(&self) -> f64 {
        let (lo, hi) = self
            .y()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        hi - lo
    }

    /// The last `n` studies, in their original order.
    pub fn subset_last(&self, n: usize) -> Result<Dataset> {
        let k = self.k();
        if n == 0 || n > k {
            return Err(Error::SubsetOutOfRange { requested: n, k });
        }
        Ok(Dataset {
            studies: self.studies[k - n..].to_vec(),
        })
    }

    pub(crate) fn map_studies(&self, f: impl Fn(&Study) -> (f64, f64)) -> Result<Dataset> {
        let studies = self
            .studies
            .iter()
            .map(|s| {
                let (y, sigma) = f(s);
                Study::new(s.label.clone(), y, sigma)
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(studies)
    }

    /// Same studies with every estimate shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Dataset> {
        self.map_studies(|s| (s.y + c, s.sigma))
    }

    /// Same studies with estimates and standard errors multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Dataset> {
        self.map_studies(|s| (s.y * c, s.sigma * c))
    }
}

/// Treatment/control event counts and arm sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub events_t: u64,
    pub n_t: u64,
    pub events_c: u64,
    pub n_c: u64,
}

impl CountTable {
    pub fn new(events_t: u64, n_t: u64, events_c: u64, n_c: u64) -> Result<Self> {
        if n_t == 0 || n_c == 0 {
            return Err(Error::DegenerateTable("arm sizes must be at least 1".into()));
        }
        if events_t > n_t || events_c > n_c {
            return Err(Error::DegenerateTable("more events than participants".into()));
        }
        Ok(CountTable {
            events_t,
            n_t,
            events_c,
            n_c,
        })
    }

    /// Cells (a, b, c, d): treatment events / non-events, control events / non-events.
    pub fn cells(&self) -> [u64; 4] {
        [
            self.events_t,
            self.n_t - self.events_t,
            self.events_c,
            self.n_c - self.events_c,
        ]
    }

    pub fn needs_correction(&self) -> bool {
        self.cells().contains(&0)
    }

    /// Treatment and control arms exchanged.
    pub fn swapped(&self) -> CountTable {
        CountTable {
            events_t: self.events_c,
            n_t: self.n_c,
            events_c: self.events_t,
            n_c: self.n_t,
        }
    }

    /// Woolf log odds ratio and its standard error.
    ///
    /// When any cell is zero, 0.5 is added to all four cells. Tables without
    /// any events (or without any non-events) in both arms are rejected.
    pub fn log_odds_ratio(&self) -> Result<(f64, f64)> {
        let table = CountTable::new(self.events_t, self.n_t, self.events_c, self.n_c)?;
        let [a, b, c, d] = table.cells();
        if (a == 0 && c == 0) || (b == 0 && d == 0) {
            return Err(Error::DoubleZeroTable);
        }
        let corr = if table.needs_correction() { 0.5 } else { 0.0 };
        let [a, b, c, d] = [a, b, c, d].map(|v| v as f64 + corr);
        let y = (a * d / (b * c)).ln();
        let sigma = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
        Ok((y, sigma))
    }
}

pub fn log_or_from_counts(t: &CountTable) -> Result<(f64, f64)> {
    t.log_odds_ratio()
}
