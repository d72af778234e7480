use std::collections::HashSet;
use std::path::Path;

use crate::data::{CountTable, Dataset, Study};
use crate::error::{Error, Result};

const ESTIMATE_HEADER: [&str; 3] = ["study", "y", "se"];
const COUNT_HEADER: [&str; 5] = ["study", "events_t", "n_t", "events_c", "n_c"];

enum Layout {
    Estimates,
    Counts,
}

/// Reads a dataset from a CSV file with header `study,y,se` or
/// `study,events_t,n_t,events_c,n_c`. Count rows become Woolf log odds ratios.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())?;
    parse_csv_reader(file)
}

pub fn parse_csv_reader<R: std::io::Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    let layout = if header == ESTIMATE_HEADER {
        Layout::Estimates
    } else if header == COUNT_HEADER {
        Layout::Counts
    } else {
        return Err(Error::MalformedHeader(format!(
            "got `{}`, expected `{}` or `{}`",
            header.join(","),
            ESTIMATE_HEADER.join(","),
            COUNT_HEADER.join(",")
        )));
    };

    let mut studies = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let label = record[0].to_string();
        let study = match layout {
            Layout::Estimates => {
                let y = parse_field::<f64>(&record, 1, "y", line)?;
                let se = parse_field::<f64>(&record, 2, "se", line)?;
                if !(se > 0.0) {
                    return Err(Error::NonPositiveSe { line, value: se });
                }
                Study::new(label.clone(), y, se)
            }
            Layout::Counts => {
                let counts = [
                    parse_field::<u64>(&record, 1, "events_t", line)?,
                    parse_field::<u64>(&record, 2, "n_t", line)?,
                    parse_field::<u64>(&record, 3, "events_c", line)?,
                    parse_field::<u64>(&record, 4, "n_c", line)?,
                ];
                CountTable::new(counts[0], counts[1], counts[2], counts[3])
                    .and_then(|t| t.log_odds_ratio())
                    .and_then(|(y, se)| Study::new(label.clone(), y, se))
            }
        }
        .map_err(|e| Error::Row {
            line,
            source: Box::new(e),
        })?;
        if !seen.insert(label.clone()) {
            return Err(Error::DuplicateRow { line, label });
        }
        studies.push(study);
    }
    Dataset::new(studies)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<T>().map_err(|_| Error::NonNumericField {
        line,
        field: name.to_string(),
        value: raw.to_string(),
    })
}
