//! Report rows, their CSV form and the per-cell summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::ExperimentKind;
use crate::error::{Error, Result};
use crate::metrics::{fit_exponential_decay, fit_power_law, DecayFit, McEstimate, RateFitResult};

/// First line of every report CSV.
pub const CSV_VERSION_LINE: &str = "# kacsim-csv v1";
pub const CSV_COLUMNS: [&str; 9] = ["experiment", "model_hash", "N", "t", "replica", "statistic", "value", "stderr", "seed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: ExperimentKind,
    pub model_hash: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub replica: usize,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub seed: u64,
}

/// Canonical row order: `(N, t, replica, statistic)`.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        (a.experiment, a.n)
            .cmp(&(b.experiment, b.n))
            .then(a.t.total_cmp(&b.t))
            .then(a.replica.cmp(&b.replica))
            .then(a.statistic.cmp(&b.statistic))
    });
}

fn format_row(row: &ReportRow) -> String {
    let stderr = row.stderr.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.experiment, row.model_hash, row.n, row.t, row.replica, row.statistic, row.value, stderr, row.seed
    )
}

/// Writes the version line, the column line and the rows in the given order.
pub fn write_csv<W: Write>(mut out: W, rows: &[ReportRow]) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    Ok(())
}

pub fn to_csv_string(rows: &[ReportRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Parse(format!("csv: {e}")))?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::Parse(format!("unexpected csv columns `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(format!("csv: {e}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub statistic: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFitEntry {
    pub statistic: String,
    pub t: f64,
    pub fit: Option<RateFitResult>,
    /// Why no fit was produced.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitEntry {
    pub statistic: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub fit: Option<DecayFit>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: Option<ExperimentKind>,
    pub model_hash: Option<String>,
    pub cells: Vec<CellSummary>,
    pub rate_fits: Vec<RateFitEntry>,
    pub decay_fits: Vec<DecayFitEntry>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn cell(&self, statistic: &str, n: usize, t: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.statistic == statistic && c.n == n && c.t == t)
    }

    pub fn rate_fit(&self, statistic: &str, t: f64) -> Option<&RateFitEntry> {
        self.rate_fits.iter().find(|f| f.statistic == statistic && f.t == t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable")
    }

    /// Plain-text table of cell means, fits and checks.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        if let (Some(kind), Some(hash)) = (self.experiment, &self.model_hash) {
            let _ = writeln!(s, "experiment {kind}  model {hash}");
        }
        let _ = writeln!(s, "{:<16} {:>6} {:>8} {:>14} {:>12} {:>7}", "statistic", "N", "t", "mean", "stderr", "count");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{:<16} {:>6} {:>8} {:>14.6e} {:>12.3e} {:>7}",
                c.statistic, c.n, c.t, c.mean, c.stderr, c.count
            );
        }
        for f in &self.rate_fits {
            match (&f.fit, &f.note) {
                (Some(fit), _) => {
                    let _ = writeln!(
                        s,
                        "rate fit {} at t={}: gamma_hat={:.4} r2={:.4} ({} points)",
                        f.statistic, f.t, fit.gamma_hat, fit.r_squared, fit.n_points
                    );
                }
                (None, note) => {
                    let _ = writeln!(s, "rate fit {} at t={}: none ({})", f.statistic, f.t, note.as_deref().unwrap_or(""));
                }
            }
        }
        for f in &self.decay_fits {
            match (&f.fit, &f.note) {
                (Some(fit), _) => {
                    let _ = writeln!(
                        s,
                        "decay fit {} at N={}: rate={:.4} r2={:.4} ({} points)",
                        f.statistic, f.n, fit.rate, fit.r_squared, fit.n_points
                    );
                }
                (None, note) => {
                    let _ = writeln!(s, "decay fit {} at N={}: none ({})", f.statistic, f.n, note.as_deref().unwrap_or(""));
                }
            }
        }
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

type CellKey = (String, usize, u64);

/// Per-cell means and standard errors, then fits across `N` (rate kinds) or
/// across `t` (moment kinds).
pub fn summarize(rows: &[ReportRow]) -> Summary {
    let mut groups: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.statistic.clone(), row.n, row.t.to_bits()))
            .or_default()
            .push(row.value);
    }
    let mut cells: Vec<CellSummary> = groups
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|((statistic, n, t), values)| {
            let est = McEstimate::from_values(&values);
            CellSummary { statistic, n, t: f64::from_bits(t), mean: est.mean, stderr: est.stderr, count: est.count }
        })
        .collect();
    cells.sort_by(|a, b| a.statistic.cmp(&b.statistic).then(a.n.cmp(&b.n)).then(a.t.total_cmp(&b.t)));

    let experiment = rows.first().map(|r| r.experiment);
    let model_hash = rows.first().map(|r| r.model_hash.clone());
    let over_n = experiment.is_some_and(|k| k.fits_over_n());
    let mut summary = Summary { experiment, model_hash, cells, ..Summary::default() };
    let keys: std::collections::BTreeSet<(String, u64)> = summary
        .cells
        .iter()
        .map(|c| (c.statistic.clone(), if over_n { c.t.to_bits() } else { c.n as u64 }))
        .collect();
    for (statistic, key) in keys {
        let points: Vec<(f64, f64)> = summary
            .cells
            .iter()
            .filter(|c| c.statistic == statistic && if over_n { c.t.to_bits() == key } else { c.n as u64 == key })
            .map(|c| if over_n { (c.n as f64, c.mean) } else { (c.t, c.mean) })
            .collect();
        if points.len() < 3 {
            continue;
        }
        let note = if points.iter().all(|p| p.1 == 0.0) {
            Some("exact-zero cell".to_string())
        } else if points.iter().any(|p| p.1 <= 0.0) {
            Some("non-positive values".to_string())
        } else {
            None
        };
        if over_n {
            let (fit, note) = match note {
                Some(n) => (None, Some(n)),
                None => match fit_power_law(&points) {
                    Ok(f) => (Some(f), None),
                    Err(e) => (None, Some(e.to_string())),
                },
            };
            summary.rate_fits.push(RateFitEntry { statistic, t: f64::from_bits(key), fit, note });
        } else {
            let (fit, note) = match note {
                Some(n) => (None, Some(n)),
                None => match fit_exponential_decay(&points) {
                    Ok(f) => (Some(f), None),
                    Err(e) => (None, Some(e.to_string())),
                },
            };
            summary.decay_fits.push(DecayFitEntry { statistic, n: key as usize, fit, note });
        }
    }
    summary
}
