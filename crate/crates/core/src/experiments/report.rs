//! Byte-deterministic CSV and JSON output for sweeps.

use super::{Sweep, SweepRow};
use crate::error::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 12] = [
    "param",
    "x1",
    "x2",
    "dist_xstar",
    "mass_sqrt_s",
    "diam",
    "threshold",
    "energy",
    "energy_plus_logterm",
    "l1_to_mu_solution",
    "iters",
    "converged",
];

/// Range and monotonicity of one numeric column over the rows that have it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub name: &'static str,
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary<'a> {
    #[serde(flatten)]
    pub sweep: &'a Sweep,
    pub columns: Vec<ColumnSummary>,
    pub all_converged: bool,
    pub all_pass: bool,
}

type Column = (&'static str, fn(&SweepRow) -> Option<f64>);

const COLUMNS: [Column; 10] = [
    ("dist_xstar", |r| r.dist_xstar),
    ("mass_sqrt_s", |r| r.mass_sqrt_s),
    ("diam", |r| r.diam),
    ("diam_over_eps", |r| r.diam_over_eps),
    ("threshold", |r| r.threshold),
    ("energy", |r| r.energy),
    ("energy_plus_logterm", |r| r.energy_plus_logterm),
    ("excess_energy", |r| r.excess_energy),
    ("l1_to_mu_solution", |r| r.l1_to_mu_solution),
    ("iters", |r| Some(r.iters as f64)),
];

fn column(name: &'static str, values: Vec<f64>) -> ColumnSummary {
    let fold = |f: fn(f64, f64) -> f64| values.iter().copied().reduce(f);
    ColumnSummary {
        name,
        count: values.len(),
        min: fold(f64::min),
        max: fold(f64::max),
        nondecreasing: values.windows(2).all(|w| w[1] >= w[0]),
        nonincreasing: values.windows(2).all(|w| w[1] <= w[0]),
    }
}

pub fn summarize(sweep: &Sweep) -> SweepSummary<'_> {
    let columns = COLUMNS
        .iter()
        .map(|&(name, get)| column(name, sweep.rows.iter().filter_map(get).collect()))
        .collect();
    SweepSummary {
        sweep,
        columns,
        all_converged: sweep.rows.iter().all(|r| r.converged),
        all_pass: sweep.rows.iter().all(SweepRow::passed),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_bytes(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.param.to_string(),
            cell(r.x.map(|p| p.x)),
            cell(r.x.map(|p| p.y)),
            cell(r.dist_xstar),
            cell(r.mass_sqrt_s),
            cell(r.diam),
            cell(r.threshold),
            cell(r.energy),
            cell(r.energy_plus_logterm),
            cell(r.l1_to_mu_solution),
            r.iters.to_string(),
            r.converged.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir` and returns both paths.
/// Identical sweeps produce identical bytes.
pub fn emit_report(sweep: &Sweep, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    if sweep.rows.is_empty() {
        return Err(Error::Contract("cannot emit a report for an empty sweep".into()));
    }
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    fs::write(&csv_path, csv_bytes(&sweep.rows)?)?;
    let mut json = serde_json::to_vec_pretty(&summarize(sweep))
        .map_err(|e| Error::Io(e.into()))?;
    json.push(b'\n');
    fs::write(&json_path, json)?;
    Ok((csv_path, json_path))
}
