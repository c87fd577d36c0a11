//! CSV tables and JSON reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cha::{IterationRecord, SupportPoint};
use crate::error::{Error, Result};

use super::{ExperimentRecord, Settings, TilesSummary, VERSION};

/// Column order of every CSV this crate writes.
pub const CSV_COLUMNS: [&str; 15] = [
    "experiment",
    "state",
    "alpha",
    "analytic_bits",
    "ppt_bits",
    "cha_bits",
    "gap_bits",
    "seed",
    "cha_seconds",
    "ppt_seconds",
    "cha_converged",
    "ppt_converged",
    "config_hash",
    "version",
    "error",
];

/// Whether wall-clock columns are filled. With [`Timings::Omit`] the
/// columns stay but their cells are empty, so reruns are byte-identical.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Timings {
    #[default]
    Include,
    Omit,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, records: &[ExperimentRecord], settings: &Settings, timings: Timings) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    let hash = settings.config_hash();
    let time = |t: Option<f64>| match timings {
        Timings::Include => opt(t),
        Timings::Omit => String::new(),
    };
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.state.clone(),
            opt(r.alpha),
            opt(r.analytic_bits),
            opt(r.ppt_bits),
            opt(r.cha_bits),
            opt(r.gap_bits()),
            r.seed.to_string(),
            time(r.cha_seconds),
            time(r.ppt_seconds),
            opt(r.cha_converged),
            opt(r.ppt_converged),
            hash.clone(),
            VERSION.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_string(records: &[ExperimentRecord], settings: &Settings, timings: Timings) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records, settings, timings)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// JSON report of one run. Optional parts appear only for the commands that
/// produce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub settings: Settings,
    pub records: Vec<ExperimentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<TilesSummary>,
    /// Per-iteration history of the active-learning loop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<IterationRecord>>,
    /// Product states and weights of the best separable state found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SupportPoint>>,
    /// Gradient-mapping norm of the PPT solver's last step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt_grad_norm: Option<f64>,
}

impl Report {
    pub fn new(command: &str, settings: &Settings, records: Vec<ExperimentRecord>) -> Self {
        Report {
            version: VERSION.to_string(),
            command: command.to_string(),
            seed: settings.seed,
            config_hash: settings.config_hash(),
            settings: settings.clone(),
            records,
            tiles: None,
            history: None,
            support: None,
            ppt_grad_norm: None,
        }
    }
}

pub fn write_json(path: &Path, report: &Report) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
