//! CSV and JSON output of experiment reports.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, SimError, SimResult};
use crate::experiments::{ExperimentReport, ReportRows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

impl FromStr for OutputFormat {
    type Err = SimError;

    fn from_str(s: &str) -> SimResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(config_err(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Writes the report's rows as CSV. An empty report yields only the header.
pub fn write_csv<W: Write>(rows: &ReportRows, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match rows {
        ReportRows::Values(v) => {
            w.write_record(["replica", "value"])?;
            for (r, x) in v.iter().enumerate() {
                w.serialize((r, x))?;
            }
        }
        ReportRows::Blocks(v) => {
            w.write_record(["j", "x", "y"])?;
            for (j, (x, y)) in v.iter().enumerate() {
                w.serialize((j + 1, x, y))?;
            }
        }
        ReportRows::Occupation(v) => {
            w.write_record(["i", "j", "empirical", "stationary"])?;
            for row in v {
                w.serialize(row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(
    report: &ExperimentReport,
    format: OutputFormat,
    mut out: W,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&report.rows, out).map_err(io::Error::other),
        OutputFormat::Json => out.write_all(report.to_json_string().as_bytes()),
    }
}

/// Writes `report` to `path`. Identical reports produce identical bytes.
pub fn emit(report: &ExperimentReport, path: &Path, format: OutputFormat) -> SimResult<()> {
    let io_err = |source| SimError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(&report.rows, &mut w).map_err(|source| SimError::Csv {
            path: path.to_path_buf(),
            source,
        })?,
        OutputFormat::Json => w
            .write_all(report.to_json_string().as_bytes())
            .map_err(io_err)?,
    }
    w.flush().map_err(io_err)
}
