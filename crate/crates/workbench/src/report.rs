//! Report persistence.
//!
//! JSON reports are written with round-trip float formatting, so reading a
//! report back gives a value equal to the one written and re-serializing it
//! reproduces the same bytes. CSV output flattens D to one row per entry and
//! appends a footer with the verdict.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::AnalysisReport;
use crate::config::OutputFormat;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub fn to_json(r: &AnalysisReport) -> Result<String, ReportError> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<AnalysisReport, ReportError> {
    Ok(serde_json::from_str(text)?)
}

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_csv(r: &AnalysisReport) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(["row", "col", "re", "im"])?;
    let d = &r.decoherence;
    for (i, row) in d.entries.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            w.write_record([
                d.labels[i].as_str(),
                d.labels[j].as_str(),
                &num(z[0]),
                &num(z[1]),
            ])?;
        }
    }
    let v = &r.verdict;
    w.write_record(["criterion", &v.criterion.to_string()])?;
    w.write_record(["epsilon", &num(v.epsilon)])?;
    w.write_record(["decoherent", &v.decoherent.to_string()])?;
    w.write_record(["max_violation", &num(v.max_violation)])?;
    for p in v.probabilities.iter().flatten() {
        w.write_record(["p", p.label.as_str(), &num(p.p)])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn render(r: &AnalysisReport, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => to_csv(r),
    }
}

pub fn emit_report(
    r: &AnalysisReport,
    format: OutputFormat,
    path: &Path,
) -> Result<(), ReportError> {
    let text = render(r, format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ReportError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| ReportError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<AnalysisReport, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text)
}
