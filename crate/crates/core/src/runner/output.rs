//! Result tables.
//!
//! Every curve-producing mode writes the same record layout,
//! `tau,f,stderr,imag_diag,method,beta,epsilon`, with empty error columns
//! for deterministic methods. Floats are printed in shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Beta, FidelityCurve};
use crate::runner::config::RunConfig;

pub const CSV_HEADER: &str = "tau,f,stderr,imag_diag,method,beta,epsilon";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub tau: f64,
    pub f: f64,
    pub stderr: Option<f64>,
    pub imag_diag: Option<f64>,
    pub method: String,
    pub beta: u8,
    pub epsilon: f64,
}

/// Flattens a curve into records.
pub fn records_from_curve(curve: &FidelityCurve, method: &str, beta: Beta, epsilon: f64) -> Vec<Record> {
    (0..curve.len())
        .map(|i| Record {
            tau: curve.taus[i],
            f: curve.values[i],
            stderr: curve.stderr.as_ref().map(|s| s[i]),
            imag_diag: curve.imag_diag.as_ref().map(|s| s[i]),
            method: method.to_string(),
            beta: beta.index(),
            epsilon,
        })
        .collect()
}

/// Rebuilds the curve of one `(method, epsilon)` series.
pub fn curve_from_records(records: &[Record], method: &str, epsilon: f64) -> FidelityCurve {
    let rows: Vec<&Record> = records
        .iter()
        .filter(|r| r.method == method && r.epsilon == epsilon)
        .collect();
    let column = |get: fn(&Record) -> Option<f64>| -> Option<Vec<f64>> { rows.iter().map(|r| get(r)).collect() };
    FidelityCurve {
        taus: rows.iter().map(|r| r.tau).collect(),
        values: rows.iter().map(|r| r.f).collect(),
        stderr: column(|r| r.stderr),
        imag_diag: column(|r| r.imag_diag),
    }
}

pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub program: String,
    pub version: String,
    pub config: RunConfig,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            program: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonDocument<T> {
    pub metadata: Metadata,
    pub records: T,
}

pub fn write_json<W: Write, T: Serialize>(mut writer: W, config: &RunConfig, records: T) -> Result<()> {
    let doc = JsonDocument {
        metadata: Metadata::new(config),
        records,
    };
    serde_json::to_writer_pretty(&mut writer, &doc)?;
    writeln!(writer)?;
    Ok(())
}

/// Creates `path` and its parent directories.
pub fn create(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_empty_fields() {
        let curve = FidelityCurve::exact(vec![0.0, 0.5], vec![1.0, 0.75]);
        let rows = records_from_curve(&curve, "analytic", Beta::Unitary, 2.0);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "0.0,1.0,,,analytic,2,2.0");
        assert_eq!(lines.next().unwrap(), "0.5,0.75,,,analytic,2,2.0");
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in proptest::collection::vec((-1.0f64..1.0, 0.0f64..1.0), 1..20), eps in 0.0f64..20.0) {
            let taus: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1 + 1e-3 / 3.0).collect();
            let curve = FidelityCurve {
                taus,
                values: values.iter().map(|v| v.0).collect(),
                stderr: Some(values.iter().map(|v| v.1).collect()),
                imag_diag: Some(values.iter().map(|v| v.1 / 7.0).collect()),
            };
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.csv");
            write_csv(create(&path).unwrap(), &records_from_curve(&curve, "simulate", Beta::Orthogonal, eps)).unwrap();
            let back = read_csv(&path).unwrap();
            prop_assert_eq!(curve_from_records(&back, "simulate", eps), curve);
        }
    }
}
