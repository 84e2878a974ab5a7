//! Report files as CSV tables or pretty-printed JSON.
//!
//! CSV columns, in order:
//!
//! - energy: `t, energy, grad, lap, ut, grad_ut, lhs, residual`
//! - weighted bounds: `alpha, w_h2, w_ut, w_gut, w_gu_sup`
//! - pressure: `t, p_53`
//! - alpha sweep: `alpha, w_h2, w_ut, w_gut, w_gu_sup, pressure_integral, energy_residual`
//! - local energy: `t_grad, t_parab, t_conv, t_press, t_voigt, t_remainder, residual`
//! - tail: `t, g, bound, tail_energy, total, ratio`
//! - coupling: `n, alpha_n, remainder, bound, tail, ratio, w_h2, failed`
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a cell gives
//! back the exact value.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{AlphaSweepRow, EnergyReport, PressureReport, WeightedBounds};
use crate::error::{Error, Result};
use crate::suitability::{CouplingRow, LocalEnergyReport, TailSample};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

/// Column names plus one string row per record.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A report with a fixed tabular layout.
pub trait Tabular {
    fn table(&self) -> Table;
}

fn cells(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

impl Tabular for EnergyReport {
    fn table(&self) -> Table {
        Table {
            header: vec![
                "t", "energy", "grad", "lap", "ut", "grad_ut", "lhs", "residual",
            ],
            rows: self
                .samples
                .iter()
                .map(|s| {
                    cells(&[
                        s.t, s.energy, s.grad, s.lap, s.ut, s.grad_ut, s.lhs, s.residual,
                    ])
                })
                .collect(),
        }
    }
}

impl Tabular for WeightedBounds {
    fn table(&self) -> Table {
        Table {
            header: vec!["alpha", "w_h2", "w_ut", "w_gut", "w_gu_sup"],
            rows: vec![cells(&[
                self.alpha,
                self.w_h2,
                self.w_ut,
                self.w_gut,
                self.w_gu_sup,
            ])],
        }
    }
}

impl Tabular for PressureReport {
    fn table(&self) -> Table {
        Table {
            header: vec!["t", "p_53"],
            rows: self.samples.iter().map(|(t, p)| cells(&[*t, *p])).collect(),
        }
    }
}

impl Tabular for [AlphaSweepRow] {
    fn table(&self) -> Table {
        Table {
            header: vec![
                "alpha",
                "w_h2",
                "w_ut",
                "w_gut",
                "w_gu_sup",
                "pressure_integral",
                "energy_residual",
            ],
            rows: self
                .iter()
                .map(|r| {
                    cells(&[
                        r.alpha,
                        r.w_h2,
                        r.w_ut,
                        r.w_gut,
                        r.w_gu_sup,
                        r.pressure_integral,
                        r.energy_residual,
                    ])
                })
                .collect(),
        }
    }
}

impl Tabular for LocalEnergyReport {
    fn table(&self) -> Table {
        Table {
            header: vec![
                "t_grad",
                "t_parab",
                "t_conv",
                "t_press",
                "t_voigt",
                "t_remainder",
                "residual",
            ],
            rows: vec![cells(&[
                self.t_grad,
                self.t_parab,
                self.t_conv,
                self.t_press,
                self.t_voigt,
                self.t_remainder,
                self.residual,
            ])],
        }
    }
}

impl Tabular for [TailSample] {
    fn table(&self) -> Table {
        Table {
            header: vec!["t", "g", "bound", "tail_energy", "total", "ratio"],
            rows: self
                .iter()
                .map(|s| cells(&[s.t, s.g, s.bound, s.tail_energy, s.total, s.ratio()]))
                .collect(),
        }
    }
}

impl Tabular for [CouplingRow] {
    fn table(&self) -> Table {
        Table {
            header: vec![
                "n",
                "alpha_n",
                "remainder",
                "bound",
                "tail",
                "ratio",
                "w_h2",
                "failed",
            ],
            rows: self
                .iter()
                .map(|r| {
                    let mut row = vec![r.n.to_string()];
                    row.extend(cells(&[
                        r.alpha_n,
                        r.remainder,
                        r.bound,
                        r.tail,
                        r.ratio,
                        r.w_h2,
                    ]));
                    row.push(r.failed.clone().unwrap_or_default());
                    row
                })
                .collect(),
        }
    }
}

pub fn render_csv<R: Tabular + ?Sized>(report: &R) -> Result<String> {
    let table = report.table();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Format(format!("csv: {e}"));
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn render_json<R: Serialize + ?Sized>(report: &R) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `report` to `path`; output depends only on the report's values.
pub fn write_report<R: Tabular + Serialize + ?Sized>(
    report: &R,
    path: &Path,
    format: ReportFormat,
) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => render_csv(report)?,
        ReportFormat::Json => render_json(report)?,
    };
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::energy_report;
    use crate::dynamics::{integrate, SolverConfig};
    use crate::initial::taylor_green;

    fn three_sample_report() -> EnergyReport {
        let u0 = taylor_green(1.0, 2).unwrap();
        let traj = integrate(&SolverConfig::new(2, 0.3, 0.02).with_dt(0.01), &u0).unwrap();
        assert_eq!(traj.len(), 3);
        energy_report(&traj).unwrap()
    }

    #[test]
    fn energy_csv_has_header_and_one_row_per_sample() {
        let csv = render_csv(&three_sample_report()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,energy,grad,lap,ut,grad_ut,lhs,residual");
    }

    #[test]
    fn csv_floats_round_trip() {
        let rep = three_sample_report();
        let csv = render_csv(&rep).unwrap();
        let row: Vec<f64> = csv
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .map(|c| c.parse().unwrap())
            .collect();
        let s = &rep.samples[1];
        assert_eq!(row[1].to_bits(), s.energy.to_bits());
        assert_eq!(row[6].to_bits(), s.lhs.to_bits());
    }

    #[test]
    fn coupling_columns() {
        let rows = vec![
            CouplingRow {
                n: 8,
                alpha_n: 0.3,
                remainder: 1e-3,
                bound: 2.0,
                tail: 0.5,
                ratio: 0.1,
                w_h2: 0.01,
                failed: None,
            },
            CouplingRow {
                n: 12,
                alpha_n: 0.27,
                remainder: 0.0,
                bound: 0.0,
                tail: 0.0,
                ratio: 0.0,
                w_h2: 0.0,
                failed: Some("blow-up, at t = 0.1".into()),
            },
        ];
        let csv = render_csv(rows.as_slice()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,alpha_n,remainder,bound,tail,ratio,w_h2,failed"
        );
        assert_eq!(lines.next().unwrap(), "8,0.3,0.001,2,0.5,0.1,0.01,");
        assert!(lines.next().unwrap().ends_with("\"blow-up, at t = 0.1\""));
    }

    #[test]
    fn writing_twice_is_byte_identical() {
        let rep = three_sample_report();
        let dir = tempfile::tempdir().unwrap();
        for fmt in [ReportFormat::Csv, ReportFormat::Json] {
            let a = dir.path().join("a");
            let b = dir.path().join("b");
            write_report(&rep, &a, fmt).unwrap();
            write_report(&three_sample_report(), &b, fmt).unwrap();
            assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        }
        let json: serde_json::Value = serde_json::from_str(&render_json(&rep).unwrap()).unwrap();
        assert_eq!(json["samples"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let err = write_report(
            &three_sample_report(),
            Path::new("/nonexistent/dir/r.csv"),
            ReportFormat::Csv,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
