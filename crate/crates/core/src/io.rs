//! File formats: single-column CSVs for signals and coefficients, square
//! row-major CSVs for designs, experiment configs as JSON, and the summary
//! CSV/JSON emitted by the experiment drivers.
//!
//! All writers format floats with the shortest round-trip representation
//! and emit rows in a fixed order, so identical inputs produce identical
//! bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json;

use crate::design::OrthogonalDesign;
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, McSummary};

/// Read a single-column CSV of finite reals (one value per line).
pub fn read_signal_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: expected a number, got '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(Error::Parse(format!(
                "{}:{}: non-finite value",
                path.display(),
                lineno + 1
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("{}: empty signal", path.display())));
    }
    Ok(out)
}

/// Write a single-column CSV (one value per line).
pub fn write_signal_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut s = String::new();
    for v in values {
        writeln!(s, "{v}").expect("string write");
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Load an n×n design stored row-major with no header, re-validating the
/// Gram property.
pub fn load_design_csv(path: &Path) -> Result<OrthogonalDesign> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "{}:{}: expected a number, got '{}'",
                        path.display(),
                        lineno + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse(format!("{}: empty design", path.display())));
    }
    let mut flat = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "{}: row {} has {} entries, expected {n}",
                path.display(),
                i + 1,
                row.len()
            )));
        }
        flat.extend_from_slice(row);
    }
    OrthogonalDesign::from_rows(n, &flat)
}

/// Save a design as row-major CSV with no header.
pub fn save_design_csv(path: &Path, design: &OrthogonalDesign) -> Result<()> {
    let n = design.n();
    let rows = design.to_row_major();
    let mut s = String::new();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{}", rows[i * n + j]).expect("string write");
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Column header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str =
    "lambda,method,risk_mean,risk_sd,sure_mean,dof1_mean,dof2_mean,ht_d1_theory,ht_d2_theory";

/// Render a sweep summary as CSV, one row per (method, λ) point.
pub fn sweep_csv(summary: &McSummary) -> String {
    let mut s = String::from(SWEEP_CSV_HEADER);
    s.push('\n');
    for p in &summary.curves {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            p.lambda,
            p.method,
            p.risk_mean,
            p.risk_sd,
            opt(p.sure_mean),
            opt(p.dof1_mean),
            opt(p.dof2_mean),
            opt(p.ht_d1_theory),
            opt(p.ht_d2_theory),
        )
        .expect("string write");
    }
    s
}

/// Column header of the model-selection CSV.
pub const SELECTION_CSV_HEADER: &str =
    "method,risk_mean,risk_sd,khat_mean,khat_sd,serr_mean,serr_sd";

/// Render a model-selection summary as CSV, one row per method.
pub fn selection_csv(summary: &McSummary) -> String {
    let mut s = String::from(SELECTION_CSV_HEADER);
    s.push('\n');
    for m in &summary.methods {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            m.method, m.risk_mean, m.risk_sd, m.khat_mean, m.khat_sd, m.serr_mean, m.serr_sd,
        )
        .expect("string write");
    }
    s
}

/// One parsed row of a sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCsvRow {
    pub lambda: f64,
    pub method: String,
    pub risk_mean: f64,
    pub risk_sd: f64,
    pub sure_mean: Option<f64>,
    pub dof1_mean: Option<f64>,
    pub dof2_mean: Option<f64>,
    pub ht_d1_theory: Option<f64>,
    pub ht_d2_theory: Option<f64>,
}

/// Parse a sweep CSV produced by [`sweep_csv`].
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepCsvRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    if header.1.trim() != SWEEP_CSV_HEADER {
        return Err(Error::Parse(format!(
            "{}: unexpected header '{}'",
            path.display(),
            header.1.trim()
        )));
    }
    let parse_req = |cell: &str, lineno: usize| -> Result<f64> {
        cell.trim().parse::<f64>().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: expected a number, got '{}'",
                path.display(),
                lineno + 1,
                cell.trim()
            ))
        })
    };
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(Error::Parse(format!(
                "{}:{}: expected 9 columns, got {}",
                path.display(),
                lineno + 1,
                cells.len()
            )));
        }
        let parse_opt = |cell: &str| -> Result<Option<f64>> {
            if cell.trim().is_empty() {
                Ok(None)
            } else {
                parse_req(cell, lineno).map(Some)
            }
        };
        rows.push(SweepCsvRow {
            lambda: parse_req(cells[0], lineno)?,
            method: cells[1].trim().to_string(),
            risk_mean: parse_req(cells[2], lineno)?,
            risk_sd: parse_req(cells[3], lineno)?,
            sure_mean: parse_opt(cells[4])?,
            dof1_mean: parse_opt(cells[5])?,
            dof2_mean: parse_opt(cells[6])?,
            ht_d1_theory: parse_opt(cells[7])?,
            ht_d2_theory: parse_opt(cells[8])?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// Read an experiment configuration from JSON.
pub fn read_config_json(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

/// Serialize any report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Preset, SigmaMode, run_sweep};
    use crate::rules::Family;

    fn tmpdir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "threshbridge-io-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn signal_round_trip() {
        let path = tmpdir().join("signal.csv");
        let values = vec![1.5, -0.25, 0.0, 3.125e-4];
        write_signal_csv(&path, &values).unwrap();
        assert_eq!(read_signal_csv(&path).unwrap(), values);
    }

    #[test]
    fn signal_rejects_garbage() {
        let path = tmpdir().join("bad.csv");
        std::fs::write(&path, "1.0\nfoo\n").unwrap();
        assert!(matches!(read_signal_csv(&path), Err(Error::Parse(_))));
        std::fs::write(&path, "").unwrap();
        assert!(read_signal_csv(&path).is_err());
    }

    #[test]
    fn design_round_trip_preserves_entries() {
        let path = tmpdir().join("design.csv");
        let d = OrthogonalDesign::trig(8).unwrap();
        save_design_csv(&path, &d).unwrap();
        let loaded = load_design_csv(&path).unwrap();
        assert_eq!(loaded.n(), 8);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(loaded.entry(i, j), d.entry(i, j));
            }
        }
    }

    #[test]
    fn design_load_rejects_ragged_and_non_orthogonal() {
        let path = tmpdir().join("ragged.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(load_design_csv(&path).is_err());
        let path = tmpdir().join("skew.csv");
        std::fs::write(&path, "1,1\n0,1\n").unwrap();
        assert!(matches!(
            load_design_csv(&path),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn sweep_csv_round_trips_including_empty_cells() {
        let mut config = Preset::Fig2.config();
        config.n = 16;
        config.true_coeffs = vec![(1, 1.0)];
        config.lambda_grid = vec![0.25, 1.0];
        config.trials = 4;
        config.sigma2_mode = SigmaMode::Known;
        let summary = run_sweep(&config).unwrap();
        let text = sweep_csv(&summary);
        let path = tmpdir().join("sweep.csv");
        std::fs::write(&path, &text).unwrap();
        let rows = read_sweep_csv(&path).unwrap();
        assert_eq!(rows.len(), summary.curves.len());
        // Hard thresholding rows carry no SURE/DOF columns.
        let ht = rows.iter().find(|r| r.method == "ht").unwrap();
        assert!(ht.sure_mean.is_none() && ht.dof1_mean.is_none());
        let st = rows.iter().find(|r| r.method == "st").unwrap();
        assert!(st.sure_mean.is_some());
        let back = sweep_csv(&summary);
        assert_eq!(text, back);
    }

    #[test]
    fn config_json_round_trip() {
        let path = tmpdir().join("config.json");
        let mut config = Preset::Case1.config();
        config.trials = 3;
        write_json(&path, &config).unwrap();
        let loaded = read_config_json(&path).unwrap();
        assert_eq!(loaded, config);
    }

    #[test]
    fn config_json_accepts_the_documented_schema() {
        let path = tmpdir().join("hand.json");
        std::fs::write(
            &path,
            r#"{
              "n": 16,
              "sigma2": 1.0,
              "true_coeffs": [[1, 1.0], [2, -0.5]],
              "methods": ["ht", "st", "sst"],
              "lambda_grid": [0.1, 0.5],
              "m_grid": [3],
              "trials": 2,
              "master_seed": 9,
              "sigma2_mode": {"estimated": [9, 10, 11, 12, 13, 14, 15, 16]}
            }"#,
        )
        .unwrap();
        let config = read_config_json(&path).unwrap();
        assert_eq!(
            config.methods,
            vec![Family::Hard, Family::Soft, Family::ScaledSoft]
        );
        assert_eq!(config.sigma2_mode, SigmaMode::Estimated((9..=16).collect()));
        assert!(config.preset.is_none());
        assert!(config.gamma_grid.is_empty());
    }

    #[test]
    fn config_json_rejects_invalid() {
        let path = tmpdir().join("bad.json");
        std::fs::write(&path, "{\"n\": 3}").unwrap();
        assert!(read_config_json(&path).is_err());
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let path = tmpdir().join("typo.json");
        std::fs::write(
            &path,
            r#"{
              "n": 16, "sigma2": 1.0, "true_coeffs": [[1, 1.0]],
              "methods": ["st"], "lamda_grid": [0.1],
              "trials": 2, "master_seed": 9
            }"#,
        )
        .unwrap();
        let err = read_config_json(&path).unwrap_err();
        assert!(err.to_string().contains("lamda_grid"), "{err}");
    }
}
