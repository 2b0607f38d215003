//! Report files (JSON or CSV) and terminal tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use homocone::harness::{FuzzReport, Scenario};
use homocone::CheckReport;
use serde::{Deserialize, Serialize};

use crate::config::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Flag, then config, then the output file extension, then JSON.
    pub fn resolve(flag: Option<Format>, config: Option<Format>, out: Option<&Path>) -> Format {
        flag.or(config)
            .or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("csv") => Some(Format::Csv),
                _ => None,
            })
            .unwrap_or(Format::Json)
    }
}

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub reports: Vec<CheckReport>,
}

#[derive(Debug, Serialize)]
pub struct Tally {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Tally {
    pub fn of<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> Self {
        let mut t = Tally {
            checks: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
        };
        for r in reports {
            t.checks += 1;
            if !r.hypothesis_ok {
                t.skipped += 1;
            } else if r.pass {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
        }
        t
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub tally: Tally,
    pub scenarios: Vec<ScenarioReport>,
}

impl VerifyReport {
    pub fn new(runs: Vec<(&Scenario, Vec<CheckReport>)>) -> Self {
        let scenarios: Vec<ScenarioReport> = runs
            .into_iter()
            .map(|(s, reports)| ScenarioReport {
                name: s.name.clone(),
                reports,
            })
            .collect();
        let all = || scenarios.iter().flat_map(|s| &s.reports);
        VerifyReport {
            pass: all().all(|r| r.acceptable()),
            tally: Tally::of(all()),
            scenarios,
        }
    }

    fn rows(&self) -> Vec<(String, &CheckReport)> {
        self.scenarios
            .iter()
            .flat_map(|s| s.reports.iter().map(move |r| (format!("{}/{}", s.name, r.check), r)))
            .collect()
    }
}

fn fuzz_rows(report: &FuzzReport) -> Vec<(String, &CheckReport)> {
    report
        .instances
        .iter()
        .flat_map(|i| {
            i.reports
                .iter()
                .map(move |r| (format!("{}#{}/{}", i.check.name(), i.index, r.check), r))
        })
        .collect()
}

fn csv_bytes(rows: &[(String, &CheckReport)]) -> Result<Vec<u8>, ConfigError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| ConfigError(format!("cannot write CSV: {e}"));
    w.write_record(["name", "lhs", "rhs", "ratio", "hypothesis_ok", "pass"])
        .map_err(err)?;
    for (name, r) in rows {
        w.write_record([
            name.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.map(|x| x.to_string()).unwrap_or_default(),
            r.hypothesis_ok.to_string(),
            r.pass.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| ConfigError(format!("cannot write CSV: {e}")))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, ConfigError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| ConfigError(format!("cannot encode report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub enum Report<'a> {
    Verify(&'a VerifyReport),
    Fuzz(&'a FuzzReport),
}

impl Report<'_> {
    pub fn encode(&self, format: Format) -> Result<Vec<u8>, ConfigError> {
        match (self, format) {
            (Report::Verify(r), Format::Json) => json_bytes(r),
            (Report::Fuzz(r), Format::Json) => json_bytes(r),
            (Report::Verify(r), Format::Csv) => csv_bytes(&r.rows()),
            (Report::Fuzz(r), Format::Csv) => csv_bytes(&fuzz_rows(r)),
        }
    }
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), ConfigError> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| ConfigError(format!("cannot write to stdout: {e}"))),
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "-".into()
    } else if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:.4e}")
    } else {
        format!("{x:.6}")
    }
}

fn status(r: &CheckReport) -> &'static str {
    if !r.hypothesis_ok {
        "SKIP"
    } else if r.pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// One row per check: scenario, check, lhs, rhs, ratio, status.
pub fn check_table(report: &VerifyReport) -> String {
    let mut s = format!(
        "{:<10} {:<26} {:>14} {:>14} {:>12}  {}\n",
        "scenario", "check", "lhs", "rhs", "ratio", "status"
    );
    for sc in &report.scenarios {
        for r in &sc.reports {
            s += &format!(
                "{:<10} {:<26} {:>14} {:>14} {:>12}  {}\n",
                sc.name,
                r.check,
                fmt_num(r.lhs),
                fmt_num(r.rhs),
                r.ratio.map(fmt_num).unwrap_or_else(|| "-".into()),
                status(r)
            );
        }
    }
    let t = &report.tally;
    s += &format!(
        "{} checks: {} passed, {} failed, {} skipped\n",
        t.checks, t.passed, t.failed, t.skipped
    );
    s
}

/// The min-ratio table of a fuzz run.
pub fn fuzz_table(report: &FuzzReport) -> String {
    let mut s = format!(
        "{:<18} {:>9} {:>9} {:>8} {:>8} {:>10} {:>12}  {}\n",
        "check", "instances", "evaluated", "skipped", "failures", "violations", "min_ratio", "min_ratio_seed"
    );
    for m in &report.summaries {
        s += &format!(
            "{:<18} {:>9} {:>9} {:>8} {:>8} {:>10} {:>12}  {}\n",
            m.check.name(),
            m.instances,
            m.evaluated,
            m.skipped,
            m.failures,
            m.violations,
            m.min_ratio.map(fmt_num).unwrap_or_else(|| "-".into()),
            m.min_ratio_seed.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
        );
    }
    s
}
