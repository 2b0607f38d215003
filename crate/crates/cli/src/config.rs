//! Run configurations for `verify` and `fuzz`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use homocone::harness::{CheckKind, FuzzConfig, Scenario};
use serde::Deserialize;
use serde_json::Value;

use crate::output::Format;

/// Anything that makes a config unusable. Always exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))
}

fn json_error(path: &Path, e: &serde_json::Error) -> ConfigError {
    let what = if e.is_syntax() || e.is_eof() {
        "malformed JSON"
    } else {
        "invalid config"
    };
    let text = e.to_string();
    let detail = text.rsplit_once(" at line ").map_or(text.as_str(), |(m, _)| m);
    ConfigError(format!(
        "{what} in {} at line {}, column {}: {detail}",
        path.display(),
        e.line(),
        e.column()
    ))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| json_error(path, &e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRunConfig {
    /// Inline scenario objects or paths relative to the config file.
    scenarios: Vec<Value>,
    #[serde(default)]
    checks: Option<Vec<CheckKind>>,
    #[serde(default)]
    tolerances: BTreeMap<CheckKind, f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    format: Option<Format>,
    #[serde(default)]
    jobs: Option<usize>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub scenarios: Vec<Scenario>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

fn load_scenario_file(path: &Path) -> Result<Scenario, ConfigError> {
    parse(path, &read(path)?)
}

/// A config is either one scenario object or `{"scenarios": [...], ...}`.
pub fn load_run_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = read(path)?;
    let value: Value = parse(path, &text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut config = if value.get("scenarios").is_some() {
        let raw: RawRunConfig = parse(path, &text)?;
        let mut scenarios = Vec::with_capacity(raw.scenarios.len());
        for (i, entry) in raw.scenarios.into_iter().enumerate() {
            let mut s = match entry {
                Value::String(p) => load_scenario_file(&base.join(p))?,
                v @ Value::Object(_) => serde_json::from_value(v)
                    .map_err(|e| ConfigError(format!("invalid scenario {i} in {}: {e}", path.display())))?,
                _ => {
                    return Err(ConfigError(format!(
                        "scenario {i} in {} must be an object or a path",
                        path.display()
                    )))
                }
            };
            if let Some(checks) = &raw.checks {
                s.checks = checks.clone();
            }
            for (k, t) in &raw.tolerances {
                s.tolerances.insert(*k, *t);
            }
            if s.seed.is_none() {
                s.seed = raw.seed;
            }
            scenarios.push(s);
        }
        RunConfig {
            scenarios,
            out: raw.out.map(|o| base.join(o)),
            format: raw.format,
            jobs: raw.jobs,
        }
    } else {
        RunConfig {
            scenarios: vec![parse(path, &text)?],
            out: None,
            format: None,
            jobs: None,
        }
    };
    if config.scenarios.is_empty() {
        return Err(ConfigError(format!("{} lists no scenarios", path.display())));
    }
    for (i, s) in config.scenarios.iter_mut().enumerate() {
        if s.name.is_empty() {
            s.name = format!("scenario_{i}");
        }
        s.validate()
            .map_err(|e| ConfigError(format!("scenario {:?} in {}: {e}", s.name, path.display())))?;
    }
    Ok(config)
}

/// Fuzz settings; `count` and `seed` may be overridden on the command line.
pub fn load_fuzz_config(path: &Path, count: Option<usize>, seed: Option<u64>) -> Result<FuzzConfig, ConfigError> {
    let mut cfg: FuzzConfig = parse(path, &read(path)?)?;
    if let Some(c) = count {
        cfg.count = c;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}
