use std::collections::BTreeMap;
use std::path::Path;

use clincorp::EvalParams;
use serde::Deserialize;

use crate::CliError;

pub const ENV_VAR: &str = "CLINCORP_CONFIG";

/// Defaults read from a JSON file. Command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub beta: Option<f64>,
    pub policy: Option<String>,
    pub mode: Option<String>,
    pub parseval: Option<EvalParams>,
    pub doc_type: Option<String>,
    pub format: Option<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub duplicate_fraction: Option<f64>,
    pub window: Option<usize>,
    pub tau: BTreeMap<String, f64>,
    pub rule_order: Option<Vec<String>>,
    pub section_names: Vec<String>,
}

impl Config {
    /// `--config` first, then `$CLINCORP_CONFIG`, else all defaults.
    pub fn load(flag: Option<&Path>) -> Result<Config, CliError> {
        let env = std::env::var_os(ENV_VAR).filter(|v| !v.is_empty());
        let path = match (flag, &env) {
            (Some(p), _) => p,
            (None, Some(v)) => Path::new(v),
            (None, None) => return Ok(Config::default()),
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {}", path.display(), e)))?;
        serde_json::from_str(&text).map_err(|e| CliError(format!("{}: {}", path.display(), e)))
    }
}

/// Flag value, else the parsed config value, else the default.
pub fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: Option<&str>, default: T) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match (flag, cfg) {
        (Some(v), _) => Ok(v),
        (None, Some(s)) => s.parse().map_err(|e: T::Err| CliError(format!("config: {}", e))),
        (None, None) => Ok(default),
    }
}
