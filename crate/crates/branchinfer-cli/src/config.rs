//! Settings resolved from flags, environment variables and a key=value file.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Keys understood in the config file, with their environment variables.
pub const KEYS: &[(&str, &str)] = &[
    ("solver_cmd", "SOLVER_CMD"),
    ("seed", "BRANCHINFER_SEED"),
    ("threads", "BRANCHINFER_THREADS"),
];

/// A parsed config file plus a snapshot of the relevant environment.
#[derive(Clone, Debug, Default)]
pub struct Config {
    file: BTreeMap<String, String>,
    env: BTreeMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", i + 1);
        };
        let k = k.trim();
        if !KEYS.iter().any(|(key, _)| *key == k) {
            bail!("config line {}: unknown key '{k}'", i + 1);
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl Config {
    /// Loads the file (if any) and captures the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                parse_config(&text).with_context(|| format!("in config {}", p.display()))?
            }
            None => BTreeMap::new(),
        };
        let env = KEYS
            .iter()
            .filter_map(|(_, var)| std::env::var(var).ok().map(|v| (var.to_string(), v)))
            .collect();
        Ok(Config { file, env })
    }

    #[cfg(test)]
    /// Builds a config from explicit maps (file entries keyed by config key,
    /// environment entries keyed by variable name).
    pub fn from_parts(file: BTreeMap<String, String>, env: BTreeMap<String, String>) -> Self {
        Config { file, env }
    }

    /// Flag value, else environment, else file.
    pub fn resolve(&self, flag: Option<String>, key: &str) -> Option<String> {
        if flag.is_some() {
            return flag;
        }
        let var = KEYS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)?;
        self.env.get(var).or_else(|| self.file.get(key)).cloned()
    }

    /// [`Config::resolve`] parsed into `T`.
    pub fn resolve_parsed<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: std::str::FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        match self.resolve(flag.map(|f| f.to_string()), key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("invalid value '{s}' for {key}: {e}")),
        }
    }
}
