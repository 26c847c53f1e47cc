//! Flat `key = value` configuration files.
//!
//! Keys are long flag names without the leading dashes. Blank lines and lines
//! starting with `#` are ignored. Values given on the command line win over
//! values from the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;

use crate::CliError;

/// Keys accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "sigma1-sq",
    "sigma1-sq-db",
    "sigma2-sq",
    "sigma2-sq-db",
    "rho",
    "p-a",
    "p-a-db",
    "p-b",
    "p-b-db",
    "snr-db",
    "noise-sq",
    "noise-sq-db",
    "rsi-a-sq",
    "rsi-a-sq-db",
    "rsi-b-sq",
    "rsi-b-sq-db",
    "rsi-db",
    "eta",
    "t",
    "t1",
    "t2",
    "alpha",
    "policy",
    "power-convention",
    "mode",
    "path",
    "format",
    "output",
    "seed",
    "trials",
    "level",
    "dump-samples",
    "preset",
    "spec",
    "axis",
    "grid",
    "modes",
    "series-axis",
    "series",
];

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::invalid(format!(
                    "config line {}: expected key = value",
                    n + 1
                )));
            };
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::invalid(format!(
                    "config line {}: unknown key {key:?}",
                    n + 1
                )));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::invalid(format!(
                    "config line {}: duplicate key {key:?}",
                    n + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Merges flag values with an optional configuration file.
#[derive(Clone, Copy)]
pub struct Resolver<'a> {
    cfg: Option<&'a ConfigFile>,
}

impl<'a> Resolver<'a> {
    pub fn new(cfg: Option<&'a ConfigFile>) -> Self {
        Self { cfg }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.cfg.and_then(|c| c.get(key))
    }

    pub fn value<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::invalid(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    pub fn choice<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                T::from_str(s, true)
                    .map_err(|e| CliError::invalid(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    /// A quantity with linear (`key`) and dB (`key-db`) spellings.
    pub fn quantity(
        &self,
        linear: Option<f64>,
        db: Option<f64>,
        key: &str,
    ) -> Result<Option<f64>, CliError> {
        let db_key = format!("{key}-db");
        let pick = |lin: Option<f64>, db: Option<f64>| match (lin, db) {
            (Some(_), Some(_)) => Err(CliError::invalid(format!(
                "--{key} and --{db_key} are mutually exclusive"
            ))),
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(fdkey::model::db_to_linear(d))),
            (None, None) => Ok(None),
        };
        match pick(linear, db)? {
            Some(v) => Ok(Some(v)),
            None => pick(self.value(None, key)?, self.value(None, &db_key)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let c = ConfigFile::parse("# sweep point\n\nrho = 0.7\n  snr-db=40  \n").unwrap();
        assert_eq!(c.get("rho"), Some("0.7"));
        assert_eq!(c.get("snr-db"), Some("40"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("rho = 1\nrho = 2").is_err());
        assert!(ConfigFile::parse("rho").is_err());
    }

    #[test]
    fn flags_win_and_db_converts() {
        let c = ConfigFile::parse("rho = 0.2\nsigma1-sq-db = 10").unwrap();
        let r = Resolver::new(Some(&c));
        assert_eq!(r.value(Some(0.5), "rho").unwrap(), Some(0.5));
        assert_eq!(r.value::<f64>(None, "rho").unwrap(), Some(0.2));
        assert_eq!(r.quantity(None, None, "sigma1-sq").unwrap(), Some(10.0));
        assert_eq!(r.quantity(Some(3.0), None, "sigma1-sq").unwrap(), Some(3.0));
        assert!(r.quantity(Some(3.0), Some(1.0), "sigma1-sq").is_err());
    }
}
