//! `key=value` config files and the flag > file > default layering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Values read from a config file, keyed by flag name without dashes
/// (`max-iters` and `max_iters` are the same key).
#[derive(Debug, Default)]
pub struct Layers {
    file: BTreeMap<String, String>,
    source: Option<String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Layers {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut layers = Self::parse(&text)
            .map_err(|msg| CliError::Usage(format!("config {}: {msg}", path.display())))?;
        layers.source = Some(path.display().to_string());
        Ok(layers)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut file = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key=value, got {raw:?}", k + 1));
            };
            let key = normalize(key);
            if key.is_empty() {
                return Err(format!("line {}: empty key", k + 1));
            }
            if file.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(format!("line {}: {key} given twice", k + 1));
            }
        }
        Ok(Self { file, source: None })
    }

    /// The flag if given, else the file entry, else `default`.
    pub fn pick<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(key, flag)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| CliError::Usage(format!("config key {key} = {raw:?}: {e}")))
            })
            .transpose()
    }

    /// Rejects file keys the subcommand does not know.
    pub fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        let known: BTreeSet<&str> = known.iter().copied().collect();
        let unknown: Vec<&str> = self
            .file
            .keys()
            .map(String::as_str)
            .filter(|k| !known.contains(k))
            .collect();
        if unknown.is_empty() {
            return Ok(());
        }
        Err(CliError::Usage(format!(
            "unknown config key(s) {} in {}; this command accepts {}",
            unknown.join(", "),
            self.source.as_deref().unwrap_or("config"),
            known.into_iter().collect::<Vec<_>>().join(", ")
        )))
    }
}
