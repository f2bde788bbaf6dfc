//! Flat `key=value` settings merged from a config file and command-line flags.
//!
//! Keys mirror flag names without the leading dashes; `_` and `-` are
//! interchangeable. `sweep` and `tol` may repeat. Flags override file entries.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{usage, CliError, CliResult};

/// Keys that accumulate instead of being overridden.
pub const LIST_KEYS: [&str; 2] = ["sweep", "tol"];

#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Flag,
    File { path: String, line: usize },
    Sweep,
    Env(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Flag => f.write_str("command line"),
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Sweep => f.write_str("sweep"),
            Origin::Env(name) => write!(f, "environment variable {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub raw: String,
    pub origin: Origin,
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, Entry>,
    lists: BTreeMap<String, Vec<Entry>>,
}

pub fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

impl Settings {
    pub fn from_file(path: &Path, known: &[&str]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
        Self::parse(&text, &path.display().to_string(), known)
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, source: &str, known: &[&str]) -> CliResult<Self> {
        let mut out = Self::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::File { path: source.to_string(), line: i + 1 };
            let body = line.split_once('#').map_or(line, |(b, _)| b).trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) =
                body.split_once('=').ok_or_else(|| usage(format!("{origin}: expected key=value, got '{body}'")))?;
            let key = normalize_key(key);
            if !known.contains(&key.as_str()) {
                return Err(usage(format!("{origin}: unknown key '{key}'")));
            }
            let entry = Entry { raw: value.trim().to_string(), origin: origin.clone() };
            if LIST_KEYS.contains(&key.as_str()) {
                out.lists.entry(key).or_default().push(entry);
            } else if let Some(prev) = out.values.get(&key) {
                return Err(usage(format!("{origin}: duplicate key '{key}' (first set at {})", prev.origin)));
            } else {
                out.values.insert(key, entry);
            }
        }
        Ok(out)
    }

    /// Overrides file entries with flag values; a non-empty flag list replaces the file list.
    pub fn apply_flags(&mut self, flags: Vec<(&str, String)>) {
        let mut lists: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
        for (key, raw) in flags {
            let key = normalize_key(key);
            let entry = Entry { raw, origin: Origin::Flag };
            if LIST_KEYS.contains(&key.as_str()) {
                lists.entry(key).or_default().push(entry);
            } else {
                self.values.insert(key, entry);
            }
        }
        self.lists.extend(lists);
    }

    /// Fills `key` from an environment variable when neither file nor flags set it.
    pub fn fallback_env(&mut self, key: &str, var: &'static str) {
        if self.values.contains_key(key) {
            return;
        }
        if let Ok(raw) = std::env::var(var) {
            self.values.insert(key.to_string(), Entry { raw, origin: Origin::Env(var) });
        }
    }

    pub fn set_number(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), Entry { raw: format!("{value:e}"), origin: Origin::Sweep });
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.values.get(key)
    }

    pub fn list(&self, key: &str) -> &[Entry] {
        self.lists.get(key).map_or(&[], Vec::as_slice)
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> CliResult<Option<T>> {
        self.values
            .get(key)
            .map(|e| {
                e.raw.parse::<T>().map_err(|_| usage(format!("{}: {key}: expected {what}, got '{}'", e.origin, e.raw)))
            })
            .transpose()
    }

    pub fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        let v = self.parsed::<f64>(key, "a number")?;
        if let (Some(x), Some(e)) = (v, self.values.get(key)) {
            if !x.is_finite() {
                return Err(usage(format!("{}: {key}: value must be finite, got '{}'", e.origin, e.raw)));
            }
        }
        Ok(v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> CliResult<Option<u64>> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        Ok(self.parsed(key, "true or false")?.unwrap_or(default))
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|e| e.raw.as_str())
    }

    /// One of `choices`, or `None` when unset.
    pub fn choice(&self, key: &str, choices: &[&str]) -> CliResult<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(e) if choices.contains(&e.raw.as_str()) => Ok(Some(e.raw.clone())),
            Some(e) => Err(usage(format!("{}: {key}: expected one of {}, got '{}'", e.origin, choices.join("|"), e.raw))),
        }
    }

    /// Comma-separated components.
    pub fn vector(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(e) = self.values.get(key) else {
            return Ok(None);
        };
        e.raw
            .split(',')
            .map(|c| {
                let c = c.trim();
                c.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    usage(format!("{}: {key}: expected comma-separated finite numbers, got '{}'", e.origin, e.raw))
                })
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }
}
