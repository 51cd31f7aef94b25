//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags, with lexicon paths defaulting to files under `LINGVAR_LEXICON_ROOT`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub const LEXICON_ROOT_ENV: &str = "LINGVAR_LEXICON_ROOT";

/// File names looked up under the lexicon root, first existing one wins.
const ROOT_DEFAULTS: [(&str, &[&str]); 5] = [
    ("vocab", &["vocab.txt"]),
    ("inflections", &["inflection.tsv"]),
    ("derivations", &["derivation.tsv"]),
    ("wordnet", &["wordnet", "wordnet.tsv"]),
    ("affix_cycle", &["affix-cycle.tsv"]),
];

pub const KEYS: [&str; 23] = [
    "corpus",
    "input",
    "vocab",
    "inflections",
    "derivations",
    "wordnet",
    "affix_cycle",
    "multi_plugin",
    "plugin_timeout_ms",
    "seed",
    "kind",
    "composition",
    "size",
    "dropout",
    "workers",
    "out",
    "sample_size",
    "predictions",
    "gold",
    "model",
    "data",
    "scores",
    "format",
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(raw: &str, origin: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key = value", origin.display(), i + 1))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("{}:{}: unknown key {key:?}", origin.display(), i + 1);
            }
            let mut value = value.trim().to_string();
            if matches!(
                key.as_str(),
                "corpus"
                    | "input"
                    | "vocab"
                    | "inflections"
                    | "derivations"
                    | "wordnet"
                    | "affix_cycle"
                    | "predictions"
                    | "gold"
                    | "out"
            ) {
                value = resolve(origin, &value);
            } else if key == "scores" {
                let parts: Vec<String> = value
                    .split(',')
                    .map(|v| resolve(origin, v.trim()))
                    .collect();
                value = parts.join(",");
            }
            values.insert(key, value);
        }
        Ok(RunConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&raw, path)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_parsed<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow::anyhow!("{key} = {v:?}: {e}"))
            })
            .transpose()
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).with_context(|| {
            format!(
                "missing setting {key:?} (use --{} or the config file)",
                key.replace('_', "-")
            )
        })
    }

    /// A path setting, falling back to the lexicon root when one is set and
    /// the default file exists there.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        if let Some(v) = self.get(key) {
            return Some(PathBuf::from(v));
        }
        let (_, files) = ROOT_DEFAULTS.iter().find(|(k, _)| *k == key)?;
        let root = std::env::var_os(LEXICON_ROOT_ENV)?;
        files
            .iter()
            .map(|f| Path::new(&root).join(f))
            .find(|p| p.exists())
    }

    /// Like [`path`](Self::path) but the file must exist.
    pub fn existing_path(&self, key: &str) -> Result<Option<PathBuf>> {
        match self.path(key) {
            Some(p) if !p.exists() => bail!("{key}: {} does not exist", p.display()),
            other => Ok(other),
        }
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf> {
        self.existing_path(key)?.with_context(|| {
            format!(
                "missing path {key:?} (use --{}, the config file, or {LEXICON_ROOT_ENV})",
                key.replace('_', "-")
            )
        })
    }
}

fn resolve(origin: &Path, value: &str) -> String {
    let p = Path::new(value);
    if p.is_absolute() {
        return value.to_string();
    }
    match origin.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(p).display().to_string(),
        _ => value.to_string(),
    }
}
