//! JSON-lines reading and writing.
//!
//! Files written by the command-line tool may start with a single metadata
//! line of the form `{"meta": {...}}` recording the seed and stage settings.
//! Readers skip it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

pub const META_KEY: &str = "meta";

fn is_meta_line(line: &str) -> bool {
    match serde_json::from_str::<serde_json::Value>(line) {
        Ok(serde_json::Value::Object(map)) => map.len() == 1 && map.contains_key(META_KEY),
        _ => false,
    }
}

/// Parse every non-blank, non-metadata line of `path` as `T`.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (i == 0 && is_meta_line(trimmed)) {
            continue;
        }
        let value =
            serde_json::from_str(trimmed).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        out.push(value);
    }
    Ok(out)
}

/// Return the metadata object of a file, if it has one.
pub fn read_meta(path: &Path) -> Result<Option<serde_json::Value>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    if is_meta_line(first.trim()) {
        let mut v: serde_json::Value = serde_json::from_str(first.trim())?;
        Ok(v.get_mut(META_KEY).map(serde_json::Value::take))
    } else {
        Ok(None)
    }
}

pub fn write<T: Serialize>(
    path: &Path,
    meta: Option<&serde_json::Value>,
    records: impl IntoIterator<Item = T>,
) -> Result<usize> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |line: String| -> Result<()> {
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))
    };
    if let Some(meta) = meta {
        put(serde_json::json!({ META_KEY: meta }).to_string())?;
    }
    let mut n = 0;
    for record in records {
        put(serde_json::to_string(&record)?)?;
        n += 1;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(n)
}
