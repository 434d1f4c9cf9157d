use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Writes `contents` to `path` via a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Emits to `--output` when given, stdout otherwise.
pub fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, contents.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `key: value` lines from a flat JSON object; nested values stay JSON.
pub fn text_from_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        other => out.push_str(&format!("{other}\n")),
    }
    Ok(out)
}

/// Two-column `key,value` CSV from a flat JSON object; nested values are
/// written as JSON strings.
pub fn csv_from_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"])?;
    if let serde_json::Value::Object(map) = v {
        for (k, v) in map {
            let cell = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            w.write_record([k, cell])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
