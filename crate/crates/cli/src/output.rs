//! File output: atomic writes, round-trip CSV, JSON sidecars.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// A note that must not be dropped silently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
        }
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// 17 significant digits: parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1) * header.len());
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// `a.csv → a.json`, `a.json → a.meta.json`.
pub fn sidecar_path(main: &Path) -> PathBuf {
    match main.extension().and_then(|e| e.to_str()) {
        Some("json") => main.with_extension("meta.json"),
        _ => main.with_extension("json"),
    }
}

/// `out` relative to `dir` unless absolute; `default` when `out` is absent.
pub fn resolve(dir: &Path, out: Option<&Path>, default: &str) -> PathBuf {
    match out {
        Some(p) if p.is_absolute() => p.to_path_buf(),
        Some(p) => dir.join(p),
        None => dir.join(default),
    }
}

/// JSON to `path`, or to stdout when `path` is `None`.
pub fn emit_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let text = json_text(value);
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Human summary of a written file set.
pub fn report_written(paths: &[&Path]) -> String {
    let mut s = String::new();
    for p in paths {
        let _ = writeln!(s, "wrote {}", p.display());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(
            sidecar_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.json")
        );
        assert_eq!(
            sidecar_path(Path::new("b.json")),
            PathBuf::from("b.meta.json")
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(
            std::fs::read_dir(dir.path().join("sub")).unwrap().count(),
            1
        );
    }
}
