//! CSV emission with byte-stable formatting.
//!
//! Floats are written with Rust's shortest round-trip `Display`, so a value
//! always serializes to the same bytes and files diff cleanly between runs.

use anyhow::{Context, Result};
use std::fmt::Display;
use std::path::{Path, PathBuf};

/// Writes a header line plus one line per row.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut out = String::with_capacity(4096);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row.as_ref());
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Accumulated per-experiment metrics, one row per (kind, N, metric).
#[derive(Debug, Default)]
pub struct Summary {
    rows: Vec<String>,
}

impl Summary {
    pub fn push(&mut self, kind: impl Display, n: impl Display, metric: &str, value: f64) {
        self.rows.push(format!("{kind},{n},{metric},{value}"));
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    /// Writes `summary.csv` into the output directory.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("summary.csv");
        write_csv(&path, "kind,n,metric,value", &self.rows)?;
        Ok(path)
    }
}
