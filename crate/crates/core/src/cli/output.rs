//! Result files: CSV tables with metadata sidecars, and JSON documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// One CSV field.
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits.
            Cell::F(x) => format!("{x:.16e}"),
            Cell::U(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::U(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::U(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::cli::output::Cell::from($x)),*] };
}
pub(crate) use row;

#[derive(Serialize)]
struct Sidecar<'a, M: Serialize> {
    file: &'a str,
    columns: &'a [&'a str],
    rows: usize,
    version: &'static str,
    meta: &'a M,
}

/// Output directory shared by all files of one command.
pub struct OutDir {
    root: PathBuf,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `name` (RFC-4180, header first) and `<stem>.meta.json` next to it.
    pub fn csv<M: Serialize>(&self, name: &str, header: &[&str], rows: &[Vec<Cell>], meta: &M) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        w.write_record(header).map_err(|e| io_err(&path, e))?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            w.write_record(r.iter().map(Cell::render))
                .map_err(|e| io_err(&path, e))?;
        }
        w.flush()?;
        let stem = name.strip_suffix(".csv").unwrap_or(name);
        self.json(
            &format!("{stem}.meta.json"),
            &Sidecar {
                file: name,
                columns: header,
                rows: rows.len(),
                version: env!("CARGO_PKG_VERSION"),
                meta,
            },
        )?;
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(dir.path()).unwrap();
        let rows = vec![row![0.1, 3usize, "a,b"]];
        out.csv("t.csv", &["x", "n", "s"], &rows, &serde_json::json!({"k": 1})).unwrap();
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "x,n,s\n1.0000000000000001e-1,3,\"a,b\"\n");
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("t.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["meta"]["k"], 1);
        assert_eq!(meta["rows"], 1);
    }
}
