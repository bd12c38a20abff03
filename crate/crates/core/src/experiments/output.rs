//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "tqdsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A named file produced by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.name);
        std::fs::write(&path, &self.contents).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// 12 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Comma-separated table with '#' header comments.
pub struct CsvTable {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(command: &str, config_hash: &str, columns: Vec<String>) -> Self {
        Self {
            comments: vec![
                format!("tool: {TOOL_NAME} {TOOL_VERSION}"),
                format!("command: {command}"),
                format!("config_hash: {config_hash}"),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn into_artifact(self, name: impl Into<String>) -> Artifact {
        Artifact {
            name: name.into(),
            contents: self.render(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    config_hash: &'a str,
    #[serde(flatten)]
    body: T,
}

pub fn json_artifact<T: Serialize>(name: impl Into<String>, command: &str, config_hash: &str, body: T) -> Result<Artifact> {
    let env = Envelope {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command,
        config_hash,
        body,
    };
    let mut contents = serde_json::to_string_pretty(&env).map_err(|e| Error::Config(e.to_string()))?;
    contents.push('\n');
    Ok(Artifact {
        name: name.into(),
        contents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_dialect() {
        let mut t = CsvTable::new("x", "abc", vec!["a".into(), "b".into()]);
        t.push(vec![1.0, -2.5e-7]);
        let s = t.render();
        assert!(s.starts_with("# tool: tqdsim"));
        assert!(s.contains("# config_hash: abc\n"));
        assert!(s.ends_with("a,b\n1.00000000000e0,-2.50000000000e-7\n"));
    }
}
