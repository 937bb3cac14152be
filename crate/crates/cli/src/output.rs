//! CSV and JSON emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, ScenarioConfig};
use crate::error::CliError;

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Empty field for a missing value.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }
}

/// JSON document wrapper shared by every command.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a ScenarioConfig,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'static str, config: &'a ScenarioConfig, body: T) -> Self {
        Self {
            tool: "euler-blowup",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            body,
        }
    }
}

/// Writes files into one directory, honouring the configured formats.
pub struct Sink {
    pub dir: PathBuf,
    formats: Vec<Format>,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats: formats.to_vec(),
            written: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        if !self.formats.contains(&Format::Csv) {
            return Ok(());
        }
        let path = self.dir.join(name);
        let io = |e: csv::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(&table.header).map_err(io)?;
        for row in &table.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.formats.contains(&Format::Json) {
            return Ok(());
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt(None), "");
        let x: f64 = num(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }
}
