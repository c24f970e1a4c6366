//! CSV formatting and file emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Shortest decimal form with 12 significant digits, like C's `%.12g`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, v))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Optional value; empty cell when absent.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// A header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Metadata written next to every CSV.
#[derive(Debug, Serialize)]
pub struct Sidecar<T: Serialize> {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub details: T,
}

impl<T: Serialize> Sidecar<T> {
    pub fn new(command: &str, seed: Option<u64>, trials: Option<u64>, details: T) -> Self {
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION"), seed, trials, details }
    }
}

/// Path of the JSON sidecar for `csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Write the CSV and its sidecar, or print the CSV when no path is given.
pub fn emit<T: Serialize>(out: Option<&Path>, table: &Table, sidecar: &Sidecar<T>) -> Result<(), CliError> {
    let csv = table.to_csv();
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(p) => {
            let json = serde_json::to_string_pretty(sidecar).map_err(|e| CliError::Io(e.to_string()))?;
            write_file(p, &csv)?;
            write_file(&sidecar_path(p), &(json + "\n"))
        }
    }
}

pub fn write_file(p: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(p, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))
}
