//! Number formatting and file emission shared by the subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::{Format, OutputArgs};

pub const SIGNIFICANT_DIGITS: usize = 10;

/// `x` with [`SIGNIFICANT_DIGITS`] significant digits, in positional notation
/// unless the exponent is extreme.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let scientific = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exponent: i32 = scientific
        .split_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if (-4..=15).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        scientific
    }
}

/// `x` as it reads back from its [`sig`] rendering.
pub fn round_sig(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}

pub fn fixed5(x: f64) -> String {
    format!("{x:.5}")
}

pub fn round5(x: f64) -> f64 {
    fixed5(x).parse().unwrap_or(x)
}

pub fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

/// A record with a fixed CSV layout.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn csv_bytes<R: CsvRow>(rows: &[R]) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(R::HEADER)?;
    for row in rows {
        writer.write_record(row.cells())?;
    }
    writer.into_inner().context("flushing CSV buffer")
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// CSV from `rows`, or JSON from `document`, to the requested destination.
pub fn emit<R: CsvRow, T: Serialize>(output: &OutputArgs, rows: &[R], document: &T) -> Result<()> {
    let bytes = match output.format() {
        Format::Csv => csv_bytes(rows)?,
        Format::Json => json_bytes(document)?,
    };
    write_to(output.out.as_deref(), &bytes)
}

pub fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig(0.948878381234567), "0.9488783812");
        assert_eq!(sig(-1.3744512345678), "-1.374451235");
        assert_eq!(sig(10769047.696636112), "10769047.70");
        assert_eq!(sig(1.0), "1.000000000");
        assert_eq!(sig(3.2e-9), "3.200000000e-9");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(-0.0), "0");
        assert_eq!(sig(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.948878381234567, -1.3744512345678, 3.2e-9, 12345.678901234, 1e-5] {
            let r = round_sig(x);
            assert_eq!(sig(r), sig(x));
            assert_eq!(round_sig(r), r);
        }
        assert_eq!(fixed5(0.9), "0.90000");
        assert_eq!(round5(0.948884), 0.94888);
    }
}
