use std::fs;
use std::io::Write;

use num_complex::Complex64;
use serde_json::Value;

use crate::args::{OutputArgs, OutputFormat};
use crate::Failure;

/// Rows for the csv form of a payload.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        format!("{x}")
    }
}

pub fn complex_cells(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

fn csv_text(table: &Table) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::input(format!("csv: {e}"));
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::input(format!("csv: {e}")))
}

/// Writes the payload in the requested format to `--out` or stdout.
pub fn emit(
    out: &OutputArgs,
    default: OutputFormat,
    json: impl FnOnce() -> Value,
    csv: impl FnOnce() -> Table,
) -> Result<(), Failure> {
    let bytes = match out.output.unwrap_or(default) {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&json()).map_err(|e| Failure::input(format!("json: {e}")))?;
            text.push('\n');
            text.into_bytes()
        }
        OutputFormat::Csv => csv_text(&csv())?,
    };
    match &out.out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::input(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.0, 0.269_958_518_398_223_73] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0), "1.0");
    }
}
