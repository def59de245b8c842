//! Reading a series from a file or standard input.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use crate::CliError;

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))
    }
}

fn parse_value(raw: &str, line: usize) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Input(format!("line {line}: `{}` is not a number", raw.trim())))
}

/// One value per line; blank lines and lines starting with `#` are skipped.
pub fn parse_lines(text: &str) -> Result<Vec<f64>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_value(l, i + 1))
        .collect()
}

/// The column named `column` of a CSV file with a header row. A column that
/// matches no header name is read as a 1-based column number.
pub fn parse_csv_column(text: &str, column: &str) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("CSV header: {e}")))?
        .clone();
    let idx = match headers.iter().position(|h| h == column) {
        Some(i) => i,
        None => match column.parse::<usize>() {
            Ok(n) if n >= 1 && n <= headers.len() => n - 1,
            _ => {
                return Err(CliError::Input(format!(
                    "no column `{column}` in the CSV header"
                )))
            }
        },
    };
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        // header is line 1
        let line = row + 2;
        let record = record.map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
        let cell = record
            .get(idx)
            .ok_or_else(|| CliError::Input(format!("line {line}: missing column `{column}`")))?;
        values.push(parse_value(cell, line)?);
    }
    Ok(values)
}

/// Reads the series at `path` (`-` for standard input).
pub fn read_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let text = read_text(path)?;
    match column {
        Some(c) => parse_csv_column(&text, c),
        None => parse_lines(&text),
    }
}
