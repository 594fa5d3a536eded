//! Reading observation vectors.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use crate::error::CliError;

/// Read newline-delimited numbers or a single-column CSV with an optional
/// header row. Blank lines are skipped; `-` reads standard input.
pub fn read_observations(path: &Path) -> Result<Vec<f64>, CliError> {
    let source: Box<dyn Read> = if path.as_os_str() == "-" {
        Box::new(io::stdin())
    } else {
        Box::new(File::open(path).map_err(|e| CliError::io(path, e))?)
    };
    parse_observations(source, &path.display().to_string())
}

pub fn parse_observations<R: Read>(source: R, label: &str) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{label}: {e}")))?;
        let Some(field) = record.get(0).filter(|f| !f.is_empty()) else {
            continue;
        };
        if record.len() > 1 && record.iter().skip(1).any(|f| !f.is_empty()) {
            return Err(CliError::Input(format!(
                "{label}, line {}: expected a single column",
                row + 1
            )));
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            // A non-numeric first entry is a header.
            Err(_) if values.is_empty() && row == 0 => continue,
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{label}, line {}: `{field}` is not a number",
                    row + 1
                )))
            }
        }
    }
    Ok(values)
}
