use crate::args::{Format, OutputArgs};
use crate::error::CliError;
use serde::Serialize;
use std::io::Write;

/// A document that can be written as JSON or as a CSV table.
pub trait Tabular: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn emit<T: Tabular>(doc: &T, out: &OutputArgs) -> Result<(), CliError> {
    let bytes = match out.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(doc.header())?;
            for r in doc.rows() {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| CliError::Validation(e.to_string()))?
        }
    };
    match &out.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

pub fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}
