//! Output plumbing: every run writes `#` header lines carrying the tool
//! version and the resolved experiment spec, then data rows as CSV or as
//! one JSON object per line. Identical specs produce identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

/// The resolved configuration of one run; serialized into the output header
/// so a file is reproducible from its own first lines.
#[derive(Serialize, Deserialize, PartialEq, Debug, Clone, Default)]
pub struct ExperimentSpec {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exhaustive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ensemble: Option<bool>,
    pub format: String,
}

impl ExperimentSpec {
    pub fn new(command: &str, format: OutFormat) -> Self {
        ExperimentSpec {
            command: command.into(),
            format: match format {
                OutFormat::Csv => "csv".into(),
                OutFormat::Json => "json".into(),
            },
            ..Default::default()
        }
    }
}

pub struct Emitter {
    out: Box<dyn Write>,
    format: OutFormat,
}

impl Emitter {
    pub fn open(path: Option<&Path>, format: OutFormat) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::Usage(format!("cannot create {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Emitter { out, format })
    }

    pub fn header(
        &mut self,
        spec: &ExperimentSpec,
        notes: &[String],
        columns: &[&str],
    ) -> Result<(), CliError> {
        writeln!(self.out, "# bcnoise {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(self.out, "# spec: {}", serde_json::to_string(spec)?)?;
        for note in notes {
            writeln!(self.out, "# {note}")?;
        }
        if self.format == OutFormat::Csv {
            writeln!(self.out, "{}", columns.join(","))?;
        }
        Ok(())
    }

    pub fn row<T: Serialize>(&mut self, row: &T, cells: Vec<String>) -> Result<(), CliError> {
        match self.format {
            OutFormat::Csv => writeln!(self.out, "{}", cells.join(","))?,
            OutFormat::Json => writeln!(self.out, "{}", serde_json::to_string(row)?)?,
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn cell_f(x: f64) -> String {
    format!("{x}")
}

pub fn cell_opt<T: std::fmt::Display>(x: &Option<T>) -> String {
    match x {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ExperimentSpec {
            command: "tuples".into(),
            source: Some("random-n24-l0.25-s7".into()),
            gamma: Some("0.5".into()),
            trials: Some(200),
            seed: Some(7),
            ensemble: Some(true),
            format: "csv".into(),
            ..Default::default()
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        // absent fields stay absent rather than serializing as nulls
        assert!(!text.contains("null"));
    }

    #[test]
    fn empty_cells_for_missing_values() {
        assert_eq!(cell_opt::<u64>(&None), "");
        assert_eq!(cell_opt(&Some(3u64)), "3");
        assert_eq!(cell_f(0.25), "0.25");
    }
}
