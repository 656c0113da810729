//! Deterministic emission: 12-significant-digit numbers, a versioned CSV
//! layout with a config-echo comment line, and rounded JSON envelopes.

use crate::Result;
use std::path::Path;

/// Version stamp carried by the CSV comment line; bump when columns change.
pub const CSV_SCHEMA: &str = "greenfn-csv-v1";

/// Version stamp carried by every JSON envelope.
pub const JSON_SCHEMA_VERSION: u32 = 1;

/// `v` to 12 significant digits in scientific notation.
pub fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// `v` rounded through its 12-significant-digit decimal form, so JSON
/// payloads carry exactly what the CSV form would.
pub fn round12(v: f64) -> f64 {
    sig12(v).parse().unwrap_or(v)
}

/// CSV assembly: one comment line echoing the configuration, a header
/// row, then data rows. Cells never contain commas, so no quoting.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(config_echo: &str, header: &str) -> Csv {
        Csv {
            lines: vec![format!("# {CSV_SCHEMA} {config_echo}"), header.to_string()],
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        self.lines.join("\n") + "\n"
    }
}

/// Writes `data` to the output file, or stdout when none was given.
/// Diagnostics never travel through here; they go to stderr.
pub fn emit(output: Option<&Path>, data: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, data)?,
        None => print!("{data}"),
    }
    Ok(())
}

/// Pretty-prints a JSON value with a trailing newline. `serde_json`
/// orders map keys deterministically, so byte-stable across runs.
pub fn json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}

/// Formats a lattice point as space-separated coordinates, the form used
/// inside a single CSV cell: `[1, 0, -2]` becomes `"1 0 -2"`.
pub fn point_cell(x: &[i64]) -> String {
    x.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
