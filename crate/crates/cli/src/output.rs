//! CSV / JSON writers.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: &str = "m,n,lam,r,fidelity,ng,path,limit_flag";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

/// Writes rows with a header derived from the field names.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// A JSON array, one element per line.
pub fn write_json<W: Write, T: Serialize>(mut out: W, rows: &[T]) -> CliResult<()> {
    writeln!(out, "[")?;
    for (i, row) in rows.iter().enumerate() {
        let sep = if i + 1 < rows.len() { "," } else { "" };
        writeln!(out, "  {}{sep}", serde_json::to_string(row)?)?;
    }
    writeln!(out, "]")?;
    Ok(())
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T], format: Format) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(out, rows),
        Format::Json => write_json(out, rows),
    }
}

/// A gnuplot script that plots `csv_path`, one curve per `(m, n)`.
pub fn gnuplot_stub(csv_path: &str, pairs: &[(u32, u32)], x_col: usize, y_col: usize, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{x_label}'\nset ylabel '{y_label}'\nset key outside\n"));
    let curves: Vec<String> = pairs
        .iter()
        .map(|(m, n)| {
            format!(
                "'{csv_path}' every ::1 using (($1=={m} && $2=={n}) ? ${x_col} : 1/0):{y_col} with lines title 'm={m}, n={n}'"
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}
