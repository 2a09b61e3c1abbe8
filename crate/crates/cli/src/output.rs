use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use wffd::bounds::BoundReport;

/// One CSV/JSON record of a bound evaluation. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub theorem: String,
    pub regime: u8,
    #[serde(rename = "P")]
    pub p: f64,
    pub c: f64,
    pub dist_id: String,
    pub inner_bpcu: f64,
    pub outer_bpcu: f64,
    pub gap_claimed: Option<f64>,
    pub gap_realized: f64,
}

pub const COLUMNS: [&str; 9] = [
    "theorem",
    "regime",
    "P",
    "c",
    "dist_id",
    "inner_bpcu",
    "outer_bpcu",
    "gap_claimed",
    "gap_realized",
];

impl Row {
    pub fn new(p: f64, c: f64, dist_id: String, r: &BoundReport) -> Self {
        Row {
            theorem: r.theorem.to_string(),
            regime: r.regime,
            p,
            c,
            dist_id,
            inner_bpcu: r.inner_bpcu,
            outer_bpcu: r.outer_bpcu,
            gap_claimed: r.gap_claimed_bpcu,
            gap_realized: r.gap_realized_bpcu,
        }
    }
}

/// Fixed-width table of rows.
pub fn write_table(w: &mut dyn Write, rows: &[Row]) -> io::Result<()> {
    let id_width = rows
        .iter()
        .map(|r| r.dist_id.len())
        .max()
        .unwrap_or(0)
        .max(7);
    writeln!(
        w,
        "{:<14} {:>6} {:>12} {:>12} {:<id_width$} {:>10} {:>10} {:>11} {:>12}",
        "theorem", "regime", "P", "c", "dist_id", "inner", "outer", "gap_claimed", "gap_realized"
    )?;
    for r in rows {
        let claimed = r.gap_claimed.map_or("-".to_string(), |g| format!("{g:.6}"));
        writeln!(
            w,
            "{:<14} {:>6} {:>12.6} {:>12.6} {:<id_width$} {:>10.6} {:>10.6} {:>11} {:>12.6}",
            r.theorem,
            r.regime,
            r.p,
            r.c,
            r.dist_id,
            r.inner_bpcu,
            r.outer_bpcu,
            claimed,
            r.gap_realized
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn format_of(path: &Path) -> Result<Format, String> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        _ => Err(format!(
            "--out {}: expected a .csv or .json file",
            path.display()
        )),
    }
}

/// Writes `records` as CSV (one row each) or as a JSON array.
pub fn write_records<T: Serialize>(path: &Path, records: &[T]) -> Result<(), String> {
    let fail = |e: &dyn std::fmt::Display| format!("cannot write {}: {e}", path.display());
    match format_of(path)? {
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| fail(&e))?;
            for r in records {
                w.serialize(r).map_err(|e| fail(&e))?;
            }
            w.flush().map_err(|e| fail(&e))
        }
        Format::Json => {
            let file = File::create(path).map_err(|e| fail(&e))?;
            let mut w = io::BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, records).map_err(|e| fail(&e))?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| fail(&e))
        }
    }
}
