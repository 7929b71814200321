//! CSV and JSON result files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::Format;
use crate::sweep::SweepRow;

pub const CSV_HEADER: [&str; 10] = [
    "snr_db",
    "frames",
    "frame_errors",
    "bler",
    "avg_queries",
    "bit_errors",
    "ber",
    "hd_valid_rate",
    "stage_activation",
    "wall_time_s",
];

/// Writes rows as CSV; stage activation rates are `;`-joined in one column.
///
/// Floats use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        let stages: Vec<String> = r.stage_activation.iter().map(f64::to_string).collect();
        out.write_record([
            r.snr_db.to_string(),
            r.frames.to_string(),
            r.frame_errors.to_string(),
            r.bler.to_string(),
            r.avg_queries.to_string(),
            r.bit_errors.to_string(),
            r.ber.to_string(),
            r.hd_valid_rate.to_string(),
            stages.join(";"),
            r.wall_time_s.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> { Ok(rec[i].parse()?) };
        let u = |i: usize| -> Result<u64> { Ok(rec[i].parse()?) };
        let stage_activation = if rec[8].is_empty() {
            Vec::new()
        } else {
            rec[8].split(';').map(str::parse).collect::<Result<_, _>>()?
        };
        rows.push(SweepRow {
            snr_db: f(0)?,
            frames: u(1)?,
            frame_errors: u(2)?,
            bler: f(3)?,
            avg_queries: f(4)?,
            bit_errors: u(5)?,
            ber: f(6)?,
            hd_valid_rate: f(7)?,
            stage_activation,
            wall_time_s: f(9)?,
        });
    }
    Ok(rows)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, mut w: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit_results(rows: &[SweepRow], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            write_rows(rows, format, BufWriter::new(f))
        }
        None => write_rows(rows, format, std::io::stdout().lock()),
    }
}
