//! Output encoding: locale-independent number formatting, CSV and JSON
//! emission, and the stdout-or-file sink.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use robust_pricing::{PriceRegion, TailRegion};

/// Labels match the library's serialized names.
pub fn price_region_text(r: PriceRegion) -> &'static str {
    match r {
        PriceRegion::Low => "low",
        PriceRegion::Mid => "mid",
        PriceRegion::High => "high",
    }
}

pub fn tail_region_text(r: TailRegion) -> &'static str {
    match r {
        TailRegion::Cantelli => "Cantelli",
        TailRegion::MeanSupport => "MeanSupport",
        TailRegion::ThreePoint => "ThreePoint",
        TailRegion::Zero => "Zero",
    }
}

/// Shortest representation that round-trips, capped at 12 significant
/// digits. Rust's float formatting never consults the locale, so the
/// decimal separator is always `.`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - mag);
    let rounded = (x * scale).round() / scale;
    if rounded.is_finite() {
        format!("{rounded}")
    } else {
        format!("{x}")
    }
}

/// One table cell; numbers stay numeric so JSON output keeps them typed.
pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// A rectangular result set with named columns.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Every row, the last included, ends in a newline.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(*x),
                    Cell::Text(s) => s.to_string(),
                })
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Array of one object per row, keyed by column name.
    pub fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        let v = match cell {
                            Cell::Num(x) => serde_json::json!(x),
                            Cell::Text(s) => serde_json::json!(s),
                        };
                        (name.to_string(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        writeln!(out, "{}", serde_json::Value::Array(rows))
    }
}

/// Opens `--out` when given, stdout otherwise.
pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}
