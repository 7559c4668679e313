//! Evaluation reports: per-class summary rows and accuracy-threshold
//! curves, as CSV, plus an aligned text rendering for terminals.
//!
//! Numbers are written with a fixed six-decimal format so that re-emitting
//! a parsed report reproduces it byte for byte — report files participate
//! in the end-to-end determinism guarantee.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::AccuracyCurve;

/// Pinned column layout of the summary CSV.
pub const SUMMARY_HEADER: [&str; 7] = [
    "class",
    "n_frames",
    "mean_iou_unocc",
    "mean_iou_occ",
    "mean_angle_deg",
    "mean_trans_cm",
    "adds_auc",
];

/// Pinned column layout of the curve CSV.
pub const CURVE_HEADER: [&str; 3] = ["class", "threshold_m", "accuracy"];

/// One per-class (or aggregate) row of the evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub class_id: String,
    pub n_frames: usize,
    pub mean_iou_unocc: f64,
    pub mean_iou_occ: f64,
    pub mean_angle_deg: f64,
    pub mean_trans_cm: f64,
    pub adds_auc: f64,
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Write summary rows as CSV (RFC-4180, six-decimal floats).
pub fn write_summary_to<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SUMMARY_HEADER)?;
    for row in rows {
        wtr.write_record([
            row.class_id.as_str(),
            &row.n_frames.to_string(),
            &fmt(row.mean_iou_unocc),
            &fmt(row.mean_iou_occ),
            &fmt(row.mean_angle_deg),
            &fmt(row.mean_trans_cm),
            &fmt(row.adds_auc),
        ])?;
    }
    wtr.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
    write_summary_to(file, rows)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record.get(idx).ok_or_else(|| {
        Error::Schema(format!("row has {} fields, expected 7", record.len()))
    })?;
    raw.parse().map_err(|e| {
        Error::Schema(format!("column '{}': bad value '{raw}': {e}", SUMMARY_HEADER[idx]))
    })
}

/// Parse a summary CSV, validating the header exactly.
pub fn read_summary_from<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SUMMARY_HEADER) {
        return Err(Error::Schema(format!(
            "unexpected summary header: {:?}, expected {:?}",
            header.iter().collect::<Vec<_>>(),
            SUMMARY_HEADER
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != SUMMARY_HEADER.len() {
            return Err(Error::Schema(format!(
                "row has {} fields, expected {}",
                record.len(),
                SUMMARY_HEADER.len()
            )));
        }
        rows.push(SummaryRow {
            class_id: record.get(0).unwrap().to_string(),
            n_frames: parse_field(&record, 1)?,
            mean_iou_unocc: parse_field(&record, 2)?,
            mean_iou_occ: parse_field(&record, 3)?,
            mean_angle_deg: parse_field(&record, 4)?,
            mean_trans_cm: parse_field(&record, 5)?,
            adds_auc: parse_field(&record, 6)?,
        });
    }
    Ok(rows)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let file = File::open(path).map_err(|e| Error::io_at(path, e))?;
    read_summary_from(file)
}

/// Write per-class accuracy curves as long-format CSV
/// (`class,threshold_m,accuracy`); classes appear in map order, points in
/// threshold order.
pub fn write_curves_to<W: Write>(w: W, curves: &BTreeMap<String, AccuracyCurve>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CURVE_HEADER)?;
    for (class, curve) in curves {
        for (tau, acc) in curve.thresholds.iter().zip(&curve.accuracy) {
            wtr.write_record([class.as_str(), &fmt(*tau), &fmt(*acc)])?;
        }
    }
    wtr.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn write_curves_csv(path: &Path, curves: &BTreeMap<String, AccuracyCurve>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
    write_curves_to(file, curves)
}

/// One long-format accuracy-curve row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub class_id: String,
    pub threshold_m: f64,
    pub accuracy: f64,
}

/// Parse a curve CSV back into its rows, validating the header exactly and
/// preserving row order.
pub fn read_curve_points_from<R: Read>(r: R) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CURVE_HEADER) {
        return Err(Error::Schema(format!(
            "unexpected curve header: {:?}, expected {:?}",
            header.iter().collect::<Vec<_>>(),
            CURVE_HEADER
        )));
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != CURVE_HEADER.len() {
            return Err(Error::Schema(format!(
                "row has {} fields, expected {}",
                record.len(),
                CURVE_HEADER.len()
            )));
        }
        let field = |idx: usize| -> Result<f64> {
            let raw = record.get(idx).unwrap();
            raw.parse().map_err(|e| {
                Error::Schema(format!("column '{}': bad value '{raw}': {e}", CURVE_HEADER[idx]))
            })
        };
        points.push(CurvePoint {
            class_id: record.get(0).unwrap().to_string(),
            threshold_m: field(1)?,
            accuracy: field(2)?,
        });
    }
    Ok(points)
}

pub fn read_curve_points_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let file = File::open(path).map_err(|e| Error::io_at(path, e))?;
    read_curve_points_from(file)
}

/// Re-emit parsed curve rows. Writing what [`read_curve_points_from`] read
/// reproduces the file byte for byte.
pub fn write_curve_points_to<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CURVE_HEADER)?;
    for p in points {
        wtr.write_record([p.class_id.as_str(), &fmt(p.threshold_m), &fmt(p.accuracy)])?;
    }
    wtr.flush().map_err(Error::Io)?;
    Ok(())
}

pub fn write_curve_points_csv(path: &Path, points: &[CurvePoint]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
    write_curve_points_to(file, points)
}

/// Render summary rows as an aligned, human-readable table.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let titles = [
        "class",
        "frames",
        "iou_unocc",
        "iou_occ",
        "angle_deg",
        "trans_cm",
        "adds_auc",
    ];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.class_id.clone(),
                r.n_frames.to_string(),
                format!("{:.4}", r.mean_iou_unocc),
                format!("{:.4}", r.mean_iou_occ),
                format!("{:.4}", r.mean_angle_deg),
                format!("{:.4}", r.mean_trans_cm),
                format!("{:.4}", r.adds_auc),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = titles.iter().map(|t| t.len()).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut push_row = |fields: &[String]| {
        for (i, (field, width)) in fields.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                // Left-align the class column, right-align numbers.
                out.push_str(field);
                out.push_str(&" ".repeat(width - field.len()));
            } else {
                out.push_str(&" ".repeat(width - field.len()));
                out.push_str(field);
            }
        }
        out.push('\n');
    };
    push_row(&titles.map(String::from));
    for row in &cells {
        push_row(row.as_slice());
    }
    out
}
