//! Rendering of calibration tables and comparison reports.
//!
//! CSV uses "," as delimiter, "." as decimal point, newline-terminated
//! rows, and empty fields for absent values. JSON mirrors the CSV
//! columns; a calibration table is a single object with a `rows` array.
//! A comparison report stacks three sections — summary, unfiltered
//! table, filtered table — separated by blank lines in CSV, or keyed by
//! name in JSON.

use earlybias::{Error, Result, TableRow};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CurveDocument {
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub collection_time: f64,
    pub n_unfiltered: usize,
    pub n_filtered: usize,
    pub excluded_count: usize,
    pub raw_frequency_difference: f64,
    pub residual_shift: f64,
    /// Empty when nothing was excluded: the test is undefined.
    pub p_value: Option<f64>,
    pub n_resamples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub summary: CompareSummary,
    pub unfiltered: CurveDocument,
    pub filtered: CurveDocument,
}

fn rows_to_csv(rows: &[TableRow]) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("reports are serializable");
    text.push('\n');
    text.into_bytes()
}

pub fn render_curve_csv(rows: &[TableRow]) -> Result<Vec<u8>> {
    rows_to_csv(rows)
}

pub fn render_curve_json(rows: &[TableRow]) -> Vec<u8> {
    to_json(&CurveDocument {
        rows: rows.to_vec(),
    })
}

pub fn render_compare_csv(report: &CompareReport) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.serialize(&report.summary)?;
    let mut out = wtr
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    out.push(b'\n');
    out.extend(rows_to_csv(&report.unfiltered.rows)?);
    out.push(b'\n');
    out.extend(rows_to_csv(&report.filtered.rows)?);
    Ok(out)
}

pub fn render_compare_json(report: &CompareReport) -> Vec<u8> {
    to_json(report)
}
