//! Report rendering: JSON and aligned plain-text tables, values in percent.

use serde_json::{json, Value};

use super::calibration::CalibrationEvalReport;
use super::mot::TrackingEvalReport;

fn gamma_label(g: f64) -> String {
    if g.fract() == 0.0 {
        format!("{}", g as i64)
    } else {
        format!("{g}")
    }
}

pub fn calibration_json(report: &CalibrationEvalReport) -> Value {
    let jac: serde_json::Map<String, Value> = report
        .jac
        .iter()
        .map(|(g, j)| (gamma_label(*g), json!(j * 100.0)))
        .collect();
    json!({
        "jac": jac,
        "cr": report.cr * 100.0,
        "fs": report.fs,
    })
}

pub fn calibration_table(report: &CalibrationEvalReport) -> String {
    let mut header: Vec<String> = report
        .jac
        .iter()
        .map(|(g, _)| format!("JaC@{}", gamma_label(*g)))
        .collect();
    header.push("CR".into());
    header.push("FS".into());
    let mut row: Vec<String> = report
        .jac
        .iter()
        .map(|(_, j)| format!("{:.1}", j * 100.0))
        .collect();
    row.push(format!("{:.1}", report.cr * 100.0));
    row.push(match report.fs {
        Some(fs) => format!("{fs:.1}"),
        None => "-".into(),
    });
    aligned_table(&header, &row)
}

pub fn tracking_json(report: &TrackingEvalReport) -> Value {
    json!({
        "hota": report.hota * 100.0,
        "deta": report.det_a * 100.0,
        "assa": report.ass_a * 100.0,
        "mota": report.mota * 100.0,
        "idf1": report.idf1 * 100.0,
    })
}

pub fn tracking_table(report: &TrackingEvalReport) -> String {
    let header = ["HOTA", "DetA", "AssA", "MOTA", "IDF1"].map(String::from);
    let row = [
        report.hota,
        report.det_a,
        report.ass_a,
        report.mota,
        report.idf1,
    ]
    .map(|v| format!("{:.1}", v * 100.0));
    aligned_table(&header, &row)
}

fn aligned_table(header: &[String], row: &[String]) -> String {
    let widths: Vec<usize> = header
        .iter()
        .zip(row)
        .map(|(h, r)| h.len().max(r.len()) + 2)
        .collect();
    let mut out = String::new();
    for (h, w) in header.iter().zip(&widths) {
        out.push_str(&format!("{h:>w$}", w = w));
    }
    out.push('\n');
    for (r, w) in row.iter().zip(&widths) {
        out.push_str(&format!("{r:>w$}", w = w));
    }
    out.push('\n');
    out
}
