//! Report files: one row per evaluated pair plus an `AVERAGE` summary.
//!
//! Columns follow `image,method,cr,mae,npcr,psnr,rmse,ssim,uaci`. CSV cells
//! carry four fractional digits; infinite PSNR is written `Inf` and a row
//! whose image failed to process carries `NA` in every metric cell. JSON
//! keeps full precision, encodes infinite PSNR as `null` and reports the
//! count of excluded infinite values in the summary.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{average_reports, MetricsReport, ReportAverage};

pub const CSV_HEADER: [&str; 9] = [
    "image", "method", "cr", "mae", "npcr", "psnr", "rmse", "ssim", "uaci",
];
pub const AVERAGE_LABEL: &str = "AVERAGE";
const NOT_AVAILABLE: &str = "NA";
const INFINITE: &str = "Inf";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::arg(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// One evaluated (or failed) image.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub image: String,
    pub method: String,
    pub outcome: std::result::Result<MetricsReport, String>,
}

impl ReportRow {
    pub fn ok(image: impl Into<String>, method: impl Into<String>, report: MetricsReport) -> Self {
        Self {
            image: image.into(),
            method: method.into(),
            outcome: Ok(report),
        }
    }

    pub fn failed(
        image: impl Into<String>,
        method: impl Into<String>,
        error: impl Into<String>,
    ) -> Self {
        Self {
            image: image.into(),
            method: method.into(),
            outcome: Err(error.into()),
        }
    }
}

/// The seven tabulated columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportColumns {
    pub cr: f64,
    pub mae: f64,
    pub npcr: f64,
    pub psnr: f64,
    pub rmse: f64,
    pub ssim: f64,
    pub uaci: f64,
}

impl From<&MetricsReport> for ReportColumns {
    fn from(r: &MetricsReport) -> Self {
        ReportColumns {
            cr: r.cr,
            mae: r.mae,
            npcr: r.npcr_percent,
            psnr: r.psnr_db,
            rmse: r.rmse,
            ssim: r.ssim,
            uaci: r.uaci_percent,
        }
    }
}

impl From<&ReportAverage> for ReportColumns {
    fn from(r: &ReportAverage) -> Self {
        ReportColumns {
            cr: r.cr,
            mae: r.mae,
            npcr: r.npcr_percent,
            psnr: r.psnr_db,
            rmse: r.rmse,
            ssim: r.ssim,
            uaci: r.uaci_percent,
        }
    }
}

impl ReportColumns {
    fn values(&self) -> [f64; 7] {
        [
            self.cr, self.mae, self.npcr, self.psnr, self.rmse, self.ssim, self.uaci,
        ]
    }
}

/// A row as read back from CSV; `columns` is `None` for failed images.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRecord {
    pub image: String,
    pub method: String,
    pub columns: Option<ReportColumns>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvReport {
    pub rows: Vec<CsvRecord>,
    pub average: CsvRecord,
}

fn summary_method(rows: &[ReportRow]) -> String {
    match rows.first() {
        Some(first) if rows.iter().all(|r| r.method == first.method) => first.method.clone(),
        Some(_) => "mixed".to_string(),
        None => String::new(),
    }
}

pub fn summarize(rows: &[ReportRow]) -> Option<ReportAverage> {
    average_reports(rows.iter().filter_map(|r| r.outcome.as_ref().ok()))
}

fn cell(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        return INFINITE.to_string();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn csv_line(image: &str, method: &str, columns: Option<&ReportColumns>) -> Vec<String> {
    let mut line = vec![image.to_string(), method.to_string()];
    match columns {
        Some(c) => line.extend(c.values().into_iter().map(cell)),
        None => line.extend(std::iter::repeat_n(NOT_AVAILABLE.to_string(), 7)),
    }
    line
}

pub fn render_csv(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let cols = row.outcome.as_ref().ok().map(ReportColumns::from);
        w.write_record(csv_line(&row.image, &row.method, cols.as_ref()))?;
    }
    let avg = summarize(rows).map(|a| ReportColumns::from(&a));
    w.write_record(csv_line(AVERAGE_LABEL, &summary_method(rows), avg.as_ref()))?;
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

#[derive(Serialize)]
struct JsonRow<'a> {
    image: &'a str,
    method: &'a str,
    cr: Option<f64>,
    mae: Option<f64>,
    npcr: Option<f64>,
    psnr: Option<f64>,
    rmse: Option<f64>,
    ssim: Option<f64>,
    uaci: Option<f64>,
    mse: Option<f64>,
    degenerate_cr: Option<bool>,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonSummary {
    image: &'static str,
    method: String,
    rows: usize,
    failed: usize,
    cr: Option<f64>,
    mae: Option<f64>,
    npcr: Option<f64>,
    psnr: Option<f64>,
    rmse: Option<f64>,
    ssim: Option<f64>,
    uaci: Option<f64>,
    mse: Option<f64>,
    psnr_infinite_count: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: Vec<JsonRow<'a>>,
    summary: JsonSummary,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn render_json(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let json_rows = rows
        .iter()
        .map(|row| match &row.outcome {
            Ok(r) => JsonRow {
                image: &row.image,
                method: &row.method,
                cr: Some(r.cr),
                mae: Some(r.mae),
                npcr: Some(r.npcr_percent),
                psnr: finite(r.psnr_db),
                rmse: Some(r.rmse),
                ssim: Some(r.ssim),
                uaci: Some(r.uaci_percent),
                mse: Some(r.mse),
                degenerate_cr: Some(r.degenerate_cr),
                error: None,
            },
            Err(e) => JsonRow {
                image: &row.image,
                method: &row.method,
                cr: None,
                mae: None,
                npcr: None,
                psnr: None,
                rmse: None,
                ssim: None,
                uaci: None,
                mse: None,
                degenerate_cr: None,
                error: Some(e),
            },
        })
        .collect();
    let avg = summarize(rows);
    let pick = |f: fn(&ReportAverage) -> f64| avg.as_ref().map(f).and_then(finite);
    let summary = JsonSummary {
        image: AVERAGE_LABEL,
        method: summary_method(rows),
        rows: rows.len(),
        failed: rows.iter().filter(|r| r.outcome.is_err()).count(),
        cr: pick(|a| a.cr),
        mae: pick(|a| a.mae),
        npcr: pick(|a| a.npcr_percent),
        psnr: pick(|a| a.psnr_db),
        rmse: pick(|a| a.rmse),
        ssim: pick(|a| a.ssim),
        uaci: pick(|a| a.uaci_percent),
        mse: pick(|a| a.mse),
        psnr_infinite_count: avg.map_or(0, |a| a.psnr_infinite_count),
    };
    let mut out = serde_json::to_vec_pretty(&JsonReport {
        rows: json_rows,
        summary,
    })?;
    out.push(b'\n');
    Ok(out)
}

pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => render_csv(rows),
        ReportFormat::Json => render_json(rows),
    }
}

pub fn write_report(
    rows: &[ReportRow],
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    fs::write(path, render_report(rows, format)?)?;
    Ok(())
}

fn parse_cell(s: &str, line: u64) -> Result<f64> {
    if s == INFINITE {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>()
        .map_err(|_| Error::format(line, format!("bad numeric cell {s:?}")))
}

/// Parses CSV report text. Format error offsets are 1-based line numbers.
pub fn parse_csv(data: &[u8]) -> Result<CsvReport> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(data);
    if reader.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::format(1, "unexpected report header"));
    }
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::format(line, "wrong number of cells"));
        }
        let columns = if rec.iter().skip(2).all(|c| c == NOT_AVAILABLE) {
            None
        } else {
            let v = rec
                .iter()
                .skip(2)
                .map(|c| parse_cell(c, line))
                .collect::<Result<Vec<f64>>>()?;
            Some(ReportColumns {
                cr: v[0],
                mae: v[1],
                npcr: v[2],
                psnr: v[3],
                rmse: v[4],
                ssim: v[5],
                uaci: v[6],
            })
        };
        records.push(CsvRecord {
            image: rec[0].to_string(),
            method: rec[1].to_string(),
            columns,
        });
    }
    match records.pop() {
        Some(average) if average.image == AVERAGE_LABEL => Ok(CsvReport {
            rows: records,
            average,
        }),
        _ => Err(Error::format(
            records.len() as u64 + 2,
            "report does not end with an AVERAGE row",
        )),
    }
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<CsvReport> {
    parse_csv(&fs::read(path)?)
}
