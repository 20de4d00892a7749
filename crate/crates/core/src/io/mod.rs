//! Persistence: PGM/PPM images, key files and report files.

pub mod key;
pub mod pnm;
pub mod report;

pub use key::{decode_key, encode_key, key_fingerprint, read_key, stable_hash, write_key};
pub use pnm::{decode_pnm, encode_pnm, read_image, write_image};
pub use report::{
    parse_csv, read_report_csv, render_report, write_report, CsvRecord, CsvReport, ReportColumns,
    ReportFormat, ReportRow,
};
