//! Reading raw events from CSV and XES sources.
//!
//! Both readers return every event they could parse together with a list of
//! per-record problems; a bad row never aborts the whole file.

mod csv;
mod xes;

use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};
use crate::event_log::RawEvent;

pub use self::csv::{ingest_csv, CsvMapping};
pub use self::xes::ingest_xes;

/// A problem with a single CSV row or XES event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// Data-row number (CSV) or event number (XES), zero-based.
    pub index: usize,
    pub message: String,
}

/// Events read from a source plus the records that were rejected.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub events: Vec<RawEvent>,
    pub errors: Vec<RecordError>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum TimestampFormat {
    /// RFC 3339 / ISO-8601, with or without offset; naive values are UTC.
    #[default]
    Iso8601,
    /// A chrono `strftime` pattern.
    Custom(String),
}

impl TimestampFormat {
    pub fn parse(&self, raw: &str) -> Option<DateTime<Utc>> {
        let raw = raw.trim();
        match self {
            TimestampFormat::Iso8601 => parse_iso8601(raw),
            TimestampFormat::Custom(fmt) => parse_with(raw, fmt),
        }
    }
}

const ISO_WITH_OFFSET: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f%:z",
    "%Y-%m-%d %H:%M:%S%.f%:z",
    "%Y-%m-%dT%H:%M:%S%.f%#z",
    "%Y-%m-%d %H:%M:%S%.f%#z",
];

const ISO_NAIVE: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_iso8601(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ISO_WITH_OFFSET {
        if let Ok(t) = DateTime::parse_from_str(raw, fmt) {
            return Some(t.with_timezone(&Utc));
        }
    }
    let trimmed = raw.strip_suffix('Z').unwrap_or(raw);
    for fmt in ISO_NAIVE {
        if let Ok(t) = NaiveDateTime::parse_from_str(trimmed, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

fn parse_with(raw: &str, fmt: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_str(raw, fmt) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
        return Some(t.and_utc());
    }
    NaiveDate::parse_from_str(raw, fmt)
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Xes,
}

impl InputFormat {
    /// Guesses from the file name (`.csv`, `.xes`, optionally `.gz`).
    pub fn from_path(path: &Path) -> Option<Self> {
        let name = path.file_name()?.to_str()?.to_ascii_lowercase();
        let name = name.strip_suffix(".gz").unwrap_or(&name);
        if name.ends_with(".csv") {
            Some(InputFormat::Csv)
        } else if name.ends_with(".xes") {
            Some(InputFormat::Xes)
        } else {
            None
        }
    }
}

/// Reads a CSV or XES file, transparently decompressing gzip input.
pub fn read_file(
    path: &Path,
    format: InputFormat,
    mapping: &CsvMapping,
    timestamps: &TimestampFormat,
) -> Result<Ingested> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    ingest_bytes(&bytes, format, mapping, timestamps)
}

/// Parses in-memory file contents; gzip is detected by its magic number.
pub fn ingest_bytes(
    bytes: &[u8],
    format: InputFormat,
    mapping: &CsvMapping,
    timestamps: &TimestampFormat,
) -> Result<Ingested> {
    let reader: Box<dyn BufRead + '_> = if bytes.starts_with(&[0x1f, 0x8b]) {
        Box::new(BufReader::new(MultiGzDecoder::new(bytes)))
    } else {
        Box::new(bytes)
    };
    match format {
        InputFormat::Csv => ingest_csv(reader, mapping, timestamps),
        InputFormat::Xes => ingest_xes(reader),
    }
}
