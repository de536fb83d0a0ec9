use std::io::Read;

use crate::error::{Error, Result};
use crate::event_log::RawEvent;

use super::{Ingested, RecordError, TimestampFormat};

/// Which CSV columns hold the case id, activity and timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvMapping {
    pub case: String,
    pub activity: String,
    pub timestamp: String,
}

impl Default for CsvMapping {
    /// The column names used by the common XES-to-CSV exporters.
    fn default() -> Self {
        CsvMapping {
            case: "case:concept:name".into(),
            activity: "concept:name".into(),
            timestamp: "time:timestamp".into(),
        }
    }
}

impl CsvMapping {
    pub fn new(case: &str, activity: &str, timestamp: &str) -> Self {
        CsvMapping {
            case: case.into(),
            activity: activity.into(),
            timestamp: timestamp.into(),
        }
    }
}

/// Reads RFC 4180 CSV with a header row. One [`RawEvent`] per valid data
/// row, `source_index` being the zero-based data-row number.
pub fn ingest_csv<R: Read>(
    reader: R,
    mapping: &CsvMapping,
    timestamps: &TimestampFormat,
) -> Result<Ingested> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("cannot read CSV header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::Input("empty CSV file".into()));
    }
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("CSV column '{name}' not found")))
    };
    let case_col = column(&mapping.case)?;
    let activity_col = column(&mapping.activity)?;
    let time_col = column(&mapping.timestamp)?;

    let mut out = Ingested::default();
    let mut rows = 0usize;
    for (index, record) in rdr.records().enumerate() {
        rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.errors.push(RecordError {
                    index,
                    message: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let field = |col: usize| record.get(col).map(str::trim).unwrap_or("");
        let (case_id, activity, raw_time) = (field(case_col), field(activity_col), field(time_col));

        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let problem = if case_id.is_empty() {
            Some(format!("line {line}: empty case id"))
        } else if activity.is_empty() {
            Some(format!("line {line}: empty activity"))
        } else {
            None
        };
        if let Some(message) = problem {
            out.errors.push(RecordError { index, message });
            continue;
        }
        match timestamps.parse(raw_time) {
            Some(timestamp) => out.events.push(RawEvent {
                case_id: case_id.to_owned(),
                activity: activity.to_owned(),
                timestamp,
                source_index: index,
            }),
            None => out.errors.push(RecordError {
                index,
                message: format!("line {line}: unparsable timestamp '{raw_time}'"),
            }),
        }
    }
    if rows == 0 {
        return Err(Error::Input("CSV file has no data rows".into()));
    }
    Ok(out)
}
