//! Dataset persistence: delimited text (CSV) and line-delimited JSON.
//!
//! Both formats serialize coordinates as shortest round-trip decimals, so
//! `load(write(d))` reproduces every value bit-for-bit.
//!
//! CSV layout (header required):
//! `frame_id,[label],[timestamp_s],x0,y0,...,x67,y67` — the optional
//! columns, when present, appear in exactly that order.
//!
//! JSONL: one object per line with `frame_id`, optional `label`, optional
//! `timestamp_s`, and `points` as an array of 68 `[x, y]` pairs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::landmark::{
    Dataset, DatasetError, FrameError, LabeledSample, LandmarkFrame, LANDMARK_COUNT,
};
use crate::scalar::Scalar;

/// On-disk dataset encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Jsonl,
}

impl DataFormat {
    /// Infer the format from a file extension (`.csv` / `.jsonl`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "jsonl" => Some(Self::Jsonl),
            _ => None,
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(format!("unknown format {other:?}: expected csv or jsonl")),
        }
    }
}

/// Column layout of one delimited record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordSchema {
    pub has_label: bool,
    pub has_timestamp: bool,
}

impl RecordSchema {
    pub fn field_count(&self) -> usize {
        1 + usize::from(self.has_label) + usize::from(self.has_timestamp) + 2 * LANDMARK_COUNT
    }

    pub fn csv_header(&self) -> String {
        let mut header = String::from("frame_id");
        if self.has_label {
            header.push_str(",label");
        }
        if self.has_timestamp {
            header.push_str(",timestamp_s");
        }
        for i in 0..LANDMARK_COUNT {
            header.push_str(&format!(",x{i},y{i}"));
        }
        header
    }

    /// Validate a header line and recover the schema it declares.
    pub fn from_csv_header(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        let mut idx = 0;
        if fields.get(idx) != Some(&"frame_id") {
            return Err("header must start with frame_id".into());
        }
        idx += 1;
        let has_label = fields.get(idx) == Some(&"label");
        if has_label {
            idx += 1;
        }
        let has_timestamp = fields.get(idx) == Some(&"timestamp_s");
        if has_timestamp {
            idx += 1;
        }
        let schema = Self {
            has_label,
            has_timestamp,
        };
        if fields.len() != schema.field_count() {
            return Err(format!(
                "header declares {} fields, expected {}",
                fields.len(),
                schema.field_count()
            ));
        }
        for i in 0..LANDMARK_COUNT {
            if fields[idx] != format!("x{i}") || fields[idx + 1] != format!("y{i}") {
                return Err(format!("coordinate columns must be named x{i},y{i}"));
            }
            idx += 2;
        }
        Ok(schema)
    }
}

/// Rejection reasons for a single record.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("expected {expected} fields, found {found}")]
    FieldCountMismatch { expected: usize, found: usize },
    #[error("column {column}: non-numeric field {value:?}")]
    NonNumericField { column: usize, value: String },
    #[error("column {column}: non-finite coordinate")]
    NonFiniteCoordinate { column: usize },
    #[error("invalid label {value:?}: must be 0 or 1")]
    InvalidLabel { value: String },
    #[error("invalid timestamp {value:?}: must be finite and non-negative")]
    InvalidTimestamp { value: String },
    #[error("expected {LANDMARK_COUNT} landmark points, found {found}")]
    PointCount { found: usize },
}

/// What went wrong on a particular input line.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseIssue {
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("bad header: {0}")]
    Header(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("frame_id {found} not greater than previous {prev}")]
    NonMonotonicFrameId { prev: u64, found: u64 },
    #[error("mixed labeled and unlabeled records")]
    MixedLabeling,
}

#[derive(Debug, Error)]
pub enum DataIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {issue}")]
    Parse { line: usize, issue: ParseIssue },
    #[error("dataset is empty")]
    EmptyDataset,
}

impl DataIoError {
    fn at(line: usize, issue: impl Into<ParseIssue>) -> Self {
        Self::Parse {
            line,
            issue: issue.into(),
        }
    }
}

/// Parse one delimited-text line against a declared schema.
///
/// The returned sample carries a label only when the schema includes one.
pub fn parse_frame_record<S: Scalar>(
    record: &str,
    schema: RecordSchema,
) -> Result<LabeledSample<S>, RecordError> {
    let fields: Vec<&str> = record.split(',').collect();
    let expected = schema.field_count();
    if fields.len() != expected {
        return Err(RecordError::FieldCountMismatch {
            expected,
            found: fields.len(),
        });
    }

    // Columns are reported 1-based, matching how people count CSV fields.
    let mut column = 0;
    let mut next = |fields: &Vec<&str>| -> (usize, String) {
        column += 1;
        (column, fields[column - 1].to_string())
    };

    let (col, value) = next(&fields);
    let frame_id: u64 = value.parse().map_err(|_| RecordError::NonNumericField {
        column: col,
        value: value.clone(),
    })?;

    let label: Option<u8> = if schema.has_label {
        let (_, value) = next(&fields);
        let parsed: Option<u8> = value.parse().ok();
        match parsed {
            Some(v @ (0 | 1)) => Some(v),
            _ => return Err(RecordError::InvalidLabel { value }),
        }
    } else {
        None
    };

    let timestamp_s: Option<S> = if schema.has_timestamp {
        let (_, value) = next(&fields);
        if value.is_empty() {
            None
        } else {
            let t: S = value
                .parse()
                .map_err(|_| RecordError::InvalidTimestamp {
                    value: value.clone(),
                })?;
            if !t.is_finite() || t < S::zero() {
                return Err(RecordError::InvalidTimestamp { value });
            }
            Some(t)
        }
    } else {
        None
    };

    let mut points = Vec::with_capacity(LANDMARK_COUNT);
    for _ in 0..LANDMARK_COUNT {
        let (col_x, raw_x) = next(&fields);
        let x: S = raw_x.parse().map_err(|_| RecordError::NonNumericField {
            column: col_x,
            value: raw_x.clone(),
        })?;
        if !x.is_finite() {
            return Err(RecordError::NonFiniteCoordinate { column: col_x });
        }
        let (col_y, raw_y) = next(&fields);
        let y: S = raw_y.parse().map_err(|_| RecordError::NonNumericField {
            column: col_y,
            value: raw_y.clone(),
        })?;
        if !y.is_finite() {
            return Err(RecordError::NonFiniteCoordinate { column: col_y });
        }
        points.push(Point::new(x, y));
    }

    let frame = LandmarkFrame::from_points(frame_id, points, timestamp_s)
        .map_err(frame_to_record_error)?;
    LabeledSample::new(frame, label).map_err(frame_to_record_error)
}

fn frame_to_record_error(err: FrameError) -> RecordError {
    match err {
        FrameError::PointCount { found } => RecordError::PointCount { found },
        // Coordinates were validated field-by-field already; map by index as
        // a fallback.
        FrameError::NonFiniteCoordinate { index } => {
            RecordError::NonFiniteCoordinate { column: index }
        }
        FrameError::InvalidTimestamp => RecordError::InvalidTimestamp {
            value: String::new(),
        },
        FrameError::InvalidLabel { value } => RecordError::InvalidLabel {
            value: value.to_string(),
        },
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRecord<S> {
    frame_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp_s: Option<S>,
    points: Vec<[S; 2]>,
}

fn sample_from_json<S: Scalar>(record: JsonRecord<S>) -> Result<LabeledSample<S>, RecordError> {
    if record.points.len() != LANDMARK_COUNT {
        return Err(RecordError::PointCount {
            found: record.points.len(),
        });
    }
    if let Some(value) = record.label {
        if value > 1 {
            return Err(RecordError::InvalidLabel {
                value: value.to_string(),
            });
        }
    }
    if let Some(t) = record.timestamp_s {
        if !t.is_finite() || t < S::zero() {
            return Err(RecordError::InvalidTimestamp {
                value: format!("{t}"),
            });
        }
    }
    let points: Vec<Point<S>> = record
        .points
        .iter()
        .map(|&[x, y]| Point::new(x, y))
        .collect();
    let frame = LandmarkFrame::from_points(record.frame_id, points, record.timestamp_s)
        .map_err(frame_to_record_error)?;
    LabeledSample::new(frame, record.label).map_err(frame_to_record_error)
}

/// Load a dataset, preserving row order and validating every record.
///
/// Errors carry the 1-based line number of the offending input line.
pub fn load_dataset<S: Scalar>(path: &Path, format: DataFormat) -> Result<Dataset<S>, DataIoError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let samples = match format {
        DataFormat::Csv => load_csv(reader)?,
        DataFormat::Jsonl => load_jsonl(reader)?,
    };
    if samples.is_empty() {
        return Err(DataIoError::EmptyDataset);
    }
    Dataset::new(samples, path.display().to_string()).map_err(|err| match err {
        // Monotonicity and labeling are validated per line above; anything
        // else reaching here is a bug.
        DatasetError::Empty => DataIoError::EmptyDataset,
        other => unreachable!("dataset invariants validated during load: {other}"),
    })
}

fn load_csv<S: Scalar>(reader: impl BufRead) -> Result<Vec<LabeledSample<S>>, DataIoError> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(DataIoError::EmptyDataset),
    };
    let schema = RecordSchema::from_csv_header(&header)
        .map_err(|msg| DataIoError::at(1, ParseIssue::Header(msg)))?;

    let mut samples = Vec::new();
    for (index, line) in lines.enumerate() {
        let line_no = index + 2;
        let line = line?;
        let sample =
            parse_frame_record::<S>(&line, schema).map_err(|e| DataIoError::at(line_no, e))?;
        check_order(&samples, &sample, line_no)?;
        samples.push(sample);
    }
    Ok(samples)
}

fn load_jsonl<S: Scalar>(reader: impl BufRead) -> Result<Vec<LabeledSample<S>>, DataIoError> {
    let mut samples: Vec<LabeledSample<S>> = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let record: JsonRecord<S> = serde_json::from_str(&line)
            .map_err(|e| DataIoError::at(line_no, ParseIssue::Json(e.to_string())))?;
        let sample = sample_from_json(record).map_err(|e| DataIoError::at(line_no, e))?;
        check_order(&samples, &sample, line_no)?;
        if let Some(first) = samples.first() {
            if first.label().is_some() != sample.label().is_some() {
                return Err(DataIoError::at(line_no, ParseIssue::MixedLabeling));
            }
        }
        samples.push(sample);
    }
    Ok(samples)
}

fn check_order<S: Scalar>(
    samples: &[LabeledSample<S>],
    next: &LabeledSample<S>,
    line_no: usize,
) -> Result<(), DataIoError> {
    if let Some(prev) = samples.last() {
        let prev_id = prev.frame().frame_id();
        let found = next.frame().frame_id();
        if found <= prev_id {
            return Err(DataIoError::at(
                line_no,
                ParseIssue::NonMonotonicFrameId {
                    prev: prev_id,
                    found,
                },
            ));
        }
    }
    Ok(())
}

/// Persist a dataset. `load_dataset` on the result reproduces every sample
/// exactly.
pub fn write_dataset<S: Scalar>(
    dataset: &Dataset<S>,
    path: &Path,
    format: DataFormat,
) -> Result<(), DataIoError> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    match format {
        DataFormat::Csv => write_csv(dataset, &mut writer)?,
        DataFormat::Jsonl => write_jsonl(dataset, &mut writer)?,
    }
    writer.flush()?;
    Ok(())
}

fn write_csv<S: Scalar>(dataset: &Dataset<S>, out: &mut impl Write) -> Result<(), DataIoError> {
    let schema = RecordSchema {
        has_label: dataset.is_labeled(),
        has_timestamp: dataset
            .samples()
            .iter()
            .any(|s| s.frame().timestamp_s().is_some()),
    };
    writeln!(out, "{}", schema.csv_header())?;
    for sample in dataset.samples() {
        let mut line = sample.frame().frame_id().to_string();
        if schema.has_label {
            line.push(',');
            line.push_str(&sample.label().expect("labeled dataset").to_string());
        }
        if schema.has_timestamp {
            line.push(',');
            if let Some(t) = sample.frame().timestamp_s() {
                line.push_str(&format!("{t}"));
            }
        }
        for p in sample.frame().points() {
            line.push_str(&format!(",{},{}", p.x, p.y));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn write_jsonl<S: Scalar>(dataset: &Dataset<S>, out: &mut impl Write) -> Result<(), DataIoError> {
    for sample in dataset.samples() {
        let record = JsonRecord {
            frame_id: sample.frame().frame_id(),
            label: sample.label(),
            timestamp_s: sample.frame().timestamp_s(),
            points: sample.frame().points().iter().map(|p| [p.x, p.y]).collect(),
        };
        let line = serde_json::to_string(&record).expect("landmark record serializes");
        writeln!(out, "{line}")?;
    }
    Ok(())
}
