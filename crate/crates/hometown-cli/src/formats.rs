//! On-disk data formats: the photos CSV, the homes CSV, and Flickr-shaped
//! JSON (plain array or `{"photos":{"photo":[...]}}` envelope).
//!
//! Parsers run in strict mode (abort on the first bad row) or lenient mode
//! (skip bad rows and report them). Serializers emit byte-stable output:
//! floats print in Rust's shortest round-trip form and timestamps as
//! RFC-3339 UTC.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use hometown_core::photo::{PhotoRecord, PhotoTimestamp};
use hometown_core::GeoPoint;
use serde_json::Value;
use thiserror::Error;

pub const PHOTOS_HEADER: [&str; 5] = ["photo_id", "owner_id", "lat", "lon", "taken_at"];
pub const HOMES_HEADER: [&str; 3] = ["owner_id", "lat", "lon"];

/// How parsers treat malformed rows or entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Abort on the first malformed row.
    Strict,
    /// Skip malformed rows, reporting each with its location and reason.
    #[default]
    Lenient,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad header: expected `{expected}`, found `{found}`")]
    MalformedHeader { expected: String, found: String },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("not a photo document: {0}")]
    MalformedDocument(String),
    #[error("entry {index}: {reason}")]
    MalformedEntry { index: usize, reason: String },
    #[error("line {line}: duplicate owner_id `{owner_id}`")]
    DuplicateOwner { owner_id: String, line: u64 },
}

/// Parsed records plus the rows a lenient pass skipped, as
/// (line or entry index, reason) pairs in input order.
#[derive(Debug, Clone, Default)]
pub struct ParsedPhotos {
    pub records: Vec<PhotoRecord>,
    pub rejected: Vec<(u64, String)>,
}

fn parse_coordinate(lat_text: &str, lon_text: &str) -> Result<GeoPoint, String> {
    let lat: f64 = lat_text
        .trim()
        .parse()
        .map_err(|_| String::from("latitude not a number"))?;
    let lon: f64 = lon_text
        .trim()
        .parse()
        .map_err(|_| String::from("longitude not a number"))?;
    GeoPoint::new(lat, lon).map_err(|e| e.to_string())
}

fn parse_rfc3339(text: &str) -> Result<Option<PhotoTimestamp>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let parsed =
        DateTime::parse_from_rfc3339(text).map_err(|_| String::from("bad timestamp"))?;
    Ok(Some(PhotoTimestamp {
        epoch_seconds: parsed.with_timezone(&Utc).timestamp(),
        tz_unknown: false,
    }))
}

/// Flickr's `datetaken` carries no timezone; it is stored as if UTC and
/// flagged.
fn parse_datetaken(text: &str) -> Result<Option<PhotoTimestamp>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    let parsed = NaiveDateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S")
        .map_err(|_| String::from("bad datetaken"))?;
    Ok(Some(PhotoTimestamp {
        epoch_seconds: parsed.and_utc().timestamp(),
        tz_unknown: true,
    }))
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), FormatError> {
    if found.iter().map(str::trim).eq(expected.iter().copied()) {
        return Ok(());
    }
    Err(FormatError::MalformedHeader {
        expected: expected.join(","),
        found: found.iter().collect::<Vec<_>>().join(","),
    })
}

/// Parses the photos CSV (`photo_id,owner_id,lat,lon,taken_at`).
/// `taken_at` may be empty, otherwise RFC-3339.
pub fn parse_photos_csv(bytes: &[u8], mode: ParseMode) -> Result<ParsedPhotos, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
    check_header(header, &PHOTOS_HEADER)?;

    let mut out = ParsedPhotos::default();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, csv::Position::line);
                return Err(FormatError::MalformedRow {
                    line,
                    reason: String::from("unreadable row"),
                });
            }
        };
        let line = row.position().map_or(0, csv::Position::line);
        match photo_from_row(&row) {
            Ok(record) => out.records.push(record),
            Err(reason) => match mode {
                ParseMode::Strict => return Err(FormatError::MalformedRow { line, reason }),
                ParseMode::Lenient => out.rejected.push((line, reason)),
            },
        }
    }
    Ok(out)
}

fn photo_from_row(row: &csv::StringRecord) -> Result<PhotoRecord, String> {
    if row.len() != PHOTOS_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            PHOTOS_HEADER.len(),
            row.len()
        ));
    }
    let photo_id = row[0].trim();
    let owner_id = row[1].trim();
    if photo_id.is_empty() {
        return Err(String::from("empty photo_id"));
    }
    if owner_id.is_empty() {
        return Err(String::from("empty owner_id"));
    }
    let location = parse_coordinate(&row[2], &row[3])?;
    let taken_at = parse_rfc3339(&row[4])?;
    Ok(PhotoRecord {
        photo_id: photo_id.to_string(),
        owner_id: owner_id.to_string(),
        location,
        taken_at,
    })
}

/// Parses Flickr-shaped JSON: a top-level array of photo objects, or the
/// API's `{"photos":{"photo":[...]}}` envelope. `latitude`/`longitude` and
/// `id`/`owner` may be strings or numbers, as the upstream API has emitted
/// both over time.
pub fn parse_flickr_json(bytes: &[u8], mode: ParseMode) -> Result<ParsedPhotos, FormatError> {
    let root: Value = serde_json::from_slice(bytes)
        .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
    let entries = match &root {
        Value::Array(entries) => entries.as_slice(),
        Value::Object(_) => root
            .pointer("/photos/photo")
            .and_then(Value::as_array)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                FormatError::MalformedDocument(String::from(
                    "expected an array or a photos.photo envelope",
                ))
            })?,
        _ => {
            return Err(FormatError::MalformedDocument(String::from(
                "expected an array or a photos.photo envelope",
            )))
        }
    };

    let mut out = ParsedPhotos::default();
    for (index, entry) in entries.iter().enumerate() {
        match photo_from_json(entry) {
            Ok(record) => out.records.push(record),
            Err(reason) => match mode {
                ParseMode::Strict => return Err(FormatError::MalformedEntry { index, reason }),
                ParseMode::Lenient => out.rejected.push((index as u64, reason)),
            },
        }
    }
    Ok(out)
}

fn string_or_number(entry: &Value, key: &str) -> Result<String, String> {
    match entry.get(key) {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.trim().to_string()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(_) => Err(format!("bad {key}")),
        None => Err(format!("missing {key}")),
    }
}

fn coordinate_field(entry: &Value, key: &str) -> Result<String, String> {
    match entry.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(_) => Err(format!("bad {key}")),
        None => Err(format!("missing {key}")),
    }
}

fn photo_from_json(entry: &Value) -> Result<PhotoRecord, String> {
    if !entry.is_object() {
        return Err(String::from("entry is not an object"));
    }
    let photo_id = string_or_number(entry, "id")?;
    let owner_id = string_or_number(entry, "owner")?;
    let lat_text = coordinate_field(entry, "latitude")?;
    let lon_text = coordinate_field(entry, "longitude")?;
    let location = parse_coordinate(&lat_text, &lon_text)?;
    let taken_at = match entry.get("datetaken") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => parse_datetaken(s)?,
        Some(_) => return Err(String::from("bad datetaken")),
    };
    Ok(PhotoRecord {
        photo_id,
        owner_id,
        location,
        taken_at,
    })
}

/// Parses the homes CSV (`owner_id,lat,lon`). Always strict: a home is
/// ground truth, and a silently dropped or duplicated owner would corrupt
/// every downstream error measurement.
pub fn parse_homes_csv(bytes: &[u8]) -> Result<BTreeMap<String, GeoPoint>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
    check_header(header, &HOMES_HEADER)?;

    let mut homes = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| FormatError::MalformedRow {
            line: e.position().map_or(0, csv::Position::line),
            reason: String::from("unreadable row"),
        })?;
        let line = row.position().map_or(0, csv::Position::line);
        let fail = |reason: String| FormatError::MalformedRow { line, reason };
        if row.len() != HOMES_HEADER.len() {
            return Err(fail(format!(
                "expected {} fields, found {}",
                HOMES_HEADER.len(),
                row.len()
            )));
        }
        let owner_id = row[0].trim();
        if owner_id.is_empty() {
            return Err(fail(String::from("empty owner_id")));
        }
        let location = parse_coordinate(&row[1], &row[2]).map_err(fail)?;
        if homes.insert(owner_id.to_string(), location).is_some() {
            return Err(FormatError::DuplicateOwner {
                owner_id: owner_id.to_string(),
                line,
            });
        }
    }
    Ok(homes)
}

fn format_timestamp(ts: PhotoTimestamp) -> String {
    DateTime::<Utc>::from_timestamp(ts.epoch_seconds, 0)
        .expect("epoch seconds in chrono's representable range")
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory writer cannot fail"))
        .expect("writer output is UTF-8")
}

/// Serializes photos back to the CSV format `parse_photos_csv` reads.
/// Coordinates print in shortest round-trip form, so parse(write(x))
/// reproduces every f64 exactly.
pub fn write_photos_csv(records: &[PhotoRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(PHOTOS_HEADER)
        .expect("in-memory writer cannot fail");
    for record in records {
        let taken = record.taken_at.map(format_timestamp).unwrap_or_default();
        writer
            .write_record([
                record.photo_id.as_str(),
                record.owner_id.as_str(),
                &record.location.lat_deg().to_string(),
                &record.location.lon_deg().to_string(),
                &taken,
            ])
            .expect("in-memory writer cannot fail");
    }
    finish_csv(writer)
}

/// Serializes a homes map to the CSV format `parse_homes_csv` reads,
/// ordered by owner_id.
pub fn write_homes_csv(homes: &BTreeMap<String, GeoPoint>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(HOMES_HEADER)
        .expect("in-memory writer cannot fail");
    for (owner_id, home) in homes {
        writer
            .write_record([
                owner_id.as_str(),
                &home.lat_deg().to_string(),
                &home.lon_deg().to_string(),
            ])
            .expect("in-memory writer cannot fail");
    }
    finish_csv(writer)
}
