//! Record files: CSV with one column per field, or JSON lines of
//! `{"id": .., "fields": {field: value}}` where a value is a string, null,
//! or a full field object.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EtdRecord, FieldKey, FieldValue};

/// A row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

pub fn read_csv(reader: impl Read) -> Result<(Vec<EtdRecord>, Vec<RowError>)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut id_col = None;
    let mut cols: Vec<(usize, FieldKey)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if h.trim().eq_ignore_ascii_case("id") {
            id_col = Some(i);
        } else if let Ok(k) = h.parse::<FieldKey>() {
            cols.push((i, k));
        } else {
            log::warn!("ignoring unknown column {h:?}");
        }
    }
    let id_col = id_col.ok_or_else(|| Error::Config("CSV header lacks an id column".into()))?;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line() as usize);
        let id = row.get(id_col).unwrap_or_default();
        let mut rec = match EtdRecord::new(id) {
            Ok(r) => r,
            Err(_) => {
                errors.push(RowError {
                    line,
                    message: "missing id".into(),
                });
                continue;
            }
        };
        for (i, k) in &cols {
            match row.get(*i) {
                Some(v) if !v.is_empty() => rec.set(*k, FieldValue::original(v)),
                _ => {}
            }
        }
        records.push(rec);
    }
    Ok((records, errors))
}

pub fn write_csv(w: impl Write, records: &[EtdRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id"];
    header.extend(FieldKey::ALL.iter().map(|k| k.as_str()));
    wtr.write_record(&header)?;
    for r in records {
        let mut row = vec![r.id.as_str()];
        row.extend(FieldKey::ALL.iter().map(|k| r.raw(*k).unwrap_or("")));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Text(String),
    Full(FieldValue),
    Null(()),
}

#[derive(Deserialize)]
struct JsonRecordIn {
    id: String,
    #[serde(default)]
    fields: BTreeMap<String, JsonValue>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    id: &'a str,
    fields: BTreeMap<FieldKey, FieldValue>,
}

pub fn read_jsonl(reader: impl BufRead) -> Result<(Vec<EtdRecord>, Vec<RowError>)> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<jsonl input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |message: String| RowError { line: n + 1, message };
        let parsed: JsonRecordIn = match serde_json::from_str(&line) {
            Ok(p) => p,
            Err(e) => {
                errors.push(fail(e.to_string()));
                continue;
            }
        };
        let mut rec = match EtdRecord::new(parsed.id) {
            Ok(r) => r,
            Err(_) => {
                errors.push(fail("missing id".into()));
                continue;
            }
        };
        let mut bad = None;
        for (k, v) in parsed.fields {
            let Ok(key) = k.parse::<FieldKey>() else {
                bad = Some(format!("unknown field {k:?}"));
                break;
            };
            match v {
                JsonValue::Text(s) => rec.set(key, FieldValue::original(s)),
                JsonValue::Full(fv) => rec.set(key, fv),
                JsonValue::Null(()) => {}
            }
        }
        match bad {
            Some(m) => errors.push(fail(m)),
            None => records.push(rec),
        }
    }
    Ok((records, errors))
}

pub fn write_jsonl(mut w: impl Write, records: &[EtdRecord]) -> Result<()> {
    for r in records {
        let out = JsonRecordOut {
            id: &r.id,
            fields: r.field_map(),
        };
        serde_json::to_writer(&mut w, &out)?;
        w.write_all(b"\n").map_err(|e| Error::io("<jsonl output>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DateParts, Provenance};

    #[test]
    fn csv_round_trip_and_row_errors() {
        let text = "id,title,dc.date.issued,extra\nr1,A Title,2015,x\n,No Id,2016,y\nr2,,N/A,z\nr3,short\n";
        let (recs, errs) = read_csv(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].raw(FieldKey::Year), Some("2015"));
        assert_eq!(recs[1].raw(FieldKey::Title), None);
        assert_eq!(recs[1].raw(FieldKey::Year), Some("N/A"));
        assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), [3, 5]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &recs).unwrap();
        let (again, errs) = read_csv(buf.as_slice()).unwrap();
        assert!(errs.is_empty());
        assert_eq!(again, recs);
    }

    #[test]
    fn csv_header_only_and_no_id() {
        let (recs, errs) = read_csv("id,title\n".as_bytes()).unwrap();
        assert!(recs.is_empty() && errs.is_empty());
        assert!(read_csv("title\nx\n".as_bytes()).is_err());
    }

    #[test]
    fn jsonl_accepts_strings_nulls_and_full_values() {
        let text = concat!(
            r#"{"id":"a","fields":{"title":"T","author":null,"year":{"raw":"2015-05-17","provenance":"canonicalized","parts":{"year":2015,"month":5,"day":17}}}}"#,
            "\n\n",
            r#"{"id":"","fields":{}}"#,
            "\n",
            r#"{"id":"b","fields":{"color":"red"}}"#,
            "\n"
        );
        let (recs, errs) = read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(errs.len(), 2);
        let y = recs[0].get(FieldKey::Year);
        assert_eq!(y.provenance, Provenance::Canonicalized);
        assert_eq!(y.parts, Some(DateParts::ymd(2015, 5, 17)));
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &recs).unwrap();
        assert_eq!(read_jsonl(buf.as_slice()).unwrap().0, recs);
    }
}
