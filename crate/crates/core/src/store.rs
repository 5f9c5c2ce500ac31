//! Append-only journal of full-record snapshots.
//!
//! Each line is one version:
//! `{"record_id", "version", "timestamp", "snapshot": {field: value}, "change_summary": [..]}`.
//! Rollback appends the restored snapshot as a new version.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::ecc::{ActionKind, ActionSource, CorrectionAction};
use crate::error::{Error, Result};
use crate::model::{EtdRecord, FieldKey, FieldValue};

pub trait Clock: Send {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordVersion {
    pub record_id: String,
    pub version: u32,
    pub timestamp: DateTime<Utc>,
    pub snapshot: EtdRecord,
    pub change_summary: Vec<CorrectionAction>,
}

#[derive(Serialize, Deserialize)]
struct JournalLine {
    record_id: String,
    version: u32,
    timestamp: String,
    snapshot: BTreeMap<FieldKey, FieldValue>,
    change_summary: Vec<CorrectionAction>,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Micros, true)
}

impl RecordVersion {
    pub fn to_json_line(&self) -> Result<String> {
        let line = JournalLine {
            record_id: self.record_id.clone(),
            version: self.version,
            timestamp: format_timestamp(&self.timestamp),
            snapshot: self.snapshot.field_map(),
            change_summary: self.change_summary.clone(),
        };
        Ok(serde_json::to_string(&line)?)
    }

    fn from_json_line(text: &str) -> std::result::Result<Self, String> {
        let line: JournalLine = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let timestamp = DateTime::parse_from_rfc3339(&line.timestamp)
            .map_err(|e| format!("bad timestamp {:?}: {e}", line.timestamp))?
            .with_timezone(&Utc);
        if line.version == 0 {
            return Err("version 0".into());
        }
        let snapshot = EtdRecord::from_field_map(line.record_id.clone(), line.snapshot).map_err(|e| e.to_string())?;
        Ok(RecordVersion {
            record_id: line.record_id,
            version: line.version,
            timestamp,
            snapshot,
            change_summary: line.change_summary,
        })
    }
}

/// A field whose raw value differs between two versions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub field: FieldKey,
    pub a: Option<String>,
    pub b: Option<String>,
}

pub fn diff_records(a: &EtdRecord, b: &EtdRecord) -> Vec<FieldDiff> {
    FieldKey::ALL
        .into_iter()
        .filter(|k| a.raw(*k) != b.raw(*k))
        .map(|k| FieldDiff {
            field: k,
            a: a.raw(k).map(str::to_string),
            b: b.raw(k).map(str::to_string),
        })
        .collect()
}

/// Set when the journal ended in a partial line that was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TornWrite {
    pub line: usize,
    pub bytes_dropped: usize,
}

struct LockFile(PathBuf);

impl Drop for LockFile {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

struct Writer {
    file: File,
    len: u64,
    _lock: LockFile,
}

pub struct VersionStore {
    path: PathBuf,
    writer: Option<Writer>,
    versions: HashMap<String, Vec<RecordVersion>>,
    order: Vec<String>,
    clock: Box<dyn Clock>,
    recovered: Option<TornWrite>,
}

impl std::fmt::Debug for VersionStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VersionStore")
            .field("path", &self.path)
            .field("records", &self.order.len())
            .field("writable", &self.writer.is_some())
            .finish()
    }
}

pub fn lock_path(journal: &Path) -> PathBuf {
    let mut s = journal.as_os_str().to_owned();
    s.push(".lock");
    PathBuf::from(s)
}

struct Loaded {
    versions: HashMap<String, Vec<RecordVersion>>,
    order: Vec<String>,
    good_len: u64,
    torn: Option<TornWrite>,
}

fn parse_journal(bytes: &[u8]) -> Result<Loaded> {
    let mut versions: HashMap<String, Vec<RecordVersion>> = HashMap::new();
    let mut order = Vec::new();
    let mut pos = 0usize;
    let mut line_no = 0usize;
    let mut torn = None;
    while pos < bytes.len() {
        line_no += 1;
        let Some(nl) = bytes[pos..].iter().position(|b| *b == b'\n') else {
            torn = Some(TornWrite {
                line: line_no,
                bytes_dropped: bytes.len() - pos,
            });
            break;
        };
        let raw = &bytes[pos..pos + nl];
        pos += nl + 1;
        let text = std::str::from_utf8(raw).map_err(|e| Error::CorruptJournal {
            line: line_no,
            message: e.to_string(),
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let v = RecordVersion::from_json_line(text).map_err(|message| Error::CorruptJournal { line: line_no, message })?;
        let list = versions.entry(v.record_id.clone()).or_insert_with(|| {
            order.push(v.record_id.clone());
            Vec::new()
        });
        let expected = list.len() as u32 + 1;
        if v.version != expected {
            return Err(Error::CorruptJournal {
                line: line_no,
                message: format!("{}: version {} where {expected} expected", v.record_id, v.version),
            });
        }
        list.push(v);
    }
    let good_len = (bytes.len() - torn.as_ref().map_or(0, |t| t.bytes_dropped)) as u64;
    Ok(Loaded {
        versions,
        order,
        good_len,
        torn,
    })
}

impl VersionStore {
    /// Opens (creating if needed) the journal for writing. Fails with
    /// `StoreBusy` while another writer holds `<journal>.lock`. A torn final
    /// line is truncated away and reported via [`VersionStore::recovered`].
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::open_with_clock(path, Box::new(SystemClock))
    }

    pub fn open_with_clock(path: impl AsRef<Path>, clock: Box<dyn Clock>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let lock = lock_path(&path);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => {}
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(Error::StoreBusy(path)),
            Err(e) => return Err(Error::io(&lock, e)),
        }
        let guard = LockFile(lock);
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(|e| Error::io(&path, e))?;
        let loaded = parse_journal(&bytes)?;
        if let Some(t) = &loaded.torn {
            log::warn!(
                "{}: dropping torn final line {} ({} bytes)",
                path.display(),
                t.line,
                t.bytes_dropped
            );
            file.set_len(loaded.good_len).map_err(|e| Error::io(&path, e))?;
        }
        file.seek(SeekFrom::Start(loaded.good_len)).map_err(|e| Error::io(&path, e))?;
        Ok(VersionStore {
            path,
            writer: Some(Writer {
                file,
                len: loaded.good_len,
                _lock: guard,
            }),
            versions: loaded.versions,
            order: loaded.order,
            clock,
            recovered: loaded.torn,
        })
    }

    /// Loads the journal without taking the writer lock. Missing file → empty.
    pub fn read_only(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let loaded = parse_journal(&bytes)?;
        Ok(VersionStore {
            path,
            writer: None,
            versions: loaded.versions,
            order: loaded.order,
            clock: Box::new(SystemClock),
            recovered: loaded.torn,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn recovered(&self) -> Option<&TornWrite> {
        self.recovered.as_ref()
    }

    /// Record ids in first-commit order.
    pub fn ids(&self) -> &[String] {
        &self.order
    }

    pub fn contains(&self, record_id: &str) -> bool {
        self.versions.contains_key(record_id)
    }

    pub fn latest(&self, record_id: &str) -> Option<&RecordVersion> {
        self.versions.get(record_id).and_then(|v| v.last())
    }

    fn append(&mut self, v: RecordVersion) -> Result<RecordVersion> {
        let w = self
            .writer
            .as_mut()
            .ok_or_else(|| Error::Config("journal opened read-only".into()))?;
        let mut line = v.to_json_line()?;
        line.push('\n');
        if let Err(e) = w.file.write_all(line.as_bytes()).and_then(|_| w.file.flush()) {
            // leave no partial line behind
            let _ = w.file.set_len(w.len);
            let _ = w.file.seek(SeekFrom::Start(w.len));
            return Err(Error::io(&self.path, e));
        }
        w.len += line.len() as u64;
        if !self.versions.contains_key(&v.record_id) {
            self.order.push(v.record_id.clone());
        }
        self.versions.entry(v.record_id.clone()).or_default().push(v.clone());
        Ok(v)
    }

    fn next_stamp(&self, record_id: &str) -> DateTime<Utc> {
        let now = self.clock.now();
        match self.latest(record_id) {
            Some(prev) if prev.timestamp > now => prev.timestamp,
            _ => now,
        }
    }

    /// Snapshots `rec`. A new id always gets version 1 with an empty summary;
    /// an existing id with no actions gets nothing.
    pub fn commit(&mut self, rec: &EtdRecord, actions: &[CorrectionAction]) -> Result<Option<RecordVersion>> {
        let (version, summary) = match self.versions.get(&rec.id) {
            None => {
                if !actions.is_empty() {
                    log::debug!("{}: first commit, change summary dropped", rec.id);
                }
                (1, Vec::new())
            }
            Some(_) if actions.is_empty() => return Ok(None),
            Some(list) => (list.len() as u32 + 1, actions.to_vec()),
        };
        let v = RecordVersion {
            record_id: rec.id.clone(),
            version,
            timestamp: self.next_stamp(&rec.id),
            snapshot: rec.clone(),
            change_summary: summary,
        };
        self.append(v).map(Some)
    }

    pub fn history(&self, record_id: &str) -> Result<&[RecordVersion]> {
        self.versions
            .get(record_id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownRecord(record_id.to_string()))
    }

    pub fn version(&self, record_id: &str, version: u32) -> Result<&RecordVersion> {
        let h = self.history(record_id)?;
        version
            .checked_sub(1)
            .and_then(|i| h.get(i as usize))
            .ok_or_else(|| Error::UnknownVersion {
                record_id: record_id.to_string(),
                version,
            })
    }

    /// Appends the target snapshot as a new version and returns it.
    pub fn rollback(&mut self, record_id: &str, target: u32) -> Result<RecordVersion> {
        let restored = self.version(record_id, target)?.snapshot.clone();
        let current = &self.latest(record_id).expect("history is non-empty").snapshot;
        let summary = diff_records(current, &restored)
            .into_iter()
            .map(|d| CorrectionAction {
                field: d.field,
                kind: ActionKind::Rollback,
                old: d.a,
                new: d.b.unwrap_or_default(),
                source: ActionSource::VersionStore,
                role: None,
                parts: None,
            })
            .collect::<Vec<_>>();
        let v = RecordVersion {
            record_id: record_id.to_string(),
            version: self.history(record_id)?.len() as u32 + 1,
            timestamp: self.next_stamp(record_id),
            snapshot: restored,
            change_summary: summary,
        };
        self.append(v)
    }

    pub fn diff(&self, record_id: &str, a: u32, b: u32) -> Result<Vec<FieldDiff>> {
        Ok(diff_records(
            &self.version(record_id, a)?.snapshot,
            &self.version(record_id, b)?.snapshot,
        ))
    }
}
