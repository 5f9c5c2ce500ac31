//! Record, field and value types shared by every stage of the pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven metadata fields a record carries, in their canonical order.
///
/// The derived `Ord` follows declaration order, which is also the order used
/// for diagnoses, reports and serialized snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKey {
    Title,
    Author,
    Advisor,
    University,
    Year,
    Degree,
    Department,
}

impl FieldKey {
    pub const ALL: [FieldKey; 7] = [
        FieldKey::Title,
        FieldKey::Author,
        FieldKey::Advisor,
        FieldKey::University,
        FieldKey::Year,
        FieldKey::Degree,
        FieldKey::Department,
    ];

    /// Dublin Core / ETD-MS element the field is harvested from.
    pub fn dc_field_name(self) -> &'static str {
        match self {
            FieldKey::Title => "dc.title",
            FieldKey::Author => "dc.creator",
            FieldKey::Advisor => "dc.contributor",
            FieldKey::University => "thesis.degree.generator",
            FieldKey::Year => "dc.date.issued",
            FieldKey::Degree => "thesis.degree.name",
            FieldKey::Department => "thesis.degree.discipline",
        }
    }

    /// Lowercase column / JSON key name.
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKey::Title => "title",
            FieldKey::Author => "author",
            FieldKey::Advisor => "advisor",
            FieldKey::University => "university",
            FieldKey::Year => "year",
            FieldKey::Degree => "degree",
            FieldKey::Department => "department",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FieldKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        FieldKey::ALL
            .into_iter()
            .find(|k| k.as_str() == lower || k.dc_field_name() == lower)
            .ok_or_else(|| Error::Config(format!("unknown field {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Original,
    Extracted,
    Corrected,
    Canonicalized,
}

/// Calendar parts of a parsed date. A day is only ever present with a month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDateParts", into = "RawDateParts")]
pub struct DateParts {
    year: i32,
    month: Option<u8>,
    day: Option<u8>,
}

#[derive(Serialize, Deserialize)]
struct RawDateParts {
    year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    month: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    day: Option<u8>,
}

impl TryFrom<RawDateParts> for DateParts {
    type Error = String;

    fn try_from(raw: RawDateParts) -> std::result::Result<Self, String> {
        match (raw.month, raw.day) {
            (None, Some(_)) => Err("day present without month".into()),
            (Some(m), _) if !(1..=12).contains(&m) => Err(format!("month {m} out of range")),
            (_, Some(d)) if !(1..=31).contains(&d) => Err(format!("day {d} out of range")),
            _ => Ok(DateParts {
                year: raw.year,
                month: raw.month,
                day: raw.day,
            }),
        }
    }
}

impl From<DateParts> for RawDateParts {
    fn from(p: DateParts) -> Self {
        RawDateParts {
            year: p.year,
            month: p.month,
            day: p.day,
        }
    }
}

impl DateParts {
    pub fn year_only(year: i32) -> Self {
        DateParts {
            year,
            month: None,
            day: None,
        }
    }

    pub fn year_month(year: i32, month: u8) -> Self {
        DateParts {
            year,
            month: Some(month),
            day: None,
        }
    }

    pub fn ymd(year: i32, month: u8, day: u8) -> Self {
        DateParts {
            year,
            month: Some(month),
            day: Some(day),
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> Option<u8> {
        self.month
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }

    /// `YYYY`, `YYYY-MM` or `YYYY-MM-DD`.
    pub fn to_iso(&self) -> String {
        match (self.month, self.day) {
            (Some(m), Some(d)) => format!("{:04}-{:02}-{:02}", self.year, m, d),
            (Some(m), None) => format!("{:04}-{:02}", self.year, m),
            _ => format!("{:04}", self.year),
        }
    }
}

/// One field of a record: the surface value plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FieldValue {
    pub raw: Option<String>,
    #[serde(default)]
    pub provenance: Provenance,
    /// Committee role split off an advisor value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    /// Parsed calendar parts of a year value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<DateParts>,
}

impl FieldValue {
    pub fn original(raw: impl Into<String>) -> Self {
        FieldValue {
            raw: Some(raw.into()),
            ..Default::default()
        }
    }

    pub fn absent() -> Self {
        FieldValue::default()
    }

    pub fn raw_str(&self) -> Option<&str> {
        self.raw.as_deref()
    }
}

/// A metadata record. All seven fields are always present; an empty field
/// is a [`FieldValue`] with no raw value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtdRecord {
    pub id: String,
    #[serde(with = "fields_serde")]
    fields: [FieldValue; 7],
}

impl EtdRecord {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Config("record id must be non-empty".into()));
        }
        Ok(EtdRecord {
            id,
            fields: Default::default(),
        })
    }

    /// Builds a record from `(field, raw)` pairs; unspecified fields are absent.
    pub fn from_pairs<'a>(
        id: impl Into<String>,
        pairs: impl IntoIterator<Item = (FieldKey, &'a str)>,
    ) -> Result<Self> {
        let mut rec = EtdRecord::new(id)?;
        for (k, v) in pairs {
            rec.fields[k.index()] = FieldValue::original(v);
        }
        Ok(rec)
    }

    pub fn get(&self, key: FieldKey) -> &FieldValue {
        &self.fields[key.index()]
    }

    pub fn get_mut(&mut self, key: FieldKey) -> &mut FieldValue {
        &mut self.fields[key.index()]
    }

    pub fn raw(&self, key: FieldKey) -> Option<&str> {
        self.fields[key.index()].raw.as_deref()
    }

    pub fn set(&mut self, key: FieldKey, value: FieldValue) {
        self.fields[key.index()] = value;
    }

    pub fn fields(&self) -> impl Iterator<Item = (FieldKey, &FieldValue)> {
        FieldKey::ALL.into_iter().zip(self.fields.iter())
    }

    /// Field map as serialized in journal snapshots.
    pub fn field_map(&self) -> BTreeMap<FieldKey, FieldValue> {
        self.fields().map(|(k, v)| (k, v.clone())).collect()
    }

    pub fn from_field_map(id: impl Into<String>, map: BTreeMap<FieldKey, FieldValue>) -> Result<Self> {
        let mut rec = EtdRecord::new(id)?;
        for key in FieldKey::ALL {
            let v = map
                .get(&key)
                .ok_or_else(|| Error::Config(format!("snapshot lacks field {key}")))?;
            rec.fields[key.index()] = v.clone();
        }
        Ok(rec)
    }
}

mod fields_serde {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{FieldKey, FieldValue};

    pub fn serialize<S: Serializer>(fields: &[FieldValue; 7], s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<FieldKey, &FieldValue> = FieldKey::ALL.into_iter().zip(fields.iter()).collect();
        map.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[FieldValue; 7], D::Error> {
        let mut map = BTreeMap::<FieldKey, FieldValue>::deserialize(d)?;
        let mut out: [FieldValue; 7] = Default::default();
        for key in FieldKey::ALL {
            out[key.index()] = map
                .remove(&key)
                .ok_or_else(|| D::Error::custom(format!("missing field {key}")))?;
        }
        Ok(out)
    }
}

fn punct_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{P}~^$|<>=+]").expect("static regex"))
}

pub fn is_punctuation(c: char) -> bool {
    let mut buf = [0u8; 4];
    punct_re().is_match(c.encode_utf8(&mut buf))
}

/// Uppercases, drops punctuation and collapses whitespace.
pub fn normalize_surface(s: &str) -> String {
    let stripped = punct_re().replace_all(s, "");
    stripped
        .split_whitespace()
        .map(|w| w.to_uppercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Literal strings treated as "no value".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MissingSentinels(Vec<String>);

impl Default for MissingSentinels {
    fn default() -> Self {
        MissingSentinels::new(["null", "none", "n/a", "na"])
    }
}

impl MissingSentinels {
    pub fn new<S: AsRef<str>>(items: impl IntoIterator<Item = S>) -> Self {
        MissingSentinels(items.into_iter().map(|s| s.as_ref().trim().to_lowercase()).collect())
    }

    pub fn contains(&self, s: &str) -> bool {
        let s = s.trim().to_lowercase();
        self.0.iter().any(|x| *x == s)
    }

    pub fn is_missing(&self, v: &FieldValue) -> bool {
        self.is_missing_raw(v.raw.as_deref())
    }

    pub fn is_missing_raw(&self, raw: Option<&str>) -> bool {
        match raw {
            None => true,
            Some(s) if s.trim().is_empty() => true,
            Some(s) => self.contains(s),
        }
    }
}

/// [`MissingSentinels::is_missing`] with the default sentinel set.
pub fn is_missing(v: &FieldValue) -> bool {
    MissingSentinels::default().is_missing(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dc_names() {
        assert_eq!(FieldKey::Title.dc_field_name(), "dc.title");
        assert_eq!(FieldKey::Year.dc_field_name(), "dc.date.issued");
        assert_eq!(FieldKey::Degree.dc_field_name(), "thesis.degree.name");
        let names: std::collections::HashSet<_> = FieldKey::ALL.iter().map(|k| k.dc_field_name()).collect();
        assert_eq!(names.len(), 7);
    }

    #[test]
    fn field_key_parses_column_and_dc_names() {
        for k in FieldKey::ALL {
            assert_eq!(k.as_str().parse::<FieldKey>().unwrap(), k);
            assert_eq!(k.dc_field_name().parse::<FieldKey>().unwrap(), k);
        }
        assert!("publisher".parse::<FieldKey>().is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_surface("Johns Hopkins University"), "JOHNS HOPKINS UNIVERSITY");
        assert_eq!(normalize_surface("Ph.D."), "PHD");
        assert_eq!(normalize_surface(""), "");
        assert_eq!(normalize_surface("  Co-Chair ,  x|y  "), "COCHAIR XY");
        assert_eq!(normalize_surface("Women’s Studies"), "WOMENS STUDIES");
    }

    #[test]
    fn missing_values() {
        assert!(is_missing(&FieldValue::absent()));
        assert!(is_missing(&FieldValue::original("  ")));
        assert!(is_missing(&FieldValue::original("N/A")));
        assert!(is_missing(&FieldValue::original("null")));
        assert!(!is_missing(&FieldValue::original("NAACP")));
        let custom = MissingSentinels::new(["unknown"]);
        assert!(custom.is_missing(&FieldValue::original("Unknown")));
        assert!(!custom.is_missing(&FieldValue::original("n/a")));
    }

    #[test]
    fn record_json_requires_all_fields() {
        let rec = EtdRecord::from_pairs("r1", [(FieldKey::Title, "A Title")]).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        let back: EtdRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
        let broken = json.replace("\"department\"", "\"publisher\"");
        assert!(serde_json::from_str::<EtdRecord>(&broken).is_err());
        assert!(EtdRecord::new("  ").is_err());
    }

    #[test]
    fn date_parts_reject_day_without_month() {
        assert!(serde_json::from_str::<DateParts>(r#"{"year":2015,"day":3}"#).is_err());
        assert!(serde_json::from_str::<DateParts>(r#"{"year":2015,"month":13}"#).is_err());
        let p: DateParts = serde_json::from_str(r#"{"year":2015,"month":5}"#).unwrap();
        assert_eq!(p.to_iso(), "2015-05");
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_surface(&s);
            prop_assert_eq!(normalize_surface(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
            prop_assert!(!once.chars().any(is_punctuation));
        }

        #[test]
        fn normalize_keeps_alphanumeric_order(s in "[a-zA-Z0-9 .,;:!?()'-]{0,40}") {
            let kept: String = s.to_uppercase().chars().filter(|c| c.is_alphanumeric()).collect();
            let got: String = normalize_surface(&s).chars().filter(|c| c.is_alphanumeric()).collect();
            prop_assert_eq!(kept, got);
        }
    }
}
