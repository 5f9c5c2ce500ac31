//! Per-field error detectors and the record-level orchestrator.

pub mod names;
pub mod title;

use serde::{Deserialize, Serialize};

use crate::dictionaries::{AliasDictionary, Match, WordFrequencyList, YearRange};
use crate::ecc::dates::{parse_year_value, DateOrder};
use crate::ecc::spelling::correct_spelling;
use crate::model::{is_punctuation, EtdRecord, FieldKey, FieldValue};
use crate::resources::Resources;

pub use names::{JudgedToken, NameJudge, NameJudgment, NameLabel, RuleJudge};
pub use title::{classify_title, extract_title_features, IdfTable, TitleFeatureVector, TitleLabel, TitleModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Missing,
    IncorrectValue,
    Misspelling,
    NonCanonical,
    Unparseable,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 5] = [
        ErrorKind::Missing,
        ErrorKind::IncorrectValue,
        ErrorKind::Misspelling,
        ErrorKind::NonCanonical,
        ErrorKind::Unparseable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Missing => "missing",
            ErrorKind::IncorrectValue => "incorrect_value",
            ErrorKind::Misspelling => "misspelling",
            ErrorKind::NonCanonical => "non_canonical",
            ErrorKind::Unparseable => "unparseable",
        }
    }
}

impl std::str::FromStr for ErrorKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| crate::Error::Config(format!("unknown error kind {s:?}")))
    }
}

impl std::fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDiagnosis {
    pub field: FieldKey,
    pub kind: ErrorKind,
    pub detail: String,
    pub detector: String,
    /// Token index ranges `[start, end)` the finding refers to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<Vec<(usize, usize)>>,
}

impl FieldDiagnosis {
    pub fn new(field: FieldKey, kind: ErrorKind, detector: &str, detail: impl Into<String>) -> Self {
        FieldDiagnosis {
            field,
            kind,
            detail: detail.into(),
            detector: detector.to_string(),
            spans: None,
        }
    }

    fn with_span(mut self, start: usize, end: usize) -> Self {
        self.spans.get_or_insert_with(Vec::new).push((start, end));
        self
    }

    fn first_span(&self) -> usize {
        self.spans.as_ref().and_then(|s| s.first()).map_or(0, |s| s.0)
    }
}

pub fn detect_dictionary_field(field: FieldKey, value: &str, d: &AliasDictionary) -> Option<FieldDiagnosis> {
    match d.lookup(value) {
        Match::CanonicalHit(_) => None,
        Match::AliasHit(c) => Some(FieldDiagnosis::new(
            field,
            ErrorKind::NonCanonical,
            "dictionary",
            format!("alias of {c:?}"),
        )),
        Match::NotFound => Some(FieldDiagnosis::new(
            field,
            ErrorKind::IncorrectValue,
            "dictionary",
            "not in dictionary",
        )),
    }
}

/// Lowercase, punctuation-free tokens of a department value with their
/// whitespace-token index; parenthesized text is ignored.
pub fn department_tokens(value: &str) -> Vec<(usize, String)> {
    let mut depth = 0usize;
    let mut out = Vec::new();
    for (i, raw) in value.split_whitespace().enumerate() {
        let mut tok = String::new();
        for c in raw.chars() {
            match c {
                '(' => depth += 1,
                ')' if depth > 0 => depth -= 1,
                _ if depth == 0 && !is_punctuation(c) => tok.extend(c.to_lowercase()),
                _ => {}
            }
        }
        if !tok.is_empty() {
            out.push((i, tok));
        }
    }
    out
}

pub fn detect_department_spelling(value: &str, w: &WordFrequencyList) -> Vec<FieldDiagnosis> {
    let mut out = Vec::new();
    for (i, tok) in department_tokens(value) {
        if tok.chars().count() < 3 || w.contains(&tok) {
            continue;
        }
        let d = match correct_spelling(&tok, w) {
            Some(fix) => FieldDiagnosis::new(
                FieldKey::Department,
                ErrorKind::Misspelling,
                "spelling",
                format!("{tok:?} -> {fix:?}"),
            ),
            None => FieldDiagnosis::new(
                FieldKey::Department,
                ErrorKind::IncorrectValue,
                "spelling",
                format!("unknown word {tok:?}"),
            ),
        };
        out.push(d.with_span(i, i + 1));
    }
    out
}

/// Dictionary check first, then per-token spelling; a value that is spelled
/// correctly but absent from the dictionary is non-canonical.
pub fn detect_department(value: &str, d: &AliasDictionary, w: &WordFrequencyList) -> Vec<FieldDiagnosis> {
    match d.lookup(value) {
        Match::CanonicalHit(_) => Vec::new(),
        Match::AliasHit(c) => vec![FieldDiagnosis::new(
            FieldKey::Department,
            ErrorKind::NonCanonical,
            "dictionary",
            format!("alias of {c:?}"),
        )],
        Match::NotFound => {
            let spelling = detect_department_spelling(value, w);
            if spelling.is_empty() {
                vec![FieldDiagnosis::new(
                    FieldKey::Department,
                    ErrorKind::NonCanonical,
                    "dictionary",
                    "not a canonical department name",
                )]
            } else {
                spelling
            }
        }
    }
}

pub fn detect_year(value: &str, r: &YearRange, order: DateOrder) -> Option<FieldDiagnosis> {
    let parsed = match parse_year_value(value, order) {
        Ok(p) => p,
        Err(_) => {
            return Some(FieldDiagnosis::new(FieldKey::Year, ErrorKind::Unparseable, "date", "no accepted format"));
        }
    };
    let y = parsed.parts.year();
    if !r.contains(y) {
        return Some(FieldDiagnosis::new(
            FieldKey::Year,
            ErrorKind::IncorrectValue,
            "date",
            format!("year {y} outside {}-{}", r.min_year, r.max_year),
        ));
    }
    if !parsed.format.is_iso() {
        return Some(FieldDiagnosis::new(
            FieldKey::Year,
            ErrorKind::NonCanonical,
            "date",
            format!("{:?} format", parsed.format),
        ));
    }
    None
}

pub fn detect_title(value: &str, model: &TitleModel, idf: &IdfTable) -> Option<FieldDiagnosis> {
    let f = extract_title_features(value, idf);
    let (label, score) = classify_title(&f, model).ok()?;
    (label == TitleLabel::Invalid).then(|| {
        FieldDiagnosis::new(
            FieldKey::Title,
            ErrorKind::IncorrectValue,
            "title-classifier",
            format!("score {score:.3}"),
        )
    })
}

/// Author / advisor check. An advisor whose only non-PERSON tokens form a
/// parseable role suffix is non-canonical (split, not replaced).
pub fn detect_person_field(
    field: FieldKey,
    value: &str,
    judge: &dyn NameJudge,
) -> crate::Result<Option<FieldDiagnosis>> {
    let j = judge.judge(value)?;
    let others: Vec<(usize, &JudgedToken)> = j.others().collect();
    if others.is_empty() {
        return Ok(None);
    }
    if field == FieldKey::Advisor {
        if let Some(comma) = value.rfind(',') {
            let parsed = crate::ecc::contributor::parse_contributor(value);
            if parsed.role.is_some() && others.iter().all(|(_, t)| t.start > comma) {
                let mut d = FieldDiagnosis::new(
                    field,
                    ErrorKind::NonCanonical,
                    "name-judge",
                    format!("role suffix {:?}", parsed.role.unwrap_or_default()),
                );
                for (i, _) in &others {
                    d = d.with_span(*i, i + 1);
                }
                return Ok(Some(d));
            }
        }
    }
    let mut d = FieldDiagnosis::new(
        field,
        ErrorKind::IncorrectValue,
        "name-judge",
        format!(
            "non-person tokens: {}",
            others.iter().map(|(_, t)| t.token.as_str()).collect::<Vec<_>>().join(" ")
        ),
    );
    for (i, _) in &others {
        d = d.with_span(*i, i + 1);
    }
    Ok(Some(d))
}

/// Diagnoses one field. Missing short-circuits every other detector;
/// provider failures are logged and produce no diagnosis.
pub fn diagnose_field(record_id: &str, field: FieldKey, v: &FieldValue, res: &Resources) -> Vec<FieldDiagnosis> {
    if res.sentinels.is_missing(v) {
        return vec![FieldDiagnosis::new(field, ErrorKind::Missing, "missing", "no value")];
    }
    let value = v.raw.as_deref().unwrap_or_default().trim();
    let mut out: Vec<FieldDiagnosis> = match field {
        FieldKey::Title => detect_title(value, &res.title_model, &res.idf).into_iter().collect(),
        FieldKey::Author | FieldKey::Advisor => match detect_person_field(field, value, res.judge.as_ref()) {
            Ok(d) => d.into_iter().collect(),
            Err(e) => {
                log::warn!("{record_id}/{field}: skipped name check: {e}");
                Vec::new()
            }
        },
        FieldKey::University => detect_dictionary_field(field, value, &res.universities).into_iter().collect(),
        FieldKey::Degree => detect_dictionary_field(field, value, &res.degrees).into_iter().collect(),
        FieldKey::Year => detect_year(value, &res.years, res.date_order).into_iter().collect(),
        FieldKey::Department => detect_department(value, &res.departments, &res.words),
    };
    out.sort_by_key(FieldDiagnosis::first_span);
    out
}

/// All diagnoses of a record, in field order then span offset.
pub fn diagnose_record(rec: &EtdRecord, res: &Resources) -> Vec<FieldDiagnosis> {
    rec.fields()
        .flat_map(|(k, v)| diagnose_field(&rec.id, k, v, res))
        .collect()
}
