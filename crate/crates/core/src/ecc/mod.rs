//! Error correction and canonicalization.

pub mod contributor;
pub mod dates;
pub mod similarity;
pub mod spelling;

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detection::{department_tokens, diagnose_field, ErrorKind, FieldDiagnosis};
use crate::dictionaries::{AliasDictionary, Match, WordFrequencyList};
use crate::error::{Error, Result};
use crate::model::{is_missing, DateParts, EtdRecord, FieldKey, FieldValue, Provenance};
use crate::resources::Resources;

pub use contributor::{parse_contributor, ParsedContributor};
pub use dates::{canonicalize_year, parse_year_value, DateOrder};
pub use similarity::{strip_department_boilerplate, CanonicalMatcher, SimilarityProvider, StrippedIndex, TrigramTfidf};
pub use spelling::correct_spelling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    FillMissing,
    Overwrite,
    SpellFix,
    Canonicalize,
    ParseSplit,
    DateSplit,
    /// Synthetic entry on a version restored from an earlier snapshot.
    Rollback,
}

impl ActionKind {
    /// Kinds that count as canonicalizations.
    pub fn is_canonicalization(self) -> bool {
        matches!(self, ActionKind::Canonicalize | ActionKind::ParseSplit | ActionKind::DateSplit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSource {
    ExtractionOracle,
    Dictionary,
    SpellChecker,
    SimilarityMatch,
    DateParser,
    RoleParser,
    VersionStore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionAction {
    pub field: FieldKey,
    pub kind: ActionKind,
    pub old: Option<String>,
    pub new: String,
    pub source: ActionSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<DateParts>,
}

impl CorrectionAction {
    pub fn new(field: FieldKey, kind: ActionKind, old: Option<&str>, new: impl Into<String>, source: ActionSource) -> Self {
        CorrectionAction {
            field,
            kind,
            old: old.map(str::to_string),
            new: new.into(),
            source,
            role: None,
            parts: None,
        }
    }
}

/// Field values extracted from the document itself.
pub trait ExtractionOracle: Send + Sync {
    /// Available extractions for `record_id`; absent keys mean "unavailable".
    fn extract(&self, record_id: &str) -> Result<BTreeMap<FieldKey, String>>;
}

fn clean_extraction(map: BTreeMap<String, String>, record_id: &str) -> Result<BTreeMap<FieldKey, String>> {
    let mut out = BTreeMap::new();
    for (k, v) in map {
        let key: FieldKey = k.parse().map_err(|_| Error::Oracle {
            record_id: record_id.to_string(),
            message: format!("unknown field {k:?}"),
        })?;
        if !is_missing(&FieldValue::original(v.as_str())) {
            out.insert(key, v);
        }
    }
    Ok(out)
}

/// An oracle that never has anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoOracle;

impl ExtractionOracle for NoOracle {
    fn extract(&self, _: &str) -> Result<BTreeMap<FieldKey, String>> {
        Ok(BTreeMap::new())
    }
}

/// In-memory oracle, also the loaded form of a JSON-lines sidecar.
#[derive(Debug, Clone, Default)]
pub struct MapOracle {
    map: HashMap<String, BTreeMap<FieldKey, String>>,
}

#[derive(Deserialize)]
struct OracleLine {
    id: String,
    fields: BTreeMap<String, String>,
}

impl MapOracle {
    pub fn new(map: HashMap<String, BTreeMap<FieldKey, String>>) -> Self {
        MapOracle { map }
    }

    pub fn insert(&mut self, id: impl Into<String>, fields: BTreeMap<FieldKey, String>) {
        self.map.insert(id.into(), fields);
    }

    /// One `{"id": .., "fields": {..}}` object per line.
    pub fn parse_jsonl(reader: impl BufRead) -> Result<Self> {
        let mut map = HashMap::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<oracle>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: OracleLine = serde_json::from_str(&line).map_err(|e| Error::Malformed {
                source_name: "oracle".into(),
                line: n + 1,
                message: e.to_string(),
            })?;
            let fields = clean_extraction(parsed.fields, &parsed.id)?;
            map.insert(parsed.id, fields);
        }
        Ok(MapOracle { map })
    }

    /// Writes the map as JSON lines, sorted by record id.
    pub fn write_jsonl(&self, mut w: impl std::io::Write) -> Result<()> {
        #[derive(Serialize)]
        struct Out<'a> {
            id: &'a str,
            fields: &'a BTreeMap<FieldKey, String>,
        }
        let mut ids: Vec<&String> = self.map.keys().collect();
        ids.sort();
        for id in ids {
            serde_json::to_writer(&mut w, &Out { id, fields: &self.map[id] })?;
            w.write_all(b"\n").map_err(|e| Error::io("<oracle output>", e))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse_jsonl(std::io::BufReader::new(f))
    }
}

impl ExtractionOracle for MapOracle {
    fn extract(&self, record_id: &str) -> Result<BTreeMap<FieldKey, String>> {
        Ok(self.map.get(record_id).cloned().unwrap_or_default())
    }
}

/// Directory of `<id>.extracted.json` files, read on demand.
#[derive(Debug, Clone)]
pub struct SidecarDirOracle {
    dir: PathBuf,
}

impl SidecarDirOracle {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SidecarDirOracle { dir: dir.into() }
    }
}

impl ExtractionOracle for SidecarDirOracle {
    fn extract(&self, record_id: &str) -> Result<BTreeMap<FieldKey, String>> {
        let path = self.dir.join(format!("{record_id}.extracted.json"));
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(Error::io(path, e)),
        };
        let map: BTreeMap<String, String> = serde_json::from_str(&text).map_err(|e| Error::Oracle {
            record_id: record_id.to_string(),
            message: e.to_string(),
        })?;
        clean_extraction(map, record_id)
    }
}

/// Opens a sidecar directory or a JSON-lines file.
pub fn open_oracle(path: impl AsRef<Path>) -> Result<Box<dyn ExtractionOracle>> {
    let path = path.as_ref();
    if path.is_dir() {
        Ok(Box::new(SidecarDirOracle::new(path)))
    } else {
        Ok(Box::new(MapOracle::load_jsonl(path)?))
    }
}

fn oracle_values(rec: &EtdRecord, oracle: &dyn ExtractionOracle) -> BTreeMap<FieldKey, String> {
    oracle.extract(&rec.id).unwrap_or_else(|e| {
        log::warn!("{}: oracle unavailable: {e}", rec.id);
        BTreeMap::new()
    })
}

/// FillMissing for each missing field the oracle covers.
pub fn fill_missing(rec: &EtdRecord, diags: &[FieldDiagnosis], oracle: &dyn ExtractionOracle) -> Vec<CorrectionAction> {
    let wanted: Vec<FieldKey> = diags.iter().filter(|d| d.kind == ErrorKind::Missing).map(|d| d.field).collect();
    if wanted.is_empty() {
        return Vec::new();
    }
    let extracted = oracle_values(rec, oracle);
    wanted
        .into_iter()
        .filter_map(|f| {
            extracted
                .get(&f)
                .map(|v| CorrectionAction::new(f, ActionKind::FillMissing, None, v.clone(), ActionSource::ExtractionOracle))
        })
        .collect()
}

/// Fields whose incorrect values may be replaced by an extraction.
pub const OVERWRITABLE: [FieldKey; 6] = [
    FieldKey::Title,
    FieldKey::Author,
    FieldKey::Advisor,
    FieldKey::University,
    FieldKey::Degree,
    FieldKey::Year,
];

/// Overwrite for each incorrect or unparseable value the oracle covers with
/// a different value.
pub fn overwrite_incorrect(
    rec: &EtdRecord,
    diags: &[FieldDiagnosis],
    oracle: &dyn ExtractionOracle,
) -> Vec<CorrectionAction> {
    let mut wanted: Vec<FieldKey> = diags
        .iter()
        .filter(|d| matches!(d.kind, ErrorKind::IncorrectValue | ErrorKind::Unparseable) && OVERWRITABLE.contains(&d.field))
        .map(|d| d.field)
        .collect();
    wanted.dedup();
    if wanted.is_empty() {
        return Vec::new();
    }
    let extracted = oracle_values(rec, oracle);
    wanted
        .into_iter()
        .filter_map(|f| {
            let old = rec.raw(f);
            let new = extracted.get(&f)?;
            (old != Some(new.as_str()))
                .then(|| CorrectionAction::new(f, ActionKind::Overwrite, old, new.clone(), ActionSource::ExtractionOracle))
        })
        .collect()
}

pub fn canonicalize_by_dictionary(field: FieldKey, value: &str, d: &AliasDictionary) -> Option<CorrectionAction> {
    match d.lookup(value) {
        Match::AliasHit(c) if c != value => Some(CorrectionAction::new(
            field,
            ActionKind::Canonicalize,
            Some(value),
            c,
            ActionSource::Dictionary,
        )),
        _ => None,
    }
}

fn match_case(template: &str, word: &str) -> String {
    let letters: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        word.to_uppercase()
    } else if letters.first().is_some_and(|c| c.is_uppercase()) {
        let mut cs = word.chars();
        cs.next().map(|c| c.to_uppercase().chain(cs).collect()).unwrap_or_default()
    } else {
        word.to_string()
    }
}

/// Replaces misspelled tokens in place, keeping the surrounding text.
pub fn spell_fix_department(value: &str, w: &WordFrequencyList) -> Option<String> {
    let fixes: HashMap<usize, String> = department_tokens(value)
        .into_iter()
        .filter(|(_, t)| t.chars().count() >= 3)
        .filter_map(|(i, t)| correct_spelling(&t, w).map(|fix| (i, fix)))
        .collect();
    if fixes.is_empty() {
        return None;
    }
    let mut out = String::with_capacity(value.len());
    let mut idx = 0;
    let mut rest = value;
    while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
        out.push_str(&rest[..start]);
        rest = &rest[start..];
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..end];
        match fixes.get(&idx) {
            Some(fix) => {
                let lead: String = tok.chars().take_while(|c| !c.is_alphanumeric()).collect();
                let trail: String = {
                    let mut t: Vec<char> = tok.chars().rev().take_while(|c| !c.is_alphanumeric()).collect();
                    t.reverse();
                    t.into_iter().collect()
                };
                out.push_str(&lead);
                out.push_str(&match_case(tok, fix));
                out.push_str(&trail);
            }
            None => out.push_str(tok),
        }
        rest = &rest[end..];
        idx += 1;
    }
    out.push_str(rest);
    Some(out)
}

/// Spell fix, exact lookup (full and boilerplate-stripped), then similarity.
/// Returns the actions taken; the last `new` is the resulting value.
pub fn canonicalize_department(
    value: &str,
    d: &AliasDictionary,
    w: &WordFrequencyList,
    matcher: &CanonicalMatcher,
    stripped: &StrippedIndex,
    threshold: f64,
) -> Vec<CorrectionAction> {
    let f = FieldKey::Department;
    let mut actions = Vec::new();
    let mut current = value.to_string();
    if let Some(fixed) = spell_fix_department(&current, w) {
        if fixed != current {
            actions.push(CorrectionAction::new(f, ActionKind::SpellFix, Some(&current), fixed.clone(), ActionSource::SpellChecker));
            current = fixed;
        }
    }
    let canon = |c: &str, src| CorrectionAction::new(f, ActionKind::Canonicalize, Some(&current), c, src);
    match d.lookup(&current) {
        Match::CanonicalHit(_) => return actions,
        Match::AliasHit(c) => {
            actions.push(canon(c, ActionSource::Dictionary));
            return actions;
        }
        Match::NotFound => {}
    }
    let residue = strip_department_boilerplate(&current);
    if residue.is_empty() {
        return actions;
    }
    if let Some(c) = d.lookup(&residue).canonical().or_else(|| stripped.get(&residue)) {
        actions.push(canon(c, ActionSource::Dictionary));
        return actions;
    }
    match matcher.best_match(&residue, threshold) {
        Ok(Some((c, _))) => actions.push(canon(&c, ActionSource::SimilarityMatch)),
        Ok(None) => {}
        Err(e) => log::warn!("similarity step skipped for {value:?}: {e}"),
    }
    actions
}

/// Result of correcting one record.
#[derive(Debug, Clone, PartialEq)]
pub struct EccOutcome {
    pub record: EtdRecord,
    pub actions: Vec<CorrectionAction>,
    pub unresolved: Vec<FieldKey>,
}

fn has(diags: &[FieldDiagnosis], kinds: &[ErrorKind]) -> bool {
    diags.iter().any(|d| kinds.contains(&d.kind))
}

/// Post-oracle correction of one field; returns the actions applied to `v`.
fn correct_field(field: FieldKey, v: &mut FieldValue, diags: &[FieldDiagnosis], res: &Resources) -> Vec<CorrectionAction> {
    let Some(value) = v.raw.clone() else {
        return Vec::new();
    };
    let value = value.as_str();
    let mut actions = Vec::new();
    match field {
        FieldKey::Advisor if has(diags, &[ErrorKind::NonCanonical]) => {
            let p = parse_contributor(value);
            if let Some(role) = p.role {
                let mut a = CorrectionAction::new(field, ActionKind::ParseSplit, Some(value), p.name.clone(), ActionSource::RoleParser);
                a.role = Some(role.clone());
                v.raw = Some(p.name);
                v.role = Some(role);
                v.provenance = Provenance::Canonicalized;
                actions.push(a);
            }
        }
        FieldKey::University | FieldKey::Degree if has(diags, &[ErrorKind::NonCanonical]) => {
            let d = if field == FieldKey::University { &res.universities } else { &res.degrees };
            if let Some(a) = canonicalize_by_dictionary(field, value, d) {
                v.raw = Some(a.new.clone());
                v.provenance = Provenance::Canonicalized;
                actions.push(a);
            }
        }
        FieldKey::Year if has(diags, &[ErrorKind::NonCanonical]) => {
            if let Ok(parts) = canonicalize_year(value, res.date_order) {
                let iso = parts.to_iso();
                let mut a = CorrectionAction::new(field, ActionKind::DateSplit, Some(value), iso.clone(), ActionSource::DateParser);
                a.parts = Some(parts);
                v.raw = Some(iso);
                v.parts = Some(parts);
                v.provenance = Provenance::Canonicalized;
                actions.push(a);
            }
        }
        FieldKey::Department
            if has(diags, &[ErrorKind::NonCanonical, ErrorKind::Misspelling, ErrorKind::IncorrectValue]) =>
        {
            let acts = canonicalize_department(
                value,
                &res.departments,
                &res.words,
                &res.matcher,
                &res.stripped,
                res.threshold,
            );
            if let Some(last) = acts.last() {
                v.raw = Some(last.new.clone());
                v.provenance = if last.kind == ActionKind::SpellFix {
                    Provenance::Corrected
                } else {
                    Provenance::Canonicalized
                };
            }
            actions.extend(acts);
        }
        _ => {}
    }
    actions
}

/// Oracle fill/overwrite, then spell fix, canonicalization and splitting,
/// field by field. Fields without diagnoses are never touched.
pub fn apply_ecc(rec: &EtdRecord, diags: &[FieldDiagnosis], res: &Resources) -> EccOutcome {
    let mut out = rec.clone();
    let mut actions = Vec::new();
    let mut unresolved = Vec::new();

    let mut oracle_actions = fill_missing(rec, diags, res.oracle.as_ref());
    oracle_actions.extend(overwrite_incorrect(rec, diags, res.oracle.as_ref()));

    for field in FieldKey::ALL {
        let field_diags: Vec<FieldDiagnosis> = diags.iter().filter(|d| d.field == field).cloned().collect();
        if field_diags.is_empty() {
            continue;
        }
        let mut v = out.get(field).clone();
        let mut current = field_diags;
        if let Some(a) = oracle_actions.iter().find(|a| a.field == field) {
            v = FieldValue {
                raw: Some(a.new.clone()),
                provenance: Provenance::Extracted,
                role: None,
                parts: None,
            };
            actions.push(a.clone());
            current = diagnose_field(&rec.id, field, &v, res);
        }
        actions.extend(correct_field(field, &mut v, &current, res));
        if !diagnose_field(&rec.id, field, &v, res).is_empty() {
            unresolved.push(field);
        }
        out.set(field, v);
    }
    EccOutcome {
        record: out,
        actions,
        unresolved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::diagnose_record;
    use crate::dictionaries::bundled;

    fn res() -> &'static Resources {
        crate::resources::tests::shared()
    }

    fn oracle(pairs: &[(FieldKey, &str)]) -> MapOracle {
        let mut o = MapOracle::default();
        o.insert("r", pairs.iter().map(|(k, v)| (*k, v.to_string())).collect());
        o
    }

    #[test]
    fn fill_missing_examples() {
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Title, "A Study")]).unwrap();
        let diags = diagnose_record(&rec, res());
        let a = fill_missing(&rec, &diags, &oracle(&[(FieldKey::Year, "2014")]));
        assert_eq!(a, vec![CorrectionAction::new(FieldKey::Year, ActionKind::FillMissing, None, "2014", ActionSource::ExtractionOracle)]);
        assert!(fill_missing(&rec, &[], &oracle(&[(FieldKey::Year, "2014")])).is_empty());
    }

    #[test]
    fn overwrite_examples() {
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Title, "DMA Recitals"), (FieldKey::Degree, "history")]).unwrap();
        let diags = vec![
            FieldDiagnosis::new(FieldKey::Title, ErrorKind::IncorrectValue, "t", ""),
            FieldDiagnosis::new(FieldKey::Degree, ErrorKind::IncorrectValue, "t", ""),
        ];
        let o = oracle(&[
            (FieldKey::Title, "Doctor of Musical Arts Recital Program Notes"),
            (FieldKey::Degree, "PHD"),
        ]);
        let a = overwrite_incorrect(&rec, &diags, &o);
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|a| a.kind == ActionKind::Overwrite));
        assert!(overwrite_incorrect(&rec, &diags, &NoOracle).is_empty());
    }

    #[test]
    fn overwritten_degree_is_then_expanded() {
        let mut r = crate::resources::Resources::bundled().unwrap();
        r.oracle = Box::new(oracle(&[(FieldKey::Degree, "PHD")]));
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Degree, "history")]).unwrap();
        let diags: Vec<_> = diagnose_record(&rec, &r).into_iter().filter(|d| d.field == FieldKey::Degree).collect();
        let out = apply_ecc(&rec, &diags, &r);
        let kinds: Vec<_> = out.actions.iter().map(|a| a.kind).collect();
        assert_eq!(kinds, [ActionKind::Overwrite, ActionKind::Canonicalize]);
        assert_eq!(out.record.raw(FieldKey::Degree), Some("Doctor of Philosophy"));
        assert_eq!(out.record.get(FieldKey::Degree).provenance, Provenance::Canonicalized);
    }

    #[test]
    fn dictionary_canonicalization_examples() {
        let u = bundled::universities();
        let d = bundled::degrees();
        assert_eq!(canonicalize_by_dictionary(FieldKey::University, "GIT", &u).unwrap().new, "Georgia Institute of Technology");
        assert_eq!(canonicalize_by_dictionary(FieldKey::Degree, "PHM", &d).unwrap().new, "Master of Philosophy");
        assert!(canonicalize_by_dictionary(FieldKey::University, "Georgia Institute of Technology", &u).is_none());
    }

    fn dept(value: &str) -> Vec<CorrectionAction> {
        let r = res();
        canonicalize_department(value, &r.departments, &r.words, &r.matcher, &r.stripped, r.threshold)
    }

    #[test]
    fn department_examples() {
        assert_eq!(dept("MSE").last().unwrap().new, "Materials Science and Engineering");
        let targets: Vec<String> = ["Dept of CS", "CS Department", "Department of Computer Science"]
            .iter()
            .map(|v| dept(v).last().unwrap().new.clone())
            .collect();
        assert!(targets.windows(2).all(|w| w[0] == w[1]), "{targets:?}");
        let a = dept("scool of Music");
        assert_eq!(a[0].kind, ActionKind::SpellFix);
        assert_eq!(a[0].new, "school of Music");
        assert_eq!(a.last().unwrap().new, "Music");
        let a = dept("College of Muisc");
        assert_eq!(a[0].new, "College of Music");
        assert_eq!(a.last().unwrap().new, "Music");
    }

    #[test]
    fn canonical_departments_are_fixed_points() {
        for e in res().departments.entries() {
            assert!(dept(&e.canonical).is_empty(), "{}", e.canonical);
        }
    }

    #[test]
    fn spell_fix_keeps_case_and_punctuation() {
        let w = bundled::words();
        assert_eq!(spell_fix_department("DEPT. OF MUISC", &w).as_deref(), Some("DEPT. OF MUSIC"));
        assert_eq!(spell_fix_department("(Muisc), Scool", &w).as_deref(), Some("(Muisc), School"));
        assert_eq!(spell_fix_department("Music", &w), None);
    }

    #[test]
    fn worked_record_example() {
        let rec = EtdRecord::from_pairs(
            "r",
            [
                (FieldKey::Title, "Essays on the Economics of Household Energy Demand in Rural Communities"),
                (FieldKey::Author, "Jane Doe"),
                (FieldKey::Advisor, "Mark Pankow"),
                (FieldKey::University, "jhu"),
                (FieldKey::Year, "05-17-2015"),
                (FieldKey::Degree, "MPHIL"),
                (FieldKey::Department, "Music"),
            ],
        )
        .unwrap();
        let diags = diagnose_record(&rec, res());
        let out = apply_ecc(&rec, &diags, res());
        let kinds: Vec<_> = out.actions.iter().map(|a| a.kind).collect();
        assert_eq!(kinds, [ActionKind::Canonicalize, ActionKind::DateSplit, ActionKind::Canonicalize]);
        assert!(out.unresolved.is_empty());
        assert_eq!(out.record.raw(FieldKey::University), Some("Johns Hopkins University"));
        assert_eq!(out.record.get(FieldKey::Year).parts, Some(DateParts::ymd(2015, 5, 17)));
        assert_eq!(out.record.raw(FieldKey::Year), Some("2015-05-17"));
        let again = apply_ecc(&out.record, &diagnose_record(&out.record, res()), res());
        assert!(again.actions.is_empty());
        assert_eq!(again.record, out.record);
    }

    #[test]
    fn advisor_role_is_split() {
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Advisor, "Mark Pankow, Co-Chair")]).unwrap();
        let diags = diagnose_record(&rec, res());
        let out = apply_ecc(&rec, &diags, res());
        let adv = out.record.get(FieldKey::Advisor);
        assert_eq!((adv.raw.as_deref(), adv.role.as_deref()), (Some("Mark Pankow"), Some("Co-Chair")));
        assert!(!out.unresolved.contains(&FieldKey::Advisor));
    }

    #[test]
    fn missing_without_oracle_is_unresolved() {
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Title, "Essays on Labor Markets and Household Finance")]).unwrap();
        let out = apply_ecc(&rec, &diagnose_record(&rec, res()), res());
        assert!(out.actions.is_empty());
        assert!(out.unresolved.contains(&FieldKey::Author));
        assert_eq!(out.record, rec);
    }

    #[test]
    fn oracle_equal_to_old_value_is_not_an_overwrite() {
        let rec = EtdRecord::from_pairs("r", [(FieldKey::Degree, "history")]).unwrap();
        let diags = vec![FieldDiagnosis::new(FieldKey::Degree, ErrorKind::IncorrectValue, "t", "")];
        assert!(overwrite_incorrect(&rec, &diags, &oracle(&[(FieldKey::Degree, "history")])).is_empty());
    }

    #[test]
    fn sidecar_directory_and_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("r1.extracted.json"), r#"{"year":"2014","author":"N/A"}"#).unwrap();
        let o = SidecarDirOracle::new(dir.path());
        let got = o.extract("r1").unwrap();
        assert_eq!(got.get(&FieldKey::Year).map(String::as_str), Some("2014"));
        assert!(!got.contains_key(&FieldKey::Author));
        assert!(o.extract("nope").unwrap().is_empty());
        let jl = "{\"id\":\"r1\",\"fields\":{\"degree\":\"PHD\"}}\n\n";
        let m = MapOracle::parse_jsonl(jl.as_bytes()).unwrap();
        assert_eq!(m.extract("r1").unwrap().len(), 1);
        assert!(MapOracle::parse_jsonl("{oops".as_bytes()).is_err());
    }
}
