//! Alias dictionaries, the spelling word list and the valid year range.
//!
//! Dictionaries are tab-separated: the first column of each line is the
//! canonical name, any further columns are aliases (acronyms, colloquial
//! names). Lookup is an exact match on [`normalize_surface`] keys.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::normalize_surface;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub canonical: String,
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Match<'a> {
    CanonicalHit(&'a str),
    AliasHit(&'a str),
    NotFound,
}

impl<'a> Match<'a> {
    pub fn canonical(&self) -> Option<&'a str> {
        match *self {
            Match::CanonicalHit(c) | Match::AliasHit(c) => Some(c),
            Match::NotFound => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct IndexSlot {
    entry: usize,
    is_canonical: bool,
}

/// Canonical names with their alias sets and a normalized lookup index.
#[derive(Debug, Clone, Default)]
pub struct AliasDictionary {
    entries: Vec<DictEntry>,
    index: HashMap<String, IndexSlot>,
}

impl AliasDictionary {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses TSV text; `source_name` only labels error messages.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut dict = AliasDictionary::default();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t').map(str::trim);
            let canonical = cols.next().unwrap_or_default();
            if canonical.is_empty() || normalize_surface(canonical).is_empty() {
                return Err(Error::Malformed {
                    source_name: source_name.to_string(),
                    line: lineno + 1,
                    message: "empty canonical name".into(),
                });
            }
            let aliases: Vec<String> = cols
                .filter(|a| !normalize_surface(a).is_empty())
                .map(str::to_string)
                .collect();
            dict.insert(DictEntry {
                canonical: canonical.to_string(),
                aliases,
            })?;
        }
        Ok(dict)
    }

    fn insert(&mut self, entry: DictEntry) -> Result<()> {
        let idx = self.entries.len();
        let canon_key = normalize_surface(&entry.canonical);
        self.claim(canon_key.clone(), idx, true, &entry.canonical)?;
        for alias in &entry.aliases {
            let key = normalize_surface(alias);
            if key == canon_key {
                continue;
            }
            match self.index.get(&key) {
                // repeated alias within the same entry
                Some(slot) if slot.entry == idx => continue,
                _ => self.claim(key, idx, false, &entry.canonical)?,
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    fn claim(&mut self, key: String, entry: usize, is_canonical: bool, canonical: &str) -> Result<()> {
        if let Some(slot) = self.index.get(&key) {
            let first = self
                .entries
                .get(slot.entry)
                .map(|e| e.canonical.clone())
                .unwrap_or_else(|| canonical.to_string());
            return Err(Error::DictionaryCollision {
                key,
                first,
                second: canonical.to_string(),
            });
        }
        self.index.insert(key, IndexSlot { entry, is_canonical });
        Ok(())
    }

    pub fn lookup(&self, surface: &str) -> Match<'_> {
        match self.index.get(&normalize_surface(surface)) {
            Some(slot) => {
                let c = self.entries[slot.entry].canonical.as_str();
                if slot.is_canonical {
                    Match::CanonicalHit(c)
                } else {
                    Match::AliasHit(c)
                }
            }
            None => Match::NotFound,
        }
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn entry(&self, canonical: &str) -> Option<&DictEntry> {
        match self.index.get(&normalize_surface(canonical)) {
            Some(slot) if slot.is_canonical => Some(&self.entries[slot.entry]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_keys(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }
}

/// Lowercase word counts used to judge and correct spellings.
#[derive(Debug, Clone, Default)]
pub struct WordFrequencyList {
    counts: HashMap<String, u64>,
}

impl WordFrequencyList {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut list = WordFrequencyList::default();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| Error::Malformed {
                source_name: source_name.to_string(),
                line: lineno + 1,
                message,
            };
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected word<TAB>count".into()))?;
            let count: i64 = count
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad count {count:?}")))?;
            if count < 1 {
                return Err(malformed(format!("count must be positive, got {count}")));
            }
            let key = normalize_surface(word).to_lowercase();
            if key.is_empty() || key.contains(' ') {
                return Err(malformed(format!("not a single word: {word:?}")));
            }
            *list.counts.entry(key).or_insert(0) += count as u64;
        }
        Ok(list)
    }

    pub fn from_counts<S: AsRef<str>>(pairs: impl IntoIterator<Item = (S, u64)>) -> Self {
        let mut list = WordFrequencyList::default();
        for (w, c) in pairs {
            list.add(w.as_ref(), c);
        }
        list
    }

    /// Adds `count` occurrences of `word` (lowercased); zero counts are ignored.
    pub fn add(&mut self, word: &str, count: u64) {
        let key = normalize_surface(word).to_lowercase();
        if count == 0 || key.is_empty() || key.contains(' ') {
            return;
        }
        *self.counts.entry(key).or_insert(0) += count;
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, c)| (w.as_str(), *c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for YearRange {
    fn default() -> Self {
        YearRange {
            min_year: 1880,
            max_year: 2023,
        }
    }
}

impl YearRange {
    pub fn new(min_year: i32, max_year: i32) -> Result<Self> {
        if min_year > max_year {
            return Err(Error::Config(format!("year range {min_year}..{max_year} is empty")));
        }
        Ok(YearRange { min_year, max_year })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.min_year..=self.max_year).contains(&year)
    }
}

/// Data files compiled into the crate.
pub mod bundled {
    use super::{AliasDictionary, WordFrequencyList};

    pub const UNIVERSITIES_TSV: &str = include_str!("../data/universities.tsv");
    pub const DEGREES_TSV: &str = include_str!("../data/degrees.tsv");
    pub const DEPARTMENTS_TSV: &str = include_str!("../data/departments.tsv");
    pub const WORDS_TSV: &str = include_str!("../data/words.tsv");
    pub const TITLES_TXT: &str = include_str!("../data/titles.txt");
    pub const GIVEN_NAMES_TXT: &str = include_str!("../data/given_names.txt");
    pub const SURNAMES_TXT: &str = include_str!("../data/surnames.txt");
    pub const TITLE_MODEL_JSON: &str = include_str!("../data/title_model.json");

    pub fn universities() -> AliasDictionary {
        AliasDictionary::parse(UNIVERSITIES_TSV, "universities.tsv").expect("bundled university list is valid")
    }

    pub fn degrees() -> AliasDictionary {
        AliasDictionary::parse(DEGREES_TSV, "degrees.tsv").expect("bundled degree list is valid")
    }

    pub fn departments() -> AliasDictionary {
        AliasDictionary::parse(DEPARTMENTS_TSV, "departments.tsv").expect("bundled department list is valid")
    }

    pub fn words() -> WordFrequencyList {
        WordFrequencyList::parse(WORDS_TSV, "words.tsv").expect("bundled word list is valid")
    }

    pub fn titles() -> Vec<&'static str> {
        lines(TITLES_TXT)
    }

    pub fn given_names() -> Vec<&'static str> {
        lines(GIVEN_NAMES_TXT)
    }

    pub fn surnames() -> Vec<&'static str> {
        lines(SURNAMES_TXT)
    }

    fn lines(text: &'static str) -> Vec<&'static str> {
        text.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
    }
}
