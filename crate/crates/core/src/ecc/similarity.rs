//! Embedding-based matching of department surface names to canonical names.
//!
//! The default provider is a hashed character-trigram TF-IDF vectorizer fit
//! on the canonical names; anything implementing [`SimilarityProvider`]
//! (e.g. a sentence-embedding service) can be swapped in.

use std::collections::HashMap;

use crate::error::Result;
use crate::model::normalize_surface;

pub trait SimilarityProvider: Send + Sync {
    /// Fixed-dimension embedding of `text`.
    fn embed(&self, text: &str) -> Result<Vec<f64>>;
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn trigrams(text: &str) -> Vec<String> {
    let norm = normalize_surface(text);
    if norm.is_empty() {
        return Vec::new();
    }
    let padded: Vec<char> = format!(" {norm} ").chars().collect();
    padded.windows(3).map(|w| w.iter().collect()).collect()
}

#[derive(Debug, Clone)]
pub struct TrigramTfidf {
    dim: usize,
    idf: Vec<f64>,
}

impl TrigramTfidf {
    pub const DEFAULT_DIM: usize = 4096;

    /// Fits smoothed IDF weights (`ln((1+N)/(1+df)) + 1`) on `corpus`.
    pub fn fit<S: AsRef<str>>(corpus: &[S], dim: usize) -> Self {
        let dim = dim.max(1);
        let mut df = vec![0usize; dim];
        for doc in corpus {
            let mut buckets: Vec<usize> = trigrams(doc.as_ref()).iter().map(|t| (fnv1a(t) % dim as u64) as usize).collect();
            buckets.sort_unstable();
            buckets.dedup();
            for b in buckets {
                df[b] += 1;
            }
        }
        let n = corpus.len() as f64;
        let idf = df.iter().map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0).collect();
        TrigramTfidf { dim, idf }
    }
}

impl SimilarityProvider for TrigramTfidf {
    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.dim];
        for t in trigrams(text) {
            let b = (fnv1a(&t) % self.dim as u64) as usize;
            v[b] += self.idf[b];
        }
        Ok(v)
    }
}

/// Tokens dropped from department values before matching.
pub const DEPARTMENT_BOILERPLATE: [&str; 9] = [
    "DEPARTMENT", "DEPT", "OF", "SCHOOL", "COLLEGE", "GRADUATE", "STUDIES", "PROGRAM", "IN",
];

/// Normalizes, drops parenthesized suffixes like `(PMH)` and boilerplate tokens.
pub fn strip_department_boilerplate(value: &str) -> String {
    let mut without_parens = String::with_capacity(value.len());
    let mut depth = 0usize;
    for c in value.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            _ if depth == 0 => without_parens.push(c),
            _ => {}
        }
    }
    normalize_surface(&without_parens)
        .split(' ')
        .filter(|t| !t.is_empty() && !DEPARTMENT_BOILERPLATE.contains(t))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical names with precomputed embeddings.
pub struct CanonicalMatcher {
    provider: Box<dyn SimilarityProvider>,
    names: Vec<String>,
    embeddings: Vec<Vec<f64>>,
}

impl std::fmt::Debug for CanonicalMatcher {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CanonicalMatcher").field("names", &self.names.len()).finish()
    }
}

impl CanonicalMatcher {
    pub fn new(provider: Box<dyn SimilarityProvider>, canonicals: impl IntoIterator<Item = String>) -> Result<Self> {
        let names: Vec<String> = canonicals.into_iter().collect();
        let embeddings = names
            .iter()
            .map(|n| provider.embed(&strip_department_boilerplate(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CanonicalMatcher {
            provider,
            names,
            embeddings,
        })
    }

    /// Trigram TF-IDF matcher fit on the canonical names themselves.
    pub fn trigram(canonicals: impl IntoIterator<Item = String>) -> Result<Self> {
        let names: Vec<String> = canonicals.into_iter().collect();
        let stripped: Vec<String> = names.iter().map(|n| strip_department_boilerplate(n)).collect();
        let provider = TrigramTfidf::fit(&stripped, TrigramTfidf::DEFAULT_DIM);
        Self::new(Box::new(provider), names)
    }

    /// Every canonical with its cosine similarity to `residue`, best first
    /// (ties broken by canonical name).
    pub fn ranked(&self, residue: &str) -> Result<Vec<(String, f64)>> {
        let q = self.provider.embed(residue)?;
        let mut scored: Vec<(String, f64)> = self
            .names
            .iter()
            .zip(&self.embeddings)
            .map(|(n, e)| (n.clone(), cosine(&q, e)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(scored)
    }

    /// Argmax canonical when its similarity reaches `threshold`.
    pub fn best_match(&self, residue: &str, threshold: f64) -> Result<Option<(String, f64)>> {
        Ok(self.ranked(residue)?.into_iter().next().filter(|(_, s)| *s >= threshold))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Exact lookup of boilerplate-stripped canonical names; ambiguous keys are dropped.
#[derive(Debug, Clone, Default)]
pub struct StrippedIndex {
    map: HashMap<String, Option<String>>,
}

impl StrippedIndex {
    pub fn new<'a>(canonicals: impl IntoIterator<Item = &'a str>) -> Self {
        let mut map: HashMap<String, Option<String>> = HashMap::new();
        for c in canonicals {
            let key = strip_department_boilerplate(c);
            if key.is_empty() {
                continue;
            }
            map.entry(key)
                .and_modify(|slot| {
                    if slot.as_deref() != Some(c) {
                        *slot = None;
                    }
                })
                .or_insert_with(|| Some(c.to_string()));
        }
        StrippedIndex { map }
    }

    pub fn get(&self, residue: &str) -> Option<&str> {
        self.map.get(residue).and_then(|s| s.as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::bundled;

    struct Scaled<P>(P, f64);

    impl<P: SimilarityProvider> SimilarityProvider for Scaled<P> {
        fn embed(&self, text: &str) -> Result<Vec<f64>> {
            Ok(self.0.embed(text)?.into_iter().map(|x| x * self.1).collect())
        }
    }

    fn canonicals() -> Vec<String> {
        bundled::departments().entries().iter().map(|e| e.canonical.clone()).collect()
    }

    #[test]
    fn self_similarity_is_one() {
        let names = canonicals();
        let p = TrigramTfidf::fit(&names, TrigramTfidf::DEFAULT_DIM);
        for s in ["Computer Science", "x", "Zz Unseen Words Qq"] {
            let e = p.embed(s).unwrap();
            assert!((cosine(&e, &e) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn strips_boilerplate_and_parenthesized_acronyms() {
        assert_eq!(strip_department_boilerplate("Dept. of Computer Science"), "COMPUTER SCIENCE");
        assert_eq!(strip_department_boilerplate("CS Department"), "CS");
        assert_eq!(strip_department_boilerplate("Public Health (PMH)"), "PUBLIC HEALTH");
        assert_eq!(strip_department_boilerplate("Graduate Program in English"), "ENGLISH");
    }

    #[test]
    fn near_duplicates_match_and_unrelated_do_not() {
        let m = CanonicalMatcher::trigram(canonicals()).unwrap();
        for (q, want) in [("COMPUTER SCIENCES", "Computer Science"), ("BIOLOGICAL SCIENCE", "Biological Sciences")] {
            let (name, score) = m.best_match(q, 0.90).unwrap().unwrap();
            assert_eq!(name, want);
            assert!(score >= 0.90);
        }
        assert!(m.best_match("HISTORY OF ART", 0.90).unwrap().is_none());
        assert!(m.best_match("UNDERWATER BASKET WEAVING", 0.90).unwrap().is_none());
    }

    #[test]
    fn argmax_is_scale_invariant() {
        let names = canonicals();
        let base = CanonicalMatcher::trigram(names.clone()).unwrap();
        let provider = TrigramTfidf::fit(
            &names.iter().map(|n| strip_department_boilerplate(n)).collect::<Vec<_>>(),
            TrigramTfidf::DEFAULT_DIM,
        );
        let scaled = CanonicalMatcher::new(Box::new(Scaled(provider, 37.5)), names).unwrap();
        for q in ["ELECTRICAL ENGINEERNG", "MUSIK", "HISTORY ART", "BIOLOGICAL SCIENCE", "POLITICS"] {
            assert_eq!(base.ranked(q).unwrap()[0].0, scaled.ranked(q).unwrap()[0].0, "{q}");
        }
    }

    #[test]
    fn stripped_index_drops_ambiguous_keys() {
        let idx = StrippedIndex::new(["Gender Studies", "Gender", "History"]);
        assert_eq!(idx.get("GENDER"), None);
        assert_eq!(idx.get("HISTORY"), Some("History"));
    }
}
