//! Seeded stratified sampling of records.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ecc::dates::{parse_year_value, DateOrder};
use crate::error::{Error, Result};
use crate::model::{normalize_surface, EtdRecord, FieldKey};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum SampleCriterion {
    /// `n` records uniformly.
    Random { n: usize },
    /// `universities` random universities, then `per` records from each.
    ByUniversity { universities: usize, per: usize },
    /// `per` records from each year in `from..=to`.
    ByYear { from: i32, to: i32, per: usize },
    /// `stem` STEM and `non_stem` other departments, `per` records each.
    ByDepartment { stem: usize, non_stem: usize, per: usize },
    /// `degrees` random degree names, then `per` records each.
    ByDegree { degrees: usize, per: usize },
}

const STEM_STEMS: [&str; 24] = [
    "ENGINEER", "SCIENCE", "MATHEMAT", "PHYSIC", "CHEMI", "BIOLOG", "COMPUT", "STATISTIC", "GEOLOG", "ASTRONOM",
    "GEOSCIEN", "ENVIRONMENT", "ECOLOG", "NEUROSCIEN", "BIOCHEM", "GENETIC", "MICROBIO", "PHARMAC", "AGRONOM",
    "ATMOSPHER", "OCEANOGRAPH", "INFORMATION", "TECHNOLOG", "MATERIAL",
];

/// Keyword test for science, technology, engineering and mathematics
/// departments. "Political Science" style social sciences are excluded.
pub fn is_stem(department: &str) -> bool {
    let n = normalize_surface(department);
    const SOCIAL: [&str; 6] = ["POLITICAL", "SOCIAL", "LIBRARY", "BEHAVIORAL", "EDUCATION", "HEALTH SCIENCE"];
    if SOCIAL.iter().any(|s| n.contains(s)) {
        return false;
    }
    STEM_STEMS.iter().any(|s| n.contains(s))
}

fn year_of(rec: &EtdRecord) -> Option<i32> {
    parse_year_value(rec.raw(FieldKey::Year)?, DateOrder::MonthFirst)
        .ok()
        .map(|p| p.parts.year())
}

fn group_by(records: &[EtdRecord], key: impl Fn(&EtdRecord) -> Option<String>) -> BTreeMap<String, Vec<usize>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if let Some(k) = key(r) {
            groups.entry(k).or_default().push(i);
        }
    }
    groups
}

fn take(pool: &[usize], k: usize, rng: &mut ChaCha8Rng, what: &str) -> Vec<usize> {
    if pool.len() < k {
        log::info!("{what}: only {} of {k} requested records available", pool.len());
    }
    pool.choose_multiple(rng, k.min(pool.len())).copied().collect()
}

fn pick_strata<'a>(
    groups: &'a BTreeMap<String, Vec<usize>>,
    keys: &[&'a String],
    n: usize,
    per: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    if keys.len() < n {
        log::info!("only {} of {n} requested strata available", keys.len());
    }
    let chosen: Vec<&&String> = keys.choose_multiple(rng, n.min(keys.len())).collect();
    chosen.into_iter().flat_map(|k| take(&groups[*k], per, rng, k)).collect()
}

fn field_key(f: FieldKey) -> impl Fn(&EtdRecord) -> Option<String> {
    move |r| r.raw(f).map(normalize_surface).filter(|s| !s.is_empty())
}

/// Returns the sampled records in corpus order; deterministic for a seed.
pub fn stratified_sample(records: &[EtdRecord], criterion: &SampleCriterion, seed: u64) -> Result<Vec<EtdRecord>> {
    if records.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..records.len()).collect();
    let picked: Vec<usize> = match *criterion {
        SampleCriterion::Random { n } => take(&all, n, &mut rng, "random"),
        SampleCriterion::ByUniversity { universities, per } => {
            let g = group_by(records, field_key(FieldKey::University));
            let keys: Vec<&String> = g.keys().collect();
            pick_strata(&g, &keys, universities, per, &mut rng)
        }
        SampleCriterion::ByDegree { degrees, per } => {
            let g = group_by(records, field_key(FieldKey::Degree));
            let keys: Vec<&String> = g.keys().collect();
            pick_strata(&g, &keys, degrees, per, &mut rng)
        }
        SampleCriterion::ByYear { from, to, per } => {
            let g = group_by(records, |r| year_of(r).map(|y| format!("{y:04}")));
            (from..=to)
                .flat_map(|y| {
                    let pool = g.get(&format!("{y:04}")).cloned().unwrap_or_default();
                    take(&pool, per, &mut rng, &y.to_string())
                })
                .collect()
        }
        SampleCriterion::ByDepartment { stem, non_stem, per } => {
            let g = group_by(records, field_key(FieldKey::Department));
            let (s, o): (Vec<&String>, Vec<&String>) = g.keys().partition(|k| is_stem(k));
            let mut out = pick_strata(&g, &s, stem, per, &mut rng);
            out.extend(pick_strata(&g, &o, non_stem, per, &mut rng));
            out
        }
    };
    let set: BTreeSet<usize> = picked.into_iter().collect();
    Ok(set.into_iter().map(|i| records[i].clone()).collect())
}

/// Union of several samples, first occurrence order, no duplicate ids.
pub fn combine_samples(samples: impl IntoIterator<Item = Vec<EtdRecord>>) -> Vec<EtdRecord> {
    let mut seen = std::collections::HashSet::new();
    samples
        .into_iter()
        .flatten()
        .filter(|r| seen.insert(r.id.clone()))
        .collect()
}
