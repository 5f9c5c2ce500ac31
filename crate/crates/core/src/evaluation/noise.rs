//! Seeded corruption of clean records into a labeled benchmark.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GoldLabel;
use crate::detection::ErrorKind;
use crate::dictionaries::WordFrequencyList;
use crate::error::{Error, Result};
use crate::model::{EtdRecord, FieldKey, FieldValue};
use crate::resources::Resources;

/// Corruption probabilities for one field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldNoise {
    pub drop: f64,
    pub typo: f64,
    pub acronymize: f64,
    pub wrong_value: f64,
}

impl FieldNoise {
    fn total(&self) -> f64 {
        self.drop + self.typo + self.acronymize + self.wrong_value
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub seed: u64,
    #[serde(default)]
    pub fields: BTreeMap<FieldKey, FieldNoise>,
}

impl NoiseConfig {
    pub fn uniform(seed: u64, noise: FieldNoise) -> Self {
        NoiseConfig {
            seed,
            fields: FieldKey::ALL.into_iter().map(|k| (k, noise)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (k, n) in &self.fields {
            let ps = [n.drop, n.typo, n.acronymize, n.wrong_value];
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Config(format!("{k}: probabilities must lie in [0, 1]")));
            }
            if n.total() > 1.0 + 1e-12 {
                return Err(Error::Config(format!("{k}: probabilities sum to {} > 1", n.total())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Corruption {
    Drop,
    Typo,
    Acronymize,
    WrongValue,
}

const TYPO_ATTEMPTS: usize = 32;

/// One random insertion, deletion, substitution or adjacent swap.
fn damerau_edit(word: &[char], rng: &mut impl Rng) -> Vec<char> {
    let mut w = word.to_vec();
    match rng.gen_range(0..4) {
        0 => {
            let c = char::from(b'a' + rng.gen_range(0..26u8));
            let i = rng.gen_range(0..=w.len());
            w.insert(i, c);
        }
        1 => {
            w.remove(rng.gen_range(0..w.len()));
        }
        2 => {
            let c = char::from(b'a' + rng.gen_range(0..26u8));
            let i = rng.gen_range(0..w.len());
            w[i] = c;
        }
        _ => {
            let i = rng.gen_range(0..w.len() - 1);
            w.swap(i, i + 1);
        }
    }
    w
}

/// Applies a typo to one token of ≥ 4 letters so that it becomes a non-word.
pub fn typo(value: &str, words: &WordFrequencyList, rng: &mut impl Rng) -> Option<String> {
    let tokens: Vec<&str> = value.split(' ').collect();
    let candidates: Vec<usize> = (0..tokens.len())
        .filter(|&i| tokens[i].chars().count() >= 4 && tokens[i].chars().all(char::is_alphabetic))
        .collect();
    let &pick = candidates.choose(rng)?;
    let chars: Vec<char> = tokens[pick].chars().collect();
    for _ in 0..TYPO_ATTEMPTS {
        let edited: String = damerau_edit(&chars, rng).into_iter().collect();
        let lower = edited.to_lowercase();
        if edited != tokens[pick] && !lower.chars().all(|c| c.is_ascii_digit()) && !words.contains(&lower) {
            let mut out: Vec<&str> = tokens.clone();
            out[pick] = &edited;
            return Some(out.join(" "));
        }
    }
    None
}

fn alias_for(field: FieldKey, value: &str, res: &Resources, rng: &mut impl Rng) -> Option<String> {
    let d = match field {
        FieldKey::University => &res.universities,
        FieldKey::Degree => &res.degrees,
        FieldKey::Department => &res.departments,
        _ => return None,
    };
    let canonical = d.lookup(value).canonical()?;
    d.entry(canonical)?.aliases.choose(rng).cloned()
}

/// Corrupts fields by the configured probabilities. Returns the corrupted
/// records and one label per corruption actually applied.
pub fn inject_noise(gold: &[EtdRecord], cfg: &NoiseConfig, res: &Resources) -> Result<(Vec<EtdRecord>, Vec<GoldLabel>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = gold.to_vec();
    let mut labels = Vec::new();
    for (i, rec) in gold.iter().enumerate() {
        for field in FieldKey::ALL {
            let u: f64 = rng.gen();
            let Some(n) = cfg.fields.get(&field) else { continue };
            let pick = [
                (Corruption::Drop, n.drop),
                (Corruption::Typo, n.typo),
                (Corruption::Acronymize, n.acronymize),
                (Corruption::WrongValue, n.wrong_value),
            ]
            .into_iter()
            .scan(0.0, |acc, (c, p)| {
                *acc += p;
                Some((c, *acc))
            })
            .find(|(_, upto)| u < *upto)
            .map(|(c, _)| c);
            let Some(kind) = pick else { continue };
            let Some(original) = rec.raw(field).filter(|v| !res.sentinels.is_missing_raw(Some(v))) else {
                continue;
            };
            let (new, label) = match kind {
                Corruption::Drop => (None, ErrorKind::Missing),
                Corruption::Typo => match typo(original, &res.words, &mut rng) {
                    Some(t) => (Some(t), ErrorKind::Misspelling),
                    None => {
                        log::info!("{}/{field}: no typo possible, left unchanged", rec.id);
                        continue;
                    }
                },
                Corruption::Acronymize => match alias_for(field, original, res, &mut rng) {
                    Some(a) => (Some(a), ErrorKind::NonCanonical),
                    None => {
                        log::info!("{}/{field}: no alias available, left unchanged", rec.id);
                        continue;
                    }
                },
                Corruption::WrongValue => {
                    let donor = (0..TYPO_ATTEMPTS).find_map(|_| {
                        if gold.len() < 2 {
                            return None;
                        }
                        let j = rng.gen_range(0..gold.len());
                        let g = FieldKey::ALL[rng.gen_range(0..FieldKey::ALL.len())];
                        let v = gold[j].raw(g)?;
                        (j != i && g != field && v != original && !res.sentinels.is_missing_raw(Some(v)))
                            .then(|| v.to_string())
                    });
                    match donor {
                        Some(v) => (Some(v), ErrorKind::IncorrectValue),
                        None => {
                            log::info!("{}/{field}: no donor value, left unchanged", rec.id);
                            continue;
                        }
                    }
                }
            };
            out[i].set(field, new.map(FieldValue::original).unwrap_or_default());
            labels.push(GoldLabel {
                record_id: rec.id.clone(),
                field,
                true_value: original.to_string(),
                error_kind: Some(label),
            });
        }
    }
    Ok((out, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::benchmark::generate_clean_records;

    fn res() -> &'static Resources {
        crate::resources::tests::shared()
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let gold = generate_clean_records(50, 1, res());
        let (out, labels) = inject_noise(&gold, &NoiseConfig::uniform(9, FieldNoise::default()), res()).unwrap();
        assert_eq!(out, gold);
        assert!(labels.is_empty());
    }

    #[test]
    fn drop_everything_on_year() {
        let gold = generate_clean_records(172, 2, res());
        let mut cfg = NoiseConfig::default();
        cfg.fields.insert(FieldKey::Year, FieldNoise { drop: 1.0, ..Default::default() });
        let (out, labels) = inject_noise(&gold, &cfg, res()).unwrap();
        assert_eq!(labels.len(), 172);
        assert!(labels.iter().all(|l| l.error_kind == Some(ErrorKind::Missing)));
        assert!(out.iter().all(|r| r.raw(FieldKey::Year).is_none()));
    }

    #[test]
    fn seeded_runs_are_identical_and_labels_are_faithful() {
        let gold = generate_clean_records(120, 3, res());
        let cfg = NoiseConfig::uniform(
            42,
            FieldNoise {
                drop: 0.1,
                typo: 0.1,
                acronymize: 0.1,
                wrong_value: 0.1,
            },
        );
        let a = inject_noise(&gold, &cfg, res()).unwrap();
        let b = inject_noise(&gold, &cfg, res()).unwrap();
        assert_eq!(a, b);
        let (out, labels) = a;
        assert!(!labels.is_empty());
        for l in &labels {
            let rec = out.iter().find(|r| r.id == l.record_id).unwrap();
            let g = gold.iter().find(|r| r.id == l.record_id).unwrap();
            assert_eq!(g.raw(l.field), Some(l.true_value.as_str()));
            assert_ne!(rec.raw(l.field), g.raw(l.field));
            if l.error_kind == Some(ErrorKind::Misspelling) {
                let changed: Vec<_> = rec.raw(l.field).unwrap().split(' ').filter(|t| !res().words.contains(&t.to_lowercase())).collect();
                assert!(!changed.is_empty());
            }
        }
        let untouched = out
            .iter()
            .zip(&gold)
            .flat_map(|(o, g)| FieldKey::ALL.into_iter().filter(move |k| o.raw(*k) != g.raw(*k)).map(move |k| (o.id.clone(), k)))
            .count();
        assert_eq!(untouched, labels.len());
    }

    #[test]
    fn invalid_probabilities_are_rejected() {
        let cfg = NoiseConfig::uniform(0, FieldNoise { drop: 0.6, typo: 0.6, ..Default::default() });
        assert!(cfg.validate().is_err());
        let cfg = NoiseConfig::uniform(0, FieldNoise { drop: -0.1, ..Default::default() });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn acronymize_without_dictionary_is_a_no_op() {
        let gold = generate_clean_records(10, 4, res());
        let mut cfg = NoiseConfig::default();
        cfg.fields.insert(FieldKey::Title, FieldNoise { acronymize: 1.0, ..Default::default() });
        let (out, labels) = inject_noise(&gold, &cfg, res()).unwrap();
        assert_eq!(out, gold);
        assert!(labels.is_empty());
    }
}
