//! Per-field precision / recall / F1 over (record, field) pairs.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{GoldLabel, Prediction};
use crate::detection::ErrorKind;
use crate::ecc::dates::{parse_year_value, DateOrder};
use crate::model::{normalize_surface, FieldKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }

    pub fn scores(&self) -> StageScores {
        StageScores {
            precision: self.precision(),
            recall: self.recall(),
            f1: self.f1(),
            counts: *self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(flatten)]
    pub counts: Counts,
}

pub type FieldScores = BTreeMap<FieldKey, Counts>;

fn empty_scores() -> FieldScores {
    FieldKey::ALL.into_iter().map(|k| (k, Counts::default())).collect()
}

fn labeled(labels: &[GoldLabel]) -> HashMap<(&str, FieldKey), &GoldLabel> {
    labels
        .iter()
        .filter(|l| l.error_kind.is_some())
        .map(|l| ((l.record_id.as_str(), l.field), l))
        .collect()
}

/// tp: diagnosed and labeled; fp: diagnosed, not labeled; fn: labeled, not
/// diagnosed. Error kinds need not agree.
pub fn score_detection<'a>(diagnosed: impl IntoIterator<Item = (&'a str, FieldKey)>, labels: &[GoldLabel]) -> FieldScores {
    let gold = labeled(labels);
    let diagnosed: HashSet<(&str, FieldKey)> = diagnosed.into_iter().collect();
    let mut out = empty_scores();
    for (id, f) in &diagnosed {
        let c = out.get_mut(f).expect("all fields present");
        if gold.contains_key(&(*id, *f)) {
            c.tp += 1;
        } else {
            c.fp += 1;
        }
    }
    for key in gold.keys() {
        if !diagnosed.contains(key) {
            out.get_mut(&key.1).expect("all fields present").fn_ += 1;
        }
    }
    out
}

/// Surface equality after normalization; years compare on parsed parts.
pub fn values_match(field: FieldKey, predicted: Option<&str>, gold: &str) -> bool {
    let Some(p) = predicted else {
        return false;
    };
    if field == FieldKey::Year {
        if let (Ok(a), Ok(b)) = (parse_year_value(p, DateOrder::MonthFirst), parse_year_value(gold, DateOrder::MonthFirst)) {
            return a.parts == b.parts;
        }
    }
    normalize_surface(p) == normalize_surface(gold)
}

/// `acted` yields each corrected (record, field) with its final value.
/// tp: acted, labeled and restored to the gold value; fp: acted otherwise;
/// fn: labeled and not restored.
pub fn score_ecc<'a>(
    acted: impl IntoIterator<Item = (&'a str, FieldKey, Option<&'a str>)>,
    labels: &[GoldLabel],
) -> FieldScores {
    let gold = labeled(labels);
    let mut out = empty_scores();
    let mut restored: HashSet<(&str, FieldKey)> = HashSet::new();
    let mut seen = HashSet::new();
    for (id, f, value) in acted {
        if !seen.insert((id, f)) {
            continue;
        }
        let c = out.get_mut(&f).expect("all fields present");
        match gold.get(&(id, f)) {
            Some(l) if values_match(f, value, &l.true_value) => {
                c.tp += 1;
                restored.insert((id, f));
            }
            _ => c.fp += 1,
        }
    }
    for key in gold.keys() {
        if !restored.contains(key) {
            out.get_mut(&key.1).expect("all fields present").fn_ += 1;
        }
    }
    out
}

pub fn detection_pairs(preds: &[Prediction]) -> impl Iterator<Item = (&str, FieldKey)> {
    preds
        .iter()
        .flat_map(|p| p.diagnoses.iter().map(move |d| (p.record_id.as_str(), d.field)))
}

pub fn ecc_outcomes(preds: &[Prediction]) -> impl Iterator<Item = (&str, FieldKey, Option<&str>)> {
    preds.iter().flat_map(|p| {
        p.actions
            .iter()
            .map(move |a| (p.record_id.as_str(), a.field, p.record.raw(a.field)))
    })
}

/// Counts of (gold kind, first diagnosed kind) for labeled, diagnosed pairs.
pub fn kind_confusion(preds: &[Prediction], labels: &[GoldLabel]) -> BTreeMap<String, usize> {
    let gold = labeled(labels);
    let mut out = BTreeMap::new();
    for p in preds {
        let mut done = HashSet::new();
        for d in &p.diagnoses {
            if !done.insert(d.field) {
                continue;
            }
            if let Some(l) = gold.get(&(p.record_id.as_str(), d.field)) {
                let g: ErrorKind = l.error_kind.expect("labeled");
                *out.entry(format!("{g}->{}", d.kind)).or_insert(0) += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn label(id: &str, f: FieldKey, v: &str, kind: Option<ErrorKind>) -> GoldLabel {
        GoldLabel {
            record_id: id.into(),
            field: f,
            true_value: v.into(),
            error_kind: kind,
        }
    }

    #[test]
    fn advisor_row_example() {
        assert!((f1(0.92, 0.99) - 0.953).abs() < 0.001);
        assert!((f1(0.92, 0.99) - 0.950).abs() < 0.01);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let c = Counts { tp: 0, fp: 0, fn_: 2 };
        assert_eq!((c.precision(), c.recall(), c.f1()), (0.0, 0.0, 0.0));
        assert_eq!(Counts::default().f1(), 0.0);
    }

    #[test]
    fn perfect_detector() {
        let labels = vec![
            label("a", FieldKey::Year, "2015", Some(ErrorKind::Missing)),
            label("b", FieldKey::Year, "2016", None),
        ];
        let s = score_detection([("a", FieldKey::Year)], &labels);
        assert_eq!(s[&FieldKey::Year].scores().f1, 1.0);
        let s = score_detection([], &labels);
        assert_eq!(s[&FieldKey::Year], Counts { tp: 0, fp: 0, fn_: 1 });
    }

    #[test]
    fn ecc_years_compare_on_parts() {
        let labels = vec![label("a", FieldKey::Year, "05-17-2015", Some(ErrorKind::NonCanonical))];
        let s = score_ecc([("a", FieldKey::Year, Some("2015-05-17"))], &labels);
        assert_eq!(s[&FieldKey::Year], Counts { tp: 1, fp: 0, fn_: 0 });
        let s = score_ecc([("a", FieldKey::Year, Some("2015"))], &labels);
        assert_eq!(s[&FieldKey::Year], Counts { tp: 0, fp: 1, fn_: 1 });
        assert!(values_match(FieldKey::University, Some("johns hopkins university"), "Johns Hopkins University"));
    }

    fn arb_pairs() -> impl Strategy<Value = Vec<(u8, usize)>> {
        proptest::collection::vec((0u8..6, 0usize..7), 0..20)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn detection_matches_set_intersection(diag in arb_pairs(), lab in arb_pairs(), clean in arb_pairs()) {
            let key = |(r, f): (u8, usize)| (format!("r{r}"), FieldKey::ALL[f]);
            let lab: HashSet<_> = lab.into_iter().map(key).collect();
            let clean: HashSet<_> = clean.into_iter().map(key).filter(|k| !lab.contains(k)).collect();
            let diag: HashSet<_> = diag.into_iter().map(key).collect();
            let labels: Vec<GoldLabel> = lab.iter().map(|(r, f)| label(r, *f, "x", Some(ErrorKind::Missing)))
                .chain(clean.iter().map(|(r, f)| label(r, *f, "x", None)))
                .collect();
            let s = score_detection(diag.iter().map(|(r, f)| (r.as_str(), *f)), &labels);
            for f in FieldKey::ALL {
                let d: HashSet<_> = diag.iter().filter(|k| k.1 == f).collect();
                let l: HashSet<_> = lab.iter().filter(|k| k.1 == f).collect();
                let tp = d.intersection(&l).count();
                prop_assert_eq!(s[&f], Counts { tp, fp: d.len() - tp, fn_: l.len() - tp });
                prop_assert_eq!(s[&f].tp + s[&f].fn_, l.len());
                let sc = s[&f].scores();
                prop_assert!((0.0..=1.0).contains(&sc.f1));
            }
        }

        #[test]
        fn ecc_matches_set_oracle(acted in arb_pairs(), lab in arb_pairs(), right in proptest::collection::vec(any::<bool>(), 20)) {
            let key = |(r, f): (u8, usize)| (format!("r{r}"), FieldKey::ALL[f]);
            let lab: HashSet<_> = lab.into_iter().map(key).collect();
            let acted: Vec<_> = acted.into_iter().map(key).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let labels: Vec<GoldLabel> = lab.iter().map(|(r, f)| label(r, *f, "gold", Some(ErrorKind::IncorrectValue))).collect();
            let values: Vec<(String, FieldKey, &str)> = acted.iter().enumerate()
                .map(|(i, (r, f))| (r.clone(), *f, if right[i % right.len()] { "gold" } else { "other" }))
                .collect();
            let s = score_ecc(values.iter().map(|(r, f, v)| (r.as_str(), *f, Some(*v))), &labels);
            for f in FieldKey::ALL {
                let ok: HashSet<_> = values.iter().filter(|(r, g, v)| *g == f && *v == "gold" && lab.contains(&(r.clone(), f))).collect();
                let n_acted = values.iter().filter(|v| v.1 == f).count();
                let n_lab = lab.iter().filter(|k| k.1 == f).count();
                prop_assert_eq!(s[&f], Counts { tp: ok.len(), fp: n_acted - ok.len(), fn_: n_lab - ok.len() });
            }
        }
    }
}
