//! Per-field ED / ECC table, as text and as JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{detection_pairs, ecc_outcomes, kind_confusion, score_detection, score_ecc, Counts, FieldScores, StageScores};
use super::{GoldLabel, Prediction};
use crate::error::{Error, Result};
use crate::model::FieldKey;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub field: FieldKey,
    pub ed: StageScores,
    pub ecc: StageScores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fields: Vec<FieldReport>,
    /// `"gold->diagnosed"` error kind pairs among detected labels.
    #[serde(default)]
    pub kind_confusion: BTreeMap<String, usize>,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn rounded(s: StageScores) -> StageScores {
    StageScores {
        precision: round3(s.precision),
        recall: round3(s.recall),
        f1: round3(s.f1),
        counts: s.counts,
    }
}

impl EvalReport {
    pub fn from_scores(ed: &FieldScores, ecc: &FieldScores) -> Self {
        let get = |m: &FieldScores, k| m.get(&k).copied().unwrap_or_default();
        EvalReport {
            fields: FieldKey::ALL
                .into_iter()
                .map(|k| FieldReport {
                    field: k,
                    ed: get(ed, k).scores(),
                    ecc: get(ecc, k).scores(),
                })
                .collect(),
            kind_confusion: BTreeMap::new(),
        }
    }

    pub fn evaluate(preds: &[Prediction], labels: &[GoldLabel]) -> Self {
        let ed = score_detection(detection_pairs(preds), labels);
        let ecc = score_ecc(ecc_outcomes(preds), labels);
        let mut r = Self::from_scores(&ed, &ecc);
        r.kind_confusion = kind_confusion(preds, labels);
        r
    }

    pub fn row(&self, field: FieldKey) -> Option<&FieldReport> {
        self.fields.iter().find(|r| r.field == field)
    }

    /// Rows in field order with scores rounded to three decimals.
    pub fn to_json(&self) -> Result<String> {
        let rows = ordered(&self.fields)?;
        let out = EvalReport {
            fields: rows
                .into_iter()
                .map(|r| FieldReport {
                    field: r.field,
                    ed: rounded(r.ed),
                    ecc: rounded(r.ecc),
                })
                .collect(),
            kind_confusion: self.kind_confusion.clone(),
        };
        Ok(serde_json::to_string_pretty(&out)? + "\n")
    }
}

fn ordered(rows: &[FieldReport]) -> Result<Vec<FieldReport>> {
    if rows.is_empty() {
        return Err(Error::Empty("report"));
    }
    FieldKey::ALL
        .into_iter()
        .map(|k| rows.iter().find(|r| r.field == k).copied().ok_or(Error::MissingReportRow(k)))
        .collect()
}

/// Text table with one row per field: P/R/F1 for ED then ECC.
pub fn benchmark_report(rows: &[FieldReport]) -> Result<String> {
    let rows = ordered(rows)?;
    let mut out = String::new();
    let header = ["Field", "P_ED", "R_ED", "F1_ED", "P_ECC", "R_ECC", "F1_ECC"];
    writeln!(out, "{:<12}{}", header[0], header[1..].iter().map(|h| format!("{h:>8}")).collect::<String>()).ok();
    for r in rows {
        let name = r.field.as_str();
        let mut line = format!("{:<12}", capitalize(name));
        for v in [r.ed.precision, r.ed.recall, r.ed.f1, r.ecc.precision, r.ecc.recall, r.ecc.f1] {
            write!(line, "{v:>8.3}").ok();
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    cs.next().map(|c| c.to_uppercase().chain(cs).collect()).unwrap_or_default()
}

/// Sum of counts over all fields.
pub fn totals(m: &FieldScores) -> Counts {
    m.values().fold(Counts::default(), |a, c| Counts {
        tp: a.tp + c.tp,
        fp: a.fp + c.fp,
        fn_: a.fn_ + c.fn_,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perfect() -> EvalReport {
        let c: FieldScores = FieldKey::ALL.into_iter().map(|k| (k, Counts { tp: 3, fp: 0, fn_: 0 })).collect();
        EvalReport::from_scores(&c, &c)
    }

    #[test]
    fn seven_rows_in_field_order() {
        let text = benchmark_report(&perfect().fields).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("Title"));
        assert!(lines[7].starts_with("Department"));
        assert!(lines[3].ends_with("1.000"));
    }

    #[test]
    fn empty_and_partial_reports_fail() {
        assert!(matches!(benchmark_report(&[]), Err(Error::Empty(_))));
        let mut r = perfect();
        r.fields.retain(|f| f.field != FieldKey::Year);
        assert!(matches!(benchmark_report(&r.fields), Err(Error::MissingReportRow(FieldKey::Year))));
    }

    #[test]
    fn json_is_rounded_and_reparses() {
        let mut ed: FieldScores = FieldKey::ALL.into_iter().map(|k| (k, Counts { tp: 2, fp: 1, fn_: 0 })).collect();
        ed.insert(FieldKey::Title, Counts { tp: 0, fp: 0, fn_: 1 });
        let r = EvalReport::from_scores(&ed, &ed);
        let json = r.to_json().unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.row(FieldKey::Year).unwrap().ed.precision, 0.667);
        assert_eq!(back.row(FieldKey::Title).unwrap().ed.f1, 0.0);
        assert_eq!(back.row(FieldKey::Year).unwrap().ed.counts, Counts { tp: 2, fp: 1, fn_: 0 });
        assert_eq!(totals(&ed).tp, 12);
    }
}
