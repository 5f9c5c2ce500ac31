//! Browser bindings: single-field cleaning, department similarity ranking and
//! year / contributor parsing. Every export returns a JSON string.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use etd_quality::detection::{diagnose_field, FieldDiagnosis};
use etd_quality::ecc::{
    apply_ecc, parse_contributor, parse_year_value, spell_fix_department, strip_department_boilerplate, CorrectionAction,
};
use etd_quality::{EtdRecord, FieldKey, FieldValue, Resources};

#[derive(Debug, Serialize)]
pub struct Cleaned {
    pub field: FieldKey,
    pub input: String,
    pub diagnoses: Vec<FieldDiagnosis>,
    pub actions: Vec<CorrectionAction>,
    pub output: Option<String>,
    pub role: Option<String>,
    pub unresolved: bool,
}

#[derive(Debug, Serialize)]
pub struct Ranked {
    pub residue: String,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Serialize)]
pub struct Candidate {
    pub name: String,
    pub score: f64,
    pub accepted: bool,
}

#[wasm_bindgen]
pub struct Demo {
    res: Resources,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsError> {
        Ok(Demo {
            res: Resources::bundled().map_err(|e| JsError::new(&e.to_string()))?,
        })
    }

    /// Diagnoses and corrects one field value.
    #[wasm_bindgen(js_name = cleanField)]
    pub fn clean_field_js(&self, field: &str, value: &str) -> Result<String, JsError> {
        let out = self.clean_field(field, value).map_err(|e| JsError::new(&e))?;
        Ok(serde_json::to_string(&out)?)
    }

    /// Top `limit` canonical departments for a value, marking those at or
    /// above `threshold`.
    #[wasm_bindgen(js_name = rankDepartments)]
    pub fn rank_departments_js(&self, value: &str, threshold: f64, limit: usize) -> Result<String, JsError> {
        let out = self.rank_departments(value, threshold, limit).map_err(|e| JsError::new(&e))?;
        Ok(serde_json::to_string(&out)?)
    }

    /// `kind` is `"year"` or `"contributor"`.
    #[wasm_bindgen(js_name = parseValue)]
    pub fn parse_value_js(&self, kind: &str, value: &str) -> Result<String, JsError> {
        let out = self.parse_value(kind, value).map_err(|e| JsError::new(&e))?;
        Ok(out.to_string())
    }
}

impl Demo {
    pub fn clean_field(&self, field: &str, value: &str) -> Result<Cleaned, String> {
        let field: FieldKey = field.parse().map_err(|e| format!("{e}"))?;
        let mut rec = EtdRecord::new("demo").map_err(|e| e.to_string())?;
        rec.set(field, FieldValue::original(value));
        let diagnoses = diagnose_field(&rec.id, field, rec.get(field), &self.res);
        let out = apply_ecc(&rec, &diagnoses, &self.res);
        let v = out.record.get(field);
        Ok(Cleaned {
            field,
            input: value.to_string(),
            diagnoses,
            actions: out.actions,
            output: v.raw.clone(),
            role: v.role.clone(),
            unresolved: out.unresolved.contains(&field),
        })
    }

    pub fn rank_departments(&self, value: &str, threshold: f64, limit: usize) -> Result<Ranked, String> {
        let fixed = spell_fix_department(value, &self.res.words).unwrap_or_else(|| value.to_string());
        let residue = strip_department_boilerplate(&fixed);
        if residue.is_empty() {
            return Ok(Ranked { residue, candidates: vec![] });
        }
        let ranked = self.res.matcher.ranked(&residue).map_err(|e| e.to_string())?;
        Ok(Ranked {
            candidates: ranked
                .into_iter()
                .take(limit)
                .map(|(name, score)| Candidate {
                    name,
                    score,
                    accepted: score >= threshold,
                })
                .collect(),
            residue,
        })
    }

    pub fn parse_value(&self, kind: &str, value: &str) -> Result<serde_json::Value, String> {
        match kind {
            "year" => {
                let p = parse_year_value(value, self.res.date_order).map_err(|e| e.to_string())?;
                Ok(json!({
                    "year": p.parts.year(),
                    "month": p.parts.month(),
                    "day": p.parts.day(),
                    "format": format!("{:?}", p.format),
                    "canonical": p.parts.to_iso(),
                    "in_range": self.res.years.contains(p.parts.year()),
                }))
            }
            "contributor" => {
                let p = parse_contributor(value);
                Ok(json!({ "name": p.name, "role": p.role }))
            }
            other => Err(format!("unknown kind {other:?}")),
        }
    }
}
