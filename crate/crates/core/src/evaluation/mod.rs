//! Benchmark construction and scoring.

pub mod benchmark;
pub mod metrics;
pub mod noise;
pub mod report;
pub mod sampling;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::detection::{ErrorKind, FieldDiagnosis};
use crate::ecc::CorrectionAction;
use crate::error::{Error, Result};
use crate::model::{EtdRecord, FieldKey};

pub use metrics::{score_detection, score_ecc, Counts, FieldScores, StageScores};
pub use noise::{inject_noise, FieldNoise, NoiseConfig};
pub use report::{benchmark_report, EvalReport, FieldReport};
pub use sampling::{stratified_sample, SampleCriterion};

/// What the benchmark did to one field of one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub record_id: String,
    pub field: FieldKey,
    pub true_value: String,
    pub error_kind: Option<ErrorKind>,
}

pub fn read_labels(reader: impl Read) -> Result<Vec<GoldLabel>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out: Vec<GoldLabel> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, row) in rdr.deserialize().enumerate() {
        let label: GoldLabel = row?;
        if !seen.insert((label.record_id.clone(), label.field)) {
            return Err(Error::Malformed {
                source_name: "labels".into(),
                line: i + 2,
                message: format!("duplicate label for {}/{}", label.record_id, label.field),
            });
        }
        out.push(label);
    }
    Ok(out)
}

pub fn write_labels(w: impl Write, labels: &[GoldLabel]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if labels.is_empty() {
        wtr.write_record(["record_id", "field", "true_value", "error_kind"])?;
    }
    for l in labels {
        wtr.serialize(l)?;
    }
    wtr.flush().map_err(|e| Error::io("<labels>", e))?;
    Ok(())
}

/// Pipeline output for one record, as written by `fix`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub record_id: String,
    pub diagnoses: Vec<FieldDiagnosis>,
    pub actions: Vec<CorrectionAction>,
    pub unresolved: Vec<FieldKey>,
    pub record: EtdRecord,
}
