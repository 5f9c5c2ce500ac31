//! Detection, correction and canonicalization of errors in the seven key
//! metadata fields of electronic thesis and dissertation records, with a
//! versioned record store and an evaluation harness.

pub mod detection;
pub mod dictionaries;
pub mod distance;
pub mod ecc;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod model;
pub mod resources;
pub mod store;

pub use error::{Error, Result};
pub use model::{is_missing, normalize_surface, DateParts, EtdRecord, FieldKey, FieldValue, Provenance};
pub use resources::{PipelineConfig, Resources};
