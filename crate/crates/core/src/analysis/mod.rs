//! Accuracy and accuracy-drop reports over model predictions.
//!
//! Predictions join to annotations through export pair ids. A
//! counterfactual pair is compared against the original pair with the same
//! hypothesis id in the same session.

mod effect;
mod records;
mod scalar;
mod stats;

use thiserror::Error;

pub use effect::{
    accuracy, percentage, provenance_effect, relevant_prefixes, strategy_effect, variant_effect, EffectReport,
    EffectRow, REPORT_CSV_HEADER,
};
pub use records::{read_predictions, write_predictions, PairIndex, PairRef, PredictionRecord, PREDICTIONS_HEADER};
pub use scalar::Scalar;
pub use stats::{dataset_stats, DatasetStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("no records selected")]
    EmptySelection,
    #[error("pair {0:?} does not join to an annotated pair")]
    JoinFailure(String),
    #[error("pair {0:?} is listed under the wrong subset")]
    SubsetMismatch(String),
    #[error("pair {0:?} has more than one prediction")]
    DuplicateRecord(String),
    #[error("predictions line {line}: {message}")]
    Malformed { line: usize, message: String },
}
