//! Counterfactual table perturbation.
//!
//! Entity tables are parsed from InfoTabS-style JSON, perturbed by a seeded
//! initializer that shuffles type-compatible values from a pool, refined
//! through validated edit commands, checkpointed to disk and exported as a
//! dataset. The analysis module turns model predictions on that dataset into
//! per-strategy and per-provenance accuracy drops.
//!
//! Every value cell carries a 7-bit provenance record and every
//! hypothesis a 6-bit strategy record; both travel as bitstrings.

pub mod analysis;
pub mod codec;
pub mod editor;
pub mod initializer;
pub mod model;
pub mod paragraph;
pub mod store;
pub mod table_json;
pub mod tsv;

use num_rational::Ratio;

pub use codec::{Strategy, StrategyFlags, ValueProvenance};
pub use editor::{apply_edit, AnnotationSession, CellRef, EditCommand, EditError};
pub use initializer::{CategoryMap, InitPolicy, TypeGroup, ValuePool};
pub use model::{Hypothesis, Label, Section, Table, ValueCell, Variant};
pub use store::SessionStore;

/// Exact rational used for reproducible percentages.
pub type Exact = Ratio<i64>;

pub type EffectReport = analysis::EffectReport<f64>;
pub type EffectRow = analysis::EffectRow<f64>;
pub type ExactEffectReport = analysis::EffectReport<Exact>;
pub type ExactEffectRow = analysis::EffectRow<Exact>;
