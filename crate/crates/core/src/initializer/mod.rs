//! Automatic counterfactual drafts.
//!
//! A [`ValuePool`] indexes every value of the corpus by location and a
//! [`CategoryMap`] groups keys by value type. [`auto_initialize`] then
//! replaces each cell of a table, with a configurable probability, by a value
//! drawn from a weighted [`SourceClass`], recording the class in the cell's
//! first four provenance bits.

mod auto;
mod policy;
mod pool;
mod types;

use thiserror::Error;

pub use auto::{auto_initialize, init_session, InitOutcome, Replacement, SkippedCell};
pub use policy::InitPolicy;
pub use pool::{build_value_pool, Candidate, PoolLocation, SourceClass, ValuePool};
pub use types::{build_category_map, CategoryMap, HeuristicTagger, TypeGroup, ValueTypeTagger};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InitError {
    #[error("duplicate table id {0:?} in corpus")]
    DuplicateTableId(String),
    #[error("table {0:?} is not in the value pool")]
    OriginNotInPool(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("a session needs at least one hypothesis")]
    NoHypotheses,
}
