//! Annotation sessions and the edit state machine.
//!
//! [`apply_edit`] is a pure transition from one session to the next. The
//! original table never changes; provenance bits 5-7 are set by copy, add
//! and text-edit commands and are never cleared.

mod apply;
mod command;
pub mod dates;
mod lint;
mod session;

pub use apply::{apply_edit, validate_move, EditError, MoveCheck};
pub use command::{CellRef, EditCommand};
pub use lint::{
    default_rules, lint_constraints, lint_session, parse_rules, ConstraintRule, LintEntry, LintKind, LintReport,
    RuleError,
};
pub use session::{AnnotationSession, DanglingKey, Drafts, HypothesisSet, SessionError};
