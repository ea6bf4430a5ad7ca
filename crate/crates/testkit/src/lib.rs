//! Fixtures, generators and independent oracles shared by the test suites.

/// Returns `Err(message)` from a check when the condition fails.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub mod analysis;
pub mod api;
pub mod checks;
pub mod corpus;
pub mod gen;
pub mod oracle;
pub mod reference;

pub use corpus::{toy_corpus, toy_group, toy_hypotheses, DATE_FIXTURE, TOY_KEY_GROUPS};
pub use gen::{random_command, toy_category_map, toy_session};
pub use reference::{RefErr, RefModel};
