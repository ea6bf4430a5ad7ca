//! `para` rendering: one sentence per table row.

use thiserror::Error;

use crate::model::Table;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParagraphError {
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

/// Renders `t` as "The {key} of {title} is {values}." sentences joined by
/// single spaces, in section order. With `keys_filter`, only the named
/// sections are rendered.
pub fn table_to_paragraph(t: &Table, keys_filter: Option<&[String]>) -> Result<String, ParagraphError> {
    if let Some(filter) = keys_filter {
        if let Some(missing) = filter.iter().find(|k| !t.has_key(k)) {
            return Err(ParagraphError::UnknownKey(missing.clone()));
        }
    }
    let sentences: Vec<String> = t
        .sections
        .iter()
        .filter(|s| keys_filter.is_none_or(|f| f.contains(&s.key)))
        .filter(|s| !s.values.is_empty())
        .map(|s| {
            let values: Vec<&str> = s.texts().collect();
            format!("The {} of {} is {}.", s.key, t.title, join_values(&values))
        })
        .collect();
    Ok(sentences.join(" "))
}

/// "a", "a and b", "a, b and c".
fn join_values(values: &[&str]) -> String {
    match values {
        [] => String::new(),
        [one] => (*one).to_owned(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}
