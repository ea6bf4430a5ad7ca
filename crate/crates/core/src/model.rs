//! Core table and hypothesis types.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{StrategyFlags, ValueProvenance};

/// Three-way inference label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "E")]
    Entail,
    #[serde(rename = "C")]
    Contradict,
    #[serde(rename = "N")]
    Neutral,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Entail, Label::Contradict, Label::Neutral];

    pub fn code(self) -> &'static str {
        match self {
            Label::Entail => "E",
            Label::Contradict => "C",
            Label::Neutral => "N",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} {found:?}")]
pub struct ParseEnumError {
    what: &'static str,
    found: String,
}

impl FromStr for Label {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "entail" | "entailment" => Ok(Label::Entail),
            "C" | "contradict" | "contradiction" => Ok(Label::Contradict),
            "N" | "neutral" => Ok(Label::Neutral),
            _ => Err(ParseEnumError {
                what: "label",
                found: s.to_owned(),
            }),
        }
    }
}

/// Which of the four tables of an annotation session a reference targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "orig")]
    Orig,
    A,
    B,
    C,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Orig, Variant::A, Variant::B, Variant::C];
    pub const COUNTERFACTUAL: [Variant; 3] = [Variant::A, Variant::B, Variant::C];

    pub fn code(self) -> &'static str {
        match self {
            Variant::Orig => "orig",
            Variant::A => "A",
            Variant::B => "B",
            Variant::C => "C",
        }
    }

    /// 0 for the original, 1..=3 for A, B, C.
    pub fn index(self) -> u64 {
        self as u64
    }

    pub fn is_counterfactual(self) -> bool {
        self != Variant::Orig
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Variant {
    type Err = ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "orig" | "original" => Ok(Variant::Orig),
            "A" => Ok(Variant::A),
            "B" => Ok(Variant::B),
            "C" => Ok(Variant::C),
            _ => Err(ParseEnumError {
                what: "variant",
                found: s.to_owned(),
            }),
        }
    }
}

/// Source pool a table belongs to: the training split or the evaluation pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetTag {
    Train,
    Test,
}

impl fmt::Display for DatasetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetTag::Train => "train",
            DatasetTag::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValueCell {
    pub text: String,
    pub provenance: ValueProvenance,
}

impl ValueCell {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            provenance: ValueProvenance::UNTOUCHED,
        }
    }

    pub fn with_provenance(text: impl Into<String>, provenance: ValueProvenance) -> Self {
        Self {
            text: text.into(),
            provenance,
        }
    }
}

/// One table row: an attribute key and its ordered values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    pub key: String,
    pub values: Vec<ValueCell>,
}

impl Section {
    pub fn new(key: impl Into<String>, values: Vec<ValueCell>) -> Self {
        Self {
            key: key.into(),
            values,
        }
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.values.iter().map(|c| c.text.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableInvariantError {
    #[error("table id is empty")]
    EmptyId,
    #[error("table title is empty")]
    EmptyTitle,
    #[error("table has no sections")]
    NoSections,
    #[error("section key is empty")]
    EmptyKey,
    #[error("duplicate section key {0:?}")]
    DuplicateKey(String),
}

/// A single-entity premise table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    pub table_id: String,
    pub title: String,
    pub category: String,
    pub sections: Vec<Section>,
}

impl Table {
    pub fn section(&self, key: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.key == key)
    }

    pub fn section_mut(&mut self, key: &str) -> Option<&mut Section> {
        self.sections.iter_mut().find(|s| s.key == key)
    }

    pub fn section_index(&self, key: &str) -> Option<usize> {
        self.sections.iter().position(|s| s.key == key)
    }

    pub fn has_key(&self, key: &str) -> bool {
        self.section(key).is_some()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.sections.iter().map(|s| s.key.as_str())
    }

    pub fn cell(&self, key: &str, index: usize) -> Option<&ValueCell> {
        self.section(key).and_then(|s| s.values.get(index))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, &ValueCell)> {
        self.sections
            .iter()
            .flat_map(|s| s.values.iter().map(move |c| (s.key.as_str(), c)))
    }

    /// Checks the structural invariants every persisted table satisfies.
    /// Empty sections and blank value text are left to the linter.
    pub fn validate(&self) -> Result<(), TableInvariantError> {
        if self.table_id.is_empty() {
            return Err(TableInvariantError::EmptyId);
        }
        if self.title.trim().is_empty() {
            return Err(TableInvariantError::EmptyTitle);
        }
        if self.sections.is_empty() {
            return Err(TableInvariantError::NoSections);
        }
        let mut seen = HashSet::new();
        for s in &self.sections {
            if s.key.trim().is_empty() {
                return Err(TableInvariantError::EmptyKey);
            }
            if !seen.insert(s.key.as_str()) {
                return Err(TableInvariantError::DuplicateKey(s.key.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    pub hyp_id: String,
    pub text: String,
    pub label: Label,
    #[serde(default)]
    pub strategies: StrategyFlags,
    #[serde(default)]
    pub relevant_keys: Vec<String>,
}

impl Hypothesis {
    pub fn new(hyp_id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Self {
            hyp_id: hyp_id.into(),
            text: text.into(),
            label,
            strategies: StrategyFlags::default(),
            relevant_keys: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_and_variant_codes_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.code().parse::<Label>().unwrap(), l);
        }
        for v in Variant::ALL {
            assert_eq!(v.code().parse::<Variant>().unwrap(), v);
        }
        assert!("X".parse::<Label>().is_err());
        assert!("D".parse::<Variant>().is_err());
    }

    #[test]
    fn validate_catches_duplicate_keys() {
        let t = Table {
            table_id: "T1".into(),
            title: "X".into(),
            category: String::new(),
            sections: vec![
                Section::new("Founded", vec![ValueCell::new("1792")]),
                Section::new("Founded", vec![ValueCell::new("1817")]),
            ],
        };
        assert_eq!(t.validate(), Err(TableInvariantError::DuplicateKey("Founded".into())));
    }
}
