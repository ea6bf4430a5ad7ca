//! Common-sense constraint and structure checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dates::earliest_date;
use super::AnnotationSession;
use crate::model::{Table, Variant};

/// `earlier_key` values must not postdate `later_key` values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRule {
    pub earlier_key: String,
    pub later_key: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rules file: {0}")]
    Malformed(String),
    #[error("rule compares {0:?} with itself")]
    SameKey(String),
}

impl ConstraintRule {
    pub fn new(earlier_key: &str, later_key: &str, description: &str) -> Result<Self, RuleError> {
        if earlier_key == later_key {
            return Err(RuleError::SameKey(earlier_key.to_owned()));
        }
        Ok(Self {
            earlier_key: earlier_key.to_owned(),
            later_key: later_key.to_owned(),
            description: description.to_owned(),
        })
    }
}

/// Birth before death and marriage, marriage before death, recording before
/// release.
pub fn default_rules() -> Vec<ConstraintRule> {
    [
        ("Born", "Died", "born before died"),
        ("Born", "Marriage", "born before marriage"),
        ("Marriage", "Died", "marriage before died"),
        ("Recorded", "Released", "recorded before released"),
    ]
    .into_iter()
    .map(|(a, b, d)| ConstraintRule::new(a, b, d).expect("distinct keys"))
    .collect()
}

/// Parses a rules file: a JSON list of `{earlier_key, later_key, description}`.
pub fn parse_rules(json: &str) -> Result<Vec<ConstraintRule>, RuleError> {
    let rules: Vec<ConstraintRule> = serde_json::from_str(json).map_err(|e| RuleError::Malformed(e.to_string()))?;
    for r in &rules {
        if r.earlier_key == r.later_key {
            return Err(RuleError::SameKey(r.earlier_key.clone()));
        }
    }
    Ok(rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LintKind {
    /// A date-ordering rule is broken.
    ConstraintViolation,
    /// A rule applies but a date could not be read.
    Unverifiable,
    EmptySection,
    EmptyValueText,
    DanglingRelevantKey,
}

impl LintKind {
    /// Structural problems block export; date findings do not.
    pub fn is_structural(self) -> bool {
        matches!(
            self,
            LintKind::EmptySection | LintKind::EmptyValueText | LintKind::DanglingRelevantKey
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintEntry {
    pub variant: Option<Variant>,
    pub kind: LintKind,
    pub keys: Vec<String>,
    pub values: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintReport {
    pub entries: Vec<LintEntry>,
}

impl LintReport {
    pub fn violations(&self) -> impl Iterator<Item = &LintEntry> {
        self.entries.iter().filter(|e| e.kind == LintKind::ConstraintViolation)
    }

    pub fn has_violations(&self) -> bool {
        self.violations().next().is_some()
    }

    /// Structural issues in the editable drafts or hypotheses.
    pub fn blocking(&self) -> impl Iterator<Item = &LintEntry> {
        self.entries
            .iter()
            .filter(|e| e.kind.is_structural() && e.variant != Some(Variant::Orig))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One line per entry.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                let variant = e.variant.map(|v| v.code()).unwrap_or("-");
                let kind = serde_json::to_value(e.kind).expect("enum serializes");
                format!(
                    "{variant}\t{}\t{}\t{}\n",
                    kind.as_str().unwrap_or_default(),
                    e.keys.join(";"),
                    e.message
                )
            })
            .collect()
    }
}

/// Checks a table against date rules and for structural problems.
///
/// A rule applies when both keys are present. It is violated when the
/// earliest date under `earlier_key` is after the earliest date under
/// `later_key`; if either side has no readable date the rule yields an
/// informational `unverifiable` entry instead.
pub fn lint_constraints(t: &Table, rules: &[ConstraintRule]) -> LintReport {
    let mut entries = Vec::new();
    for s in &t.sections {
        if s.values.is_empty() {
            entries.push(LintEntry {
                variant: None,
                kind: LintKind::EmptySection,
                keys: vec![s.key.clone()],
                values: Vec::new(),
                message: format!("section {:?} has no values", s.key),
            });
        }
        for (i, c) in s.values.iter().enumerate() {
            if c.text.trim().is_empty() {
                entries.push(LintEntry {
                    variant: None,
                    kind: LintKind::EmptyValueText,
                    keys: vec![s.key.clone()],
                    values: vec![c.text.clone()],
                    message: format!("value {i} of {:?} is blank", s.key),
                });
            }
        }
    }

    for rule in rules {
        let (Some(early), Some(late)) = (t.section(&rule.earlier_key), t.section(&rule.later_key)) else {
            continue;
        };
        let keys = vec![rule.earlier_key.clone(), rule.later_key.clone()];
        let values: Vec<String> = early.texts().chain(late.texts()).map(str::to_owned).collect();
        match (earliest_date(early.texts()), earliest_date(late.texts())) {
            (Some(a), Some(b)) if a > b => entries.push(LintEntry {
                variant: None,
                kind: LintKind::ConstraintViolation,
                keys,
                values,
                message: format!(
                    "{} ({a}) is after {} ({b}): {}",
                    rule.earlier_key, rule.later_key, rule.description
                ),
            }),
            (Some(_), Some(_)) => {}
            _ => entries.push(LintEntry {
                variant: None,
                kind: LintKind::Unverifiable,
                keys,
                values,
                message: format!(
                    "cannot read dates to check {} before {}",
                    rule.earlier_key, rule.later_key
                ),
            }),
        }
    }
    LintReport { entries }
}

/// Lints all four tables of a session plus hypothesis relevant-key marks.
pub fn lint_session(s: &AnnotationSession, rules: &[ConstraintRule]) -> LintReport {
    let mut entries = Vec::new();
    for v in Variant::ALL {
        entries.extend(lint_constraints(s.table(v), rules).entries.into_iter().map(|mut e| {
            e.variant = Some(v);
            e
        }));
    }
    entries.extend(s.dangling_relevant_keys().into_iter().map(|d| LintEntry {
        variant: Some(d.variant),
        kind: LintKind::DanglingRelevantKey,
        keys: vec![d.key.clone()],
        values: Vec::new(),
        message: format!("hypothesis {:?} marks missing key {:?}", d.hyp_id, d.key),
    }));
    LintReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table_json::parse_table;

    #[test]
    fn born_after_died_is_one_violation() {
        let t = parse_table(r#"{"title":["P"],"Born":["1950"],"Died":["1940"]}"#).unwrap();
        let r = lint_constraints(&t, &default_rules());
        assert_eq!(r.violations().count(), 1);
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn well_ordered_is_clean() {
        let t = parse_table(r#"{"title":["P"],"Born":["1950"],"Died":["1960"]}"#).unwrap();
        assert!(lint_constraints(&t, &default_rules()).is_empty());
    }

    #[test]
    fn unparseable_is_a_note_not_a_violation() {
        let t = parse_table(r#"{"title":["A"],"Released":["March 1970"],"Recorded":["gibberish"]}"#).unwrap();
        let r = lint_constraints(&t, &default_rules());
        assert!(!r.has_violations());
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].kind, LintKind::Unverifiable);
    }

    #[test]
    fn structural_issues() {
        let t = parse_table(r#"{"title":["A"],"Genre":[],"Label":[" "]}"#).unwrap();
        let r = lint_constraints(&t, &[]);
        let kinds: Vec<_> = r.entries.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, [LintKind::EmptySection, LintKind::EmptyValueText]);
    }

    #[test]
    fn rules_file() {
        let rules = parse_rules(r#"[{"earlier_key":"Founded","later_key":"Dissolved","description":"x"}]"#).unwrap();
        assert_eq!(rules[0].later_key, "Dissolved");
        assert_eq!(
            parse_rules(r#"[{"earlier_key":"A","later_key":"A"}]"#),
            Err(RuleError::SameKey("A".into()))
        );
        assert!(parse_rules("{").is_err());
    }
}
