use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Hypothesis, Table, TableInvariantError, Variant};

/// The three editable counterfactual drafts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Drafts {
    #[serde(rename = "A")]
    pub a: Table,
    #[serde(rename = "B")]
    pub b: Table,
    #[serde(rename = "C")]
    pub c: Table,
}

/// Hypothesis lists for the original and each draft.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSet {
    pub orig: Vec<Hypothesis>,
    #[serde(rename = "A")]
    pub a: Vec<Hypothesis>,
    #[serde(rename = "B")]
    pub b: Vec<Hypothesis>,
    #[serde(rename = "C")]
    pub c: Vec<Hypothesis>,
}

/// One original table, its three drafts and the hypotheses of all four.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub session_id: String,
    pub revision: u64,
    pub original: Table,
    pub counterfactuals: Drafts,
    pub hypotheses: HypothesisSet,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("malformed session JSON: {0}")]
    MalformedJson(String),
    #[error("session id is empty")]
    EmptyId,
    #[error("{variant} table: {source}")]
    Table {
        variant: Variant,
        source: TableInvariantError,
    },
    #[error("duplicate hypothesis id {hyp_id:?} in {variant}")]
    DuplicateHypothesis { variant: Variant, hyp_id: String },
}

/// A relevant-key entry naming a key its table does not have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingKey {
    pub variant: Variant,
    pub hyp_id: String,
    pub key: String,
}

impl AnnotationSession {
    /// A fresh session at revision 0. Every draft shares the given copies of
    /// the hypotheses.
    pub fn new(
        session_id: String,
        original: Table,
        counterfactuals: Drafts,
        original_hypotheses: Vec<Hypothesis>,
        draft_hypotheses: Vec<Hypothesis>,
    ) -> Self {
        Self {
            session_id,
            revision: 0,
            original,
            counterfactuals,
            hypotheses: HypothesisSet {
                orig: original_hypotheses,
                a: draft_hypotheses.clone(),
                b: draft_hypotheses.clone(),
                c: draft_hypotheses,
            },
        }
    }

    pub fn table(&self, v: Variant) -> &Table {
        match v {
            Variant::Orig => &self.original,
            Variant::A => &self.counterfactuals.a,
            Variant::B => &self.counterfactuals.b,
            Variant::C => &self.counterfactuals.c,
        }
    }

    /// Mutable access to a draft; `None` for the original.
    pub fn table_mut(&mut self, v: Variant) -> Option<&mut Table> {
        match v {
            Variant::Orig => None,
            Variant::A => Some(&mut self.counterfactuals.a),
            Variant::B => Some(&mut self.counterfactuals.b),
            Variant::C => Some(&mut self.counterfactuals.c),
        }
    }

    pub fn hypotheses(&self, v: Variant) -> &[Hypothesis] {
        match v {
            Variant::Orig => &self.hypotheses.orig,
            Variant::A => &self.hypotheses.a,
            Variant::B => &self.hypotheses.b,
            Variant::C => &self.hypotheses.c,
        }
    }

    pub fn hypotheses_mut(&mut self, v: Variant) -> &mut Vec<Hypothesis> {
        match v {
            Variant::Orig => &mut self.hypotheses.orig,
            Variant::A => &mut self.hypotheses.a,
            Variant::B => &mut self.hypotheses.b,
            Variant::C => &mut self.hypotheses.c,
        }
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.session_id.is_empty() {
            return Err(SessionError::EmptyId);
        }
        for v in Variant::ALL {
            self.table(v)
                .validate()
                .map_err(|source| SessionError::Table { variant: v, source })?;
            let mut ids = HashSet::new();
            for h in self.hypotheses(v) {
                if !ids.insert(h.hyp_id.as_str()) {
                    return Err(SessionError::DuplicateHypothesis {
                        variant: v,
                        hyp_id: h.hyp_id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dangling_relevant_keys(&self) -> Vec<DanglingKey> {
        Variant::ALL
            .iter()
            .flat_map(|&v| {
                let table = self.table(v);
                self.hypotheses(v).iter().flat_map(move |h| {
                    h.relevant_keys
                        .iter()
                        .filter(|k| !table.has_key(k))
                        .map(move |k| DanglingKey {
                            variant: v,
                            hyp_id: h.hyp_id.clone(),
                            key: k.clone(),
                        })
                })
            })
            .collect()
    }

    /// Canonical JSON: 2-space indent, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("session always serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        let s: Self = serde_json::from_str(text).map_err(|e| SessionError::MalformedJson(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}
