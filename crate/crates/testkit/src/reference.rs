//! An independent in-memory model of the editor.
//!
//! Tables are plain row lists, provenance is a raw 7-bit integer, and the
//! type rule comes from the hand-assigned toy groups. None of the library's
//! edit code is reused.

use tabforge_core::editor::{AnnotationSession, EditCommand, EditError};
use tabforge_core::model::{Table, Variant};

use crate::corpus::toy_group;
use crate::oracle::move_allowed;

const COPIED: u8 = 0b0000100;
const ADDED: u8 = 0b0000010;
const EDITED: u8 = 0b0000001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefErr {
    Forbidden,
    NotFound,
    TypeViolation,
    DuplicateKey,
    ReservedKey,
    EmptyText,
}

impl RefErr {
    pub fn of(e: &EditError) -> Self {
        match e {
            EditError::ForbiddenOriginalEdit => RefErr::Forbidden,
            EditError::NotFound(_) => RefErr::NotFound,
            EditError::TypeViolation { .. } => RefErr::TypeViolation,
            EditError::DuplicateKey(_) => RefErr::DuplicateKey,
            EditError::ReservedKey(_) => RefErr::ReservedKey,
            EditError::EmptyText => RefErr::EmptyText,
        }
    }
}

pub type Row = (String, Vec<(String, u8)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefHyp {
    pub id: String,
    pub text: String,
    pub label: String,
    pub flags: u8,
    pub keys: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefModel {
    pub tables: [Vec<Row>; 4],
    pub hyps: [Vec<RefHyp>; 4],
    pub revision: u64,
}

fn slot(v: Variant) -> usize {
    match v {
        Variant::Orig => 0,
        Variant::A => 1,
        Variant::B => 2,
        Variant::C => 3,
    }
}

fn blank(s: &str) -> bool {
    s.trim().is_empty()
}

fn reserved(s: &str) -> bool {
    matches!(s, "title" | "_meta" | "_provenance")
}

fn rows_of(t: &Table) -> Vec<Row> {
    t.sections
        .iter()
        .map(|s| {
            (
                s.key.clone(),
                s.values
                    .iter()
                    .map(|c| (c.text.clone(), c.provenance.to_bits()))
                    .collect(),
            )
        })
        .collect()
}

impl RefModel {
    pub fn from_session(s: &AnnotationSession) -> Self {
        let tables = Variant::ALL.map(|v| rows_of(s.table(v)));
        let hyps = Variant::ALL.map(|v| {
            s.hypotheses(v)
                .iter()
                .map(|h| RefHyp {
                    id: h.hyp_id.clone(),
                    text: h.text.clone(),
                    label: h.label.code().to_owned(),
                    flags: h.strategies.to_bits(),
                    keys: h.relevant_keys.clone(),
                })
                .collect()
        });
        Self {
            tables,
            hyps,
            revision: s.revision,
        }
    }

    fn row(&self, v: Variant, key: &str) -> Option<usize> {
        self.tables[slot(v)].iter().position(|(k, _)| k == key)
    }

    fn hyp(&mut self, v: Variant, id: &str) -> Result<&mut RefHyp, RefErr> {
        self.hyps[slot(v)]
            .iter_mut()
            .find(|h| h.id == id)
            .ok_or(RefErr::NotFound)
    }

    fn prune(&mut self, v: Variant, key: &str) {
        for h in &mut self.hyps[slot(v)] {
            h.keys.retain(|k| k != key);
        }
    }

    fn drop_empty(&mut self, v: Variant, key: &str) {
        if let Some(r) = self.row(v, key) {
            if self.tables[slot(v)][r].1.is_empty() {
                self.tables[slot(v)].remove(r);
                self.prune(v, key);
            }
        }
    }

    /// All-or-nothing application; bumps the revision on success.
    pub fn apply(&mut self, cmd: &EditCommand) -> Result<(), RefErr> {
        let mut next = self.clone();
        next.step(cmd)?;
        next.revision += 1;
        *self = next;
        Ok(())
    }

    fn step(&mut self, cmd: &EditCommand) -> Result<(), RefErr> {
        use EditCommand::*;
        match cmd {
            MoveValue {
                src,
                dst_variant,
                dst_key,
                dst_position,
            } => {
                if *dst_variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                let sr = self.row(src.variant, &src.key).ok_or(RefErr::NotFound)?;
                let cell = self.tables[slot(src.variant)][sr]
                    .1
                    .get(src.value_index)
                    .cloned()
                    .ok_or(RefErr::NotFound)?;
                if self.row(*dst_variant, dst_key).is_none() {
                    return Err(RefErr::NotFound);
                }
                if !move_allowed(toy_group(&src.key), toy_group(dst_key)) {
                    return Err(RefErr::TypeViolation);
                }
                let moved = if src.variant == Variant::Orig {
                    (cell.0, COPIED)
                } else {
                    self.tables[slot(src.variant)][sr].1.remove(src.value_index)
                };
                let dr = self.row(*dst_variant, dst_key).expect("checked");
                let values = &mut self.tables[slot(*dst_variant)][dr].1;
                if *dst_position > values.len() {
                    return Err(RefErr::NotFound);
                }
                values.insert(*dst_position, moved);
                if src.variant != Variant::Orig {
                    self.drop_empty(src.variant, &src.key);
                }
            }
            AddValue { variant, key, text } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                if blank(text) {
                    return Err(RefErr::EmptyText);
                }
                let r = self.row(*variant, key).ok_or(RefErr::NotFound)?;
                self.tables[slot(*variant)][r].1.push((text.clone(), ADDED));
            }
            DeleteValue { cell } => {
                if cell.variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                let r = self.row(cell.variant, &cell.key).ok_or(RefErr::NotFound)?;
                let values = &mut self.tables[slot(cell.variant)][r].1;
                if cell.value_index >= values.len() {
                    return Err(RefErr::NotFound);
                }
                values.remove(cell.value_index);
                self.drop_empty(cell.variant, &cell.key);
            }
            EditValueText { cell, new_text } => {
                if cell.variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                if blank(new_text) {
                    return Err(RefErr::EmptyText);
                }
                let r = self.row(cell.variant, &cell.key).ok_or(RefErr::NotFound)?;
                let c = self.tables[slot(cell.variant)][r]
                    .1
                    .get_mut(cell.value_index)
                    .ok_or(RefErr::NotFound)?;
                c.0 = new_text.clone();
                c.1 |= EDITED;
            }
            EditKey { variant, key, new_key } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                if blank(new_key) {
                    return Err(RefErr::EmptyText);
                }
                if reserved(new_key) {
                    return Err(RefErr::ReservedKey);
                }
                let r = self.row(*variant, key).ok_or(RefErr::NotFound)?;
                if new_key == key {
                    return Ok(());
                }
                if self.row(*variant, new_key).is_some() {
                    return Err(RefErr::DuplicateKey);
                }
                self.tables[slot(*variant)][r].0 = new_key.clone();
                for h in &mut self.hyps[slot(*variant)] {
                    for k in &mut h.keys {
                        if k == key {
                            *k = new_key.clone();
                        }
                    }
                }
            }
            AddSection { variant, key, texts } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                if blank(key) {
                    return Err(RefErr::EmptyText);
                }
                if reserved(key) {
                    return Err(RefErr::ReservedKey);
                }
                if texts.is_empty() || texts.iter().any(|t| blank(t)) {
                    return Err(RefErr::EmptyText);
                }
                if self.row(*variant, key).is_some() {
                    return Err(RefErr::DuplicateKey);
                }
                self.tables[slot(*variant)].push((key.clone(), texts.iter().map(|t| (t.clone(), ADDED)).collect()));
            }
            DeleteSection { variant, key } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                let r = self.row(*variant, key).ok_or(RefErr::NotFound)?;
                self.tables[slot(*variant)].remove(r);
                self.prune(*variant, key);
            }
            SetHypothesisText { variant, hyp_id, text } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                if blank(text) {
                    return Err(RefErr::EmptyText);
                }
                self.hyp(*variant, hyp_id)?.text = text.clone();
            }
            SetLabel { variant, hyp_id, label } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                self.hyp(*variant, hyp_id)?.label = label.code().to_owned();
            }
            SetStrategies { variant, hyp_id, flags } => {
                if *variant == Variant::Orig {
                    return Err(RefErr::Forbidden);
                }
                self.hyp(*variant, hyp_id)?.flags = flags.to_bits();
            }
            SetRelevantKeys { variant, hyp_id, keys } => {
                if keys.iter().any(|k| self.row(*variant, k).is_none()) {
                    return Err(RefErr::NotFound);
                }
                let mut uniq: Vec<String> = Vec::new();
                for k in keys {
                    if !uniq.contains(k) {
                        uniq.push(k.clone());
                    }
                }
                self.hyp(*variant, hyp_id)?.keys = uniq;
            }
        }
        Ok(())
    }
}
