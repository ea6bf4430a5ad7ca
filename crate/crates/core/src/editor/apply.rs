use serde::Serialize;
use thiserror::Error;

use super::{AnnotationSession, CellRef, EditCommand};
use crate::codec::ValueProvenance;
use crate::initializer::{CategoryMap, TypeGroup};
use crate::model::{Hypothesis, Section, Table, ValueCell, Variant};
use crate::table_json::is_reserved_key;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("the original table and hypotheses are read-only")]
    ForbiddenOriginalEdit,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("cannot move a {src_group} value from {src_key:?} into {dst_group} key {dst_key:?}")]
    TypeViolation {
        src_key: String,
        dst_key: String,
        src_group: TypeGroup,
        dst_group: TypeGroup,
    },
    #[error("key {0:?} already exists")]
    DuplicateKey(String),
    #[error("{0:?} is a reserved key")]
    ReservedKey(String),
    #[error("text must not be empty")]
    EmptyText,
}

/// Outcome of the drag-and-drop type check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MoveCheck {
    Compatible,
    Incompatible { src_group: TypeGroup, dst_group: TypeGroup },
}

/// A value may move between keys of the same type group, or whenever either
/// key is untyped.
pub fn validate_move(cmap: &CategoryMap, src_key: &str, dst_key: &str) -> MoveCheck {
    match (cmap.group(src_key), cmap.group(dst_key)) {
        (Some(src_group), Some(dst_group)) if src_group != dst_group => {
            MoveCheck::Incompatible { src_group, dst_group }
        }
        _ => MoveCheck::Compatible,
    }
}

/// Applies `cmd` to a copy of `session` and bumps the revision. On error
/// nothing is applied.
pub fn apply_edit(
    session: &AnnotationSession,
    cmd: &EditCommand,
    cmap: &CategoryMap,
) -> Result<AnnotationSession, EditError> {
    if cmd.target_variant() == Variant::Orig && !cmd.allowed_on_original() {
        return Err(EditError::ForbiddenOriginalEdit);
    }
    if let EditCommand::DeleteValue { cell } | EditCommand::EditValueText { cell, .. } = cmd {
        if cell.variant == Variant::Orig {
            return Err(EditError::ForbiddenOriginalEdit);
        }
    }
    let mut next = session.clone();
    apply_in_place(&mut next, cmd, cmap)?;
    next.revision += 1;
    Ok(next)
}

fn apply_in_place(s: &mut AnnotationSession, cmd: &EditCommand, cmap: &CategoryMap) -> Result<(), EditError> {
    match cmd {
        EditCommand::MoveValue {
            src,
            dst_variant,
            dst_key,
            dst_position,
        } => move_value(s, src, *dst_variant, dst_key, *dst_position, cmap),
        EditCommand::AddValue { variant, key, text } => {
            let text = non_blank(text)?;
            let section = section_mut(s, *variant, key)?;
            section
                .values
                .push(ValueCell::with_provenance(text, ValueProvenance::added()));
            Ok(())
        }
        EditCommand::DeleteValue { cell } => {
            let section = section_mut(s, cell.variant, &cell.key)?;
            if cell.value_index >= section.values.len() {
                return Err(missing_cell(cell));
            }
            section.values.remove(cell.value_index);
            drop_if_empty(s, cell.variant, &cell.key);
            Ok(())
        }
        EditCommand::EditValueText { cell, new_text } => {
            let text = non_blank(new_text)?;
            let section = section_mut(s, cell.variant, &cell.key)?;
            let target = section
                .values
                .get_mut(cell.value_index)
                .ok_or_else(|| missing_cell(cell))?;
            target.text = text;
            target.provenance.text_edited = true;
            Ok(())
        }
        EditCommand::EditKey { variant, key, new_key } => {
            let new_key = checked_new_key(new_key)?;
            let table = draft_mut(s, *variant)?;
            let idx = table
                .section_index(key)
                .ok_or_else(|| EditError::NotFound(format!("key {key:?} in {variant}")))?;
            if new_key == *key {
                return Ok(());
            }
            if table.has_key(&new_key) {
                return Err(EditError::DuplicateKey(new_key));
            }
            table.sections[idx].key = new_key.clone();
            for h in s.hypotheses_mut(*variant) {
                for k in h.relevant_keys.iter_mut().filter(|k| *k == key) {
                    *k = new_key.clone();
                }
            }
            Ok(())
        }
        EditCommand::AddSection { variant, key, texts } => {
            let key = checked_new_key(key)?;
            if texts.is_empty() {
                return Err(EditError::EmptyText);
            }
            let values = texts
                .iter()
                .map(|t| non_blank(t).map(|t| ValueCell::with_provenance(t, ValueProvenance::added())))
                .collect::<Result<Vec<_>, _>>()?;
            let table = draft_mut(s, *variant)?;
            if table.has_key(&key) {
                return Err(EditError::DuplicateKey(key));
            }
            table.sections.push(Section { key, values });
            Ok(())
        }
        EditCommand::DeleteSection { variant, key } => {
            let table = draft_mut(s, *variant)?;
            let idx = table
                .section_index(key)
                .ok_or_else(|| EditError::NotFound(format!("key {key:?} in {variant}")))?;
            table.sections.remove(idx);
            prune_relevant_key(s, *variant, key);
            Ok(())
        }
        EditCommand::SetHypothesisText { variant, hyp_id, text } => {
            let text = non_blank(text)?;
            hypothesis_mut(s, *variant, hyp_id)?.text = text;
            Ok(())
        }
        EditCommand::SetLabel { variant, hyp_id, label } => {
            hypothesis_mut(s, *variant, hyp_id)?.label = *label;
            Ok(())
        }
        EditCommand::SetStrategies { variant, hyp_id, flags } => {
            hypothesis_mut(s, *variant, hyp_id)?.strategies = *flags;
            Ok(())
        }
        EditCommand::SetRelevantKeys { variant, hyp_id, keys } => {
            let table = s.table(*variant);
            if let Some(k) = keys.iter().find(|k| !table.has_key(k)) {
                return Err(EditError::NotFound(format!("key {k:?} in {variant}")));
            }
            let mut deduped: Vec<String> = Vec::with_capacity(keys.len());
            for k in keys {
                if !deduped.contains(k) {
                    deduped.push(k.clone());
                }
            }
            hypothesis_mut(s, *variant, hyp_id)?.relevant_keys = deduped;
            Ok(())
        }
    }
}

fn move_value(
    s: &mut AnnotationSession,
    src: &CellRef,
    dst_variant: Variant,
    dst_key: &str,
    dst_position: usize,
    cmap: &CategoryMap,
) -> Result<(), EditError> {
    let source_cell = s
        .table(src.variant)
        .cell(&src.key, src.value_index)
        .cloned()
        .ok_or_else(|| missing_cell(src))?;
    if !s.table(dst_variant).has_key(dst_key) {
        return Err(EditError::NotFound(format!("key {dst_key:?} in {dst_variant}")));
    }
    if let MoveCheck::Incompatible { src_group, dst_group } = validate_move(cmap, &src.key, dst_key) {
        return Err(EditError::TypeViolation {
            src_key: src.key.clone(),
            dst_key: dst_key.to_owned(),
            src_group,
            dst_group,
        });
    }

    let moved = if src.variant == Variant::Orig {
        ValueCell::with_provenance(source_cell.text, ValueProvenance::copied())
    } else {
        section_mut(s, src.variant, &src.key)?.values.remove(src.value_index)
    };

    let dst = section_mut(s, dst_variant, dst_key)?;
    if dst_position > dst.values.len() {
        return Err(EditError::NotFound(format!(
            "position {dst_position} in {dst_variant}/{dst_key:?}"
        )));
    }
    dst.values.insert(dst_position, moved);

    if src.variant != Variant::Orig {
        drop_if_empty(s, src.variant, &src.key);
    }
    Ok(())
}

fn non_blank(text: &str) -> Result<String, EditError> {
    if text.trim().is_empty() {
        Err(EditError::EmptyText)
    } else {
        Ok(text.to_owned())
    }
}

fn checked_new_key(key: &str) -> Result<String, EditError> {
    let key = non_blank(key)?;
    if is_reserved_key(&key) {
        return Err(EditError::ReservedKey(key));
    }
    Ok(key)
}

fn missing_cell(cell: &CellRef) -> EditError {
    EditError::NotFound(format!("cell {}/{:?}[{}]", cell.variant, cell.key, cell.value_index))
}

fn draft_mut(s: &mut AnnotationSession, v: Variant) -> Result<&mut Table, EditError> {
    s.table_mut(v).ok_or(EditError::ForbiddenOriginalEdit)
}

fn section_mut<'a>(s: &'a mut AnnotationSession, v: Variant, key: &str) -> Result<&'a mut Section, EditError> {
    draft_mut(s, v)?
        .section_mut(key)
        .ok_or_else(|| EditError::NotFound(format!("key {key:?} in {v}")))
}

fn hypothesis_mut<'a>(s: &'a mut AnnotationSession, v: Variant, hyp_id: &str) -> Result<&'a mut Hypothesis, EditError> {
    s.hypotheses_mut(v)
        .iter_mut()
        .find(|h| h.hyp_id == hyp_id)
        .ok_or_else(|| EditError::NotFound(format!("hypothesis {hyp_id:?} in {v}")))
}

/// Removes a section emptied by a delete or cut, along with any relevant-key
/// marks pointing at it.
fn drop_if_empty(s: &mut AnnotationSession, v: Variant, key: &str) {
    let Some(table) = s.table_mut(v) else { return };
    if let Some(idx) = table.section_index(key) {
        if table.sections[idx].values.is_empty() {
            table.sections.remove(idx);
            prune_relevant_key(s, v, key);
        }
    }
}

fn prune_relevant_key(s: &mut AnnotationSession, v: Variant, key: &str) {
    for h in s.hypotheses_mut(v) {
        h.relevant_keys.retain(|k| k != key);
    }
}
