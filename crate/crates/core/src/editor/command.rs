use serde::{Deserialize, Serialize};

use crate::codec::StrategyFlags;
use crate::model::{Label, Variant};

/// Address of one value cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellRef {
    pub variant: Variant,
    pub key: String,
    pub value_index: usize,
}

impl CellRef {
    pub fn new(variant: Variant, key: impl Into<String>, value_index: usize) -> Self {
        Self {
            variant,
            key: key.into(),
            value_index,
        }
    }
}

/// One annotator action. The JSON form is `{"op": "<snake_case name>", ...fields}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditCommand {
    /// Drag a value cell onto a section. Cut-paste between drafts, copy-paste
    /// out of the original.
    MoveValue {
        src: CellRef,
        dst_variant: Variant,
        dst_key: String,
        dst_position: usize,
    },
    AddValue {
        variant: Variant,
        key: String,
        text: String,
    },
    DeleteValue {
        #[serde(rename = "ref")]
        cell: CellRef,
    },
    EditValueText {
        #[serde(rename = "ref")]
        cell: CellRef,
        new_text: String,
    },
    EditKey {
        variant: Variant,
        key: String,
        new_key: String,
    },
    AddSection {
        variant: Variant,
        key: String,
        texts: Vec<String>,
    },
    DeleteSection {
        variant: Variant,
        key: String,
    },
    SetHypothesisText {
        variant: Variant,
        hyp_id: String,
        text: String,
    },
    SetLabel {
        variant: Variant,
        hyp_id: String,
        label: Label,
    },
    SetStrategies {
        variant: Variant,
        hyp_id: String,
        flags: StrategyFlags,
    },
    SetRelevantKeys {
        variant: Variant,
        hyp_id: String,
        keys: Vec<String>,
    },
}

impl EditCommand {
    /// The variant whose state the command changes.
    pub fn target_variant(&self) -> Variant {
        match self {
            EditCommand::MoveValue { dst_variant, .. } => *dst_variant,
            EditCommand::DeleteValue { cell } | EditCommand::EditValueText { cell, .. } => cell.variant,
            EditCommand::AddValue { variant, .. }
            | EditCommand::EditKey { variant, .. }
            | EditCommand::AddSection { variant, .. }
            | EditCommand::DeleteSection { variant, .. }
            | EditCommand::SetHypothesisText { variant, .. }
            | EditCommand::SetLabel { variant, .. }
            | EditCommand::SetStrategies { variant, .. }
            | EditCommand::SetRelevantKeys { variant, .. } => *variant,
        }
    }

    /// Whether the command is allowed to target the original. Only marking
    /// relevant rows of an original hypothesis is.
    pub fn allowed_on_original(&self) -> bool {
        matches!(self, EditCommand::SetRelevantKeys { .. })
    }

    pub fn op_name(&self) -> &'static str {
        match self {
            EditCommand::MoveValue { .. } => "move_value",
            EditCommand::AddValue { .. } => "add_value",
            EditCommand::DeleteValue { .. } => "delete_value",
            EditCommand::EditValueText { .. } => "edit_value_text",
            EditCommand::EditKey { .. } => "edit_key",
            EditCommand::AddSection { .. } => "add_section",
            EditCommand::DeleteSection { .. } => "delete_section",
            EditCommand::SetHypothesisText { .. } => "set_hypothesis_text",
            EditCommand::SetLabel { .. } => "set_label",
            EditCommand::SetStrategies { .. } => "set_strategies",
            EditCommand::SetRelevantKeys { .. } => "set_relevant_keys",
        }
    }
}
