use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tabforge_core::editor::EditError;
use tabforge_core::store::StoreError;

/// Error body returned by every failing endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

/// Error codes and their fixed statuses.
pub const ERROR_CODES: [(&str, u16); 7] = [
    ("forbidden_original_edit", 403),
    ("type_violation", 409),
    ("revision_conflict", 409),
    ("not_found", 404),
    ("bad_request", 400),
    ("lint_blocked", 422),
    ("storage_failure", 500),
];

pub fn status_for(code: &str) -> Option<u16> {
    ERROR_CODES.iter().find(|(c, _)| *c == code).map(|(_, s)| *s)
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            http_status: status_for(code).expect("known error code"),
            code: code.to_owned(),
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("bad_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<EditError> for ApiError {
    fn from(e: EditError) -> Self {
        let msg = e.to_string();
        match e {
            EditError::ForbiddenOriginalEdit => Self::new("forbidden_original_edit", msg),
            EditError::NotFound(_) => Self::new("not_found", msg),
            EditError::TypeViolation {
                src_key,
                dst_key,
                src_group,
                dst_group,
            } => Self::new("type_violation", msg).with_details(json!({
                "src_group": src_group,
                "dst_group": dst_group,
                "src_key": src_key,
                "dst_key": dst_key,
            })),
            EditError::DuplicateKey(_) | EditError::ReservedKey(_) | EditError::EmptyText => Self::bad_request(msg),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::NotFound(_) => Self::new("not_found", msg),
            StoreError::InvalidId(_) => Self::bad_request(msg),
            StoreError::LintBlocked(entries) => {
                Self::new("lint_blocked", msg).with_details(json!({ "entries": entries }))
            }
            StoreError::DanglingKeys(keys) => Self::new("lint_blocked", msg).with_details(json!({ "dangling": keys })),
            StoreError::StorageFailure(_) | StoreError::Corrupt { .. } | StoreError::DuplicateTable(_) => {
                tracing::error!("{msg}");
                Self::new("storage_failure", msg)
            }
        }
    }
}
