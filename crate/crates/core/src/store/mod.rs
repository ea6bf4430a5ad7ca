//! Durable session storage.
//!
//! Layout under the store root:
//!
//! ```text
//! sessions/{session_id}/manifest.json   session metadata
//! sessions/{session_id}/head.json       current working state
//! sessions/{session_id}/ckpt-{n}.json   append-only checkpoints, n = 1, 2, ...
//! ```
//!
//! Every file is written to a temporary file in the same directory and then
//! renamed into place. Checkpoint files are never overwritten.

mod export;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::editor::{AnnotationSession, DanglingKey, LintEntry};

pub use export::{build_export, export_dataset, import_bundle, pair_id, ExportBundle, ExportSummary};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure: {0}")]
    StorageFailure(#[from] io::Error),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid identifier {0:?}")]
    InvalidId(String),
    #[error("corrupt store file {path}: {message}")]
    Corrupt { path: String, message: String },
    #[error("session has {} relevant-key marks naming missing keys", .0.len())]
    DanglingKeys(Vec<DanglingKey>),
    #[error("export blocked by {} structural lint issues", .0.len())]
    LintBlocked(Vec<LintEntry>),
    #[error("table id {0:?} appears in more than one exported session")]
    DuplicateTable(String),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

/// Listing entry for one checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointInfo {
    pub checkpoint_id: String,
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub revision: u64,
}

/// A saved snapshot of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    #[serde(flatten)]
    pub info: CheckpointInfo,
    pub payload: AnnotationSession,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    session_id: String,
    format: u32,
}

/// Identifiers double as file names: ASCII letters, digits, `.`, `_` and
/// `-`, not starting with `.`.
pub fn is_safe_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

fn checkpoint_number(file_name: &str) -> Option<u64> {
    file_name.strip_prefix("ckpt-")?.strip_suffix(".json")?.parse().ok()
}

/// Writes `contents` to `path` through a temporary file and a rename.
/// With `no_clobber`, an existing file is an error.
pub(crate) fn atomic_write(path: &Path, contents: &[u8], no_clobber: bool) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    if no_clobber {
        tmp.persist_noclobber(path).map_err(|e| e.error)?;
    } else {
        tmp.persist(path).map_err(|e| e.error)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    root: PathBuf,
}

impl SessionStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn session_dir(&self, session_id: &str) -> Result<PathBuf> {
        if !is_safe_id(session_id) {
            return Err(StoreError::InvalidId(session_id.to_owned()));
        }
        Ok(self.root.join("sessions").join(session_id))
    }

    fn existing_session_dir(&self, session_id: &str) -> Result<PathBuf> {
        let dir = self.session_dir(session_id)?;
        if dir.join("manifest.json").is_file() {
            Ok(dir)
        } else {
            Err(StoreError::NotFound(format!("session {session_id:?}")))
        }
    }

    fn ensure_session_dir(&self, session_id: &str) -> Result<PathBuf> {
        let dir = self.session_dir(session_id)?;
        let manifest = dir.join("manifest.json");
        if !manifest.is_file() {
            fs::create_dir_all(&dir)?;
            let m = Manifest {
                session_id: session_id.to_owned(),
                format: 1,
            };
            let mut body = serde_json::to_string_pretty(&m).expect("manifest serializes");
            body.push('\n');
            atomic_write(&manifest, body.as_bytes(), false)?;
        }
        Ok(dir)
    }

    pub fn contains(&self, session_id: &str) -> bool {
        self.existing_session_dir(session_id).is_ok()
    }

    /// Stores `s` as the working state of its session, creating the session
    /// directory if needed.
    pub fn put_session(&self, s: &AnnotationSession) -> Result<()> {
        let dir = self.ensure_session_dir(&s.session_id)?;
        atomic_write(&dir.join("head.json"), s.to_json().as_bytes(), false)?;
        Ok(())
    }

    /// The current working state of a session.
    pub fn load_session(&self, session_id: &str) -> Result<AnnotationSession> {
        let path = self.existing_session_dir(session_id)?.join("head.json");
        let text = fs::read_to_string(&path)?;
        AnnotationSession::from_json(&text).map_err(|e| StoreError::Corrupt {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Session ids in sorted order.
    pub fn list_sessions(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(self.root.join("sessions"))? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if is_safe_id(&name) && entry.path().join("manifest.json").is_file() {
                ids.push(name);
            }
        }
        ids.sort();
        Ok(ids)
    }

    /// Appends a checkpoint of `s`. Sessions with relevant-key marks naming
    /// missing keys are refused.
    pub fn save_checkpoint(&self, s: &AnnotationSession) -> Result<String> {
        let dangling = s.dangling_relevant_keys();
        if !dangling.is_empty() {
            return Err(StoreError::DanglingKeys(dangling));
        }
        let dir = self.ensure_session_dir(&s.session_id)?;
        if !dir.join("head.json").is_file() {
            atomic_write(&dir.join("head.json"), s.to_json().as_bytes(), false)?;
        }
        let next = self.checkpoint_numbers(&dir)?.last().map_or(1, |n| n + 1);
        let checkpoint_id = format!("ckpt-{next}");
        let ckpt = Checkpoint {
            info: CheckpointInfo {
                checkpoint_id: checkpoint_id.clone(),
                session_id: s.session_id.clone(),
                created_at: Utc::now(),
                revision: s.revision,
            },
            payload: s.clone(),
        };
        let mut body = serde_json::to_string_pretty(&ckpt).expect("checkpoint serializes");
        body.push('\n');
        atomic_write(&dir.join(format!("{checkpoint_id}.json")), body.as_bytes(), true)?;
        Ok(checkpoint_id)
    }

    fn checkpoint_numbers(&self, dir: &Path) -> Result<Vec<u64>> {
        let mut ns = Vec::new();
        for entry in fs::read_dir(dir)? {
            if let Some(n) = checkpoint_number(&entry?.file_name().to_string_lossy()) {
                ns.push(n);
            }
        }
        ns.sort_unstable();
        Ok(ns)
    }

    fn read_checkpoint(&self, dir: &Path, checkpoint_id: &str) -> Result<Checkpoint> {
        let path = dir.join(format!("{checkpoint_id}.json"));
        if checkpoint_number(&format!("{checkpoint_id}.json")).is_none() || !path.is_file() {
            return Err(StoreError::NotFound(format!("checkpoint {checkpoint_id:?}")));
        }
        let text = fs::read_to_string(&path)?;
        let corrupt = |message: String| StoreError::Corrupt {
            path: path.display().to_string(),
            message,
        };
        let ckpt: Checkpoint = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        ckpt.payload.validate().map_err(|e| corrupt(e.to_string()))?;
        if ckpt.payload.revision != ckpt.info.revision {
            return Err(corrupt("payload revision differs from checkpoint revision".into()));
        }
        Ok(ckpt)
    }

    /// Checkpoints of a session, oldest first.
    pub fn list_checkpoints(&self, session_id: &str) -> Result<Vec<CheckpointInfo>> {
        let dir = self.existing_session_dir(session_id)?;
        self.checkpoint_numbers(&dir)?
            .into_iter()
            .map(|n| self.read_checkpoint(&dir, &format!("ckpt-{n}")).map(|c| c.info))
            .collect()
    }

    pub fn load_checkpoint(&self, session_id: &str, checkpoint_id: &str) -> Result<Checkpoint> {
        let dir = self.existing_session_dir(session_id)?;
        self.read_checkpoint(&dir, checkpoint_id)
    }

    /// The session exactly as checkpointed. Does not touch the store.
    pub fn restore_checkpoint(&self, session_id: &str, checkpoint_id: &str) -> Result<AnnotationSession> {
        self.load_checkpoint(session_id, checkpoint_id).map(|c| c.payload)
    }

    /// Working state of every stored session, sorted by id.
    pub fn load_all(&self) -> Result<Vec<AnnotationSession>> {
        self.list_sessions()?.iter().map(|id| self.load_session(id)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn safe_ids() {
        assert!(is_safe_id("T14"));
        assert!(is_safe_id("t-1_a.b"));
        assert!(!is_safe_id(""));
        assert!(!is_safe_id(".."));
        assert!(!is_safe_id("a/b"));
        assert!(!is_safe_id("New York"));
    }

    #[test]
    fn checkpoint_file_names() {
        assert_eq!(checkpoint_number("ckpt-12.json"), Some(12));
        assert_eq!(checkpoint_number("ckpt-x.json"), None);
        assert_eq!(checkpoint_number("head.json"), None);
    }
}
