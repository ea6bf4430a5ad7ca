//! Dataset export bundle and its inverse.
//!
//! ```text
//! tables/{table_id}_{variant}.json   canonical table JSON, provenance sidecar included
//! pairs.tsv                          one row per table-hypothesis pair
//! metadata.tsv                       pair_id → session, hypothesis id, strategy bits, relevant keys, table file
//! sessions.tsv                       session_id, revision, table_id
//! ```
//!
//! Pair ids are `{table_id}_{variant}_{hyp_index}` with a 0-based index.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::{is_safe_id, Result, StoreError};
use crate::codec::{decode_strategy_flags, encode_strategy_flags};
use crate::editor::{lint_session, AnnotationSession, ConstraintRule, Drafts, HypothesisSet, LintEntry};
use crate::model::{Hypothesis, Table, Variant};
use crate::table_json::{parse_table, serialize_table};
use crate::tsv::{
    escape_field, join_keys, read_pair_rows, split_keys, split_line, unescape_field, write_pair_rows, PairRow,
};

const METADATA_HEADER: &str = "pair_id\tsession_id\thyp_id\tstrategy_bits\trelevant_keys\ttable_file";
const SESSIONS_HEADER: &str = "session_id\trevision\ttable_id";

/// The exported files, keyed by path relative to the bundle root.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExportBundle {
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportSummary {
    pub sessions: usize,
    pub tables: usize,
    pub pair_rows: usize,
    /// Non-blocking lint findings (date constraints, unverifiable dates).
    pub warnings: Vec<LintEntry>,
}

pub fn pair_id(table_id: &str, variant: Variant, hyp_index: usize) -> String {
    format!("{table_id}_{}_{hyp_index}", variant.code())
}

fn table_file(table_id: &str, variant: Variant) -> String {
    format!("tables/{table_id}_{}.json", variant.code())
}

/// Builds the bundle for `sessions`. Structural lint issues in drafts or
/// hypotheses block the export unless `force` is set.
pub fn build_export(
    sessions: &[AnnotationSession],
    rules: &[ConstraintRule],
    force: bool,
) -> Result<(ExportBundle, ExportSummary)> {
    let mut ordered: Vec<&AnnotationSession> = sessions.iter().collect();
    ordered.sort_by(|a, b| a.session_id.cmp(&b.session_id));

    let mut blocking = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_tables = HashSet::new();
    for s in &ordered {
        let table_id = &s.original.table_id;
        if !is_safe_id(table_id) {
            return Err(StoreError::InvalidId(table_id.clone()));
        }
        if !is_safe_id(&s.session_id) {
            return Err(StoreError::InvalidId(s.session_id.clone()));
        }
        if !seen_tables.insert(table_id.clone()) {
            return Err(StoreError::DuplicateTable(table_id.clone()));
        }
        for e in lint_session(s, rules).entries {
            if e.kind.is_structural() && e.variant != Some(Variant::Orig) {
                blocking.push(e);
            } else {
                warnings.push(e);
            }
        }
    }
    if !blocking.is_empty() && !force {
        return Err(StoreError::LintBlocked(blocking));
    }

    let mut files = BTreeMap::new();
    let mut pair_rows = Vec::new();
    let mut metadata = format!("{METADATA_HEADER}\n");
    let mut session_rows = format!("{SESSIONS_HEADER}\n");
    for s in &ordered {
        let table_id = &s.original.table_id;
        session_rows.push_str(&format!(
            "{}\t{}\t{}\n",
            s.session_id,
            s.revision,
            escape_field(table_id)
        ));
        for v in Variant::ALL {
            let file = table_file(table_id, v);
            files.insert(file.clone(), serialize_table(s.table(v)));
            for (i, h) in s.hypotheses(v).iter().enumerate() {
                let pid = pair_id(table_id, v, i);
                metadata.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    pid,
                    s.session_id,
                    escape_field(&h.hyp_id),
                    encode_strategy_flags(h.strategies),
                    join_keys(&h.relevant_keys),
                    file
                ));
                pair_rows.push(PairRow {
                    pair_id: pid,
                    table_id: table_id.clone(),
                    variant: v,
                    text: h.text.clone(),
                    label: h.label,
                    strategies: h.strategies,
                    relevant_keys: h.relevant_keys.clone(),
                });
            }
        }
    }
    let summary = ExportSummary {
        sessions: ordered.len(),
        tables: ordered.len() * Variant::ALL.len(),
        pair_rows: pair_rows.len(),
        warnings,
    };
    files.insert("pairs.tsv".into(), write_pair_rows(&pair_rows));
    files.insert("metadata.tsv".into(), metadata);
    files.insert("sessions.tsv".into(), session_rows);
    Ok((ExportBundle { files }, summary))
}

/// Builds the bundle and writes it under `out`.
pub fn export_dataset(
    sessions: &[AnnotationSession],
    out: &Path,
    rules: &[ConstraintRule],
    force: bool,
) -> Result<ExportSummary> {
    let (bundle, summary) = build_export(sessions, rules, force)?;
    bundle.write_to(out)?;
    Ok(summary)
}

impl ExportBundle {
    pub fn write_to(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out.join("tables"))?;
        for (rel, body) in &self.files {
            fs::write(out.join(rel), body)?;
        }
        Ok(())
    }

    pub fn read_from(dir: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        for name in ["pairs.tsv", "metadata.tsv", "sessions.tsv"] {
            let path = dir.join(name);
            if path.is_file() {
                files.insert(name.to_owned(), fs::read_to_string(path)?);
            }
        }
        let tables = dir.join("tables");
        if tables.is_dir() {
            for entry in fs::read_dir(tables)? {
                let entry = entry?;
                let name = entry.file_name().to_string_lossy().into_owned();
                if name.ends_with(".json") && entry.file_type()?.is_file() {
                    files.insert(format!("tables/{name}"), fs::read_to_string(entry.path())?);
                }
            }
        }
        Ok(Self { files })
    }

    fn file(&self, rel: &str) -> Result<&str> {
        self.files
            .get(rel)
            .map(String::as_str)
            .ok_or_else(|| StoreError::NotFound(format!("bundle file {rel}")))
    }
}

fn corrupt(path: &str, message: impl Into<String>) -> StoreError {
    StoreError::Corrupt {
        path: path.to_owned(),
        message: message.into(),
    }
}

struct MetaRow {
    session_id: String,
    hyp_id: String,
    strategy_bits: String,
    relevant_keys: Vec<String>,
    table_file: String,
}

/// Rebuilds the sessions of a bundle, sorted by session id.
pub fn import_bundle(bundle: &ExportBundle) -> Result<Vec<AnnotationSession>> {
    let pairs = read_pair_rows(bundle.file("pairs.tsv")?).map_err(|e| corrupt("pairs.tsv", e.to_string()))?;

    let mut meta: HashMap<String, MetaRow> = HashMap::new();
    for (i, line) in bundle.file("metadata.tsv")?.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let f = split_line(line);
        if f.len() != 6 {
            return Err(corrupt("metadata.tsv", format!("line {}: expected 6 columns", i + 1)));
        }
        meta.insert(
            unescape_field(f[0]),
            MetaRow {
                session_id: unescape_field(f[1]),
                hyp_id: unescape_field(f[2]),
                strategy_bits: f[3].to_owned(),
                relevant_keys: split_keys(f[4]),
                table_file: unescape_field(f[5]),
            },
        );
    }

    let mut sessions = Vec::new();
    let mut by_table: HashMap<String, usize> = HashMap::new();
    for (i, line) in bundle.file("sessions.tsv")?.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let f = split_line(line);
        if f.len() != 3 {
            return Err(corrupt("sessions.tsv", format!("line {}: expected 3 columns", i + 1)));
        }
        let revision = f[1]
            .parse()
            .map_err(|_| corrupt("sessions.tsv", format!("line {}: bad revision", i + 1)))?;
        let table_id = unescape_field(f[2]);
        let load = |v: Variant| -> Result<Table> {
            let rel = table_file(&table_id, v);
            parse_table(bundle.file(&rel)?).map_err(|e| corrupt(&rel, e.to_string()))
        };
        let session = AnnotationSession {
            session_id: f[0].to_owned(),
            revision,
            original: load(Variant::Orig)?,
            counterfactuals: Drafts {
                a: load(Variant::A)?,
                b: load(Variant::B)?,
                c: load(Variant::C)?,
            },
            hypotheses: HypothesisSet {
                orig: Vec::new(),
                a: Vec::new(),
                b: Vec::new(),
                c: Vec::new(),
            },
        };
        by_table.insert(table_id, sessions.len());
        sessions.push(session);
    }

    for row in pairs {
        let m = meta
            .get(&row.pair_id)
            .ok_or_else(|| corrupt("metadata.tsv", format!("no row for pair {}", row.pair_id)))?;
        let &idx = by_table
            .get(&row.table_id)
            .ok_or_else(|| corrupt("pairs.tsv", format!("pair {} names unexported table", row.pair_id)))?;
        let session = &mut sessions[idx];
        if m.session_id != session.session_id || m.table_file != table_file(&row.table_id, row.variant) {
            return Err(corrupt(
                "metadata.tsv",
                format!("pair {} disagrees with pairs.tsv", row.pair_id),
            ));
        }
        let bits = decode_strategy_flags(&m.strategy_bits).map_err(|e| corrupt("metadata.tsv", e.to_string()))?;
        if bits != row.strategies || m.relevant_keys != row.relevant_keys {
            return Err(corrupt(
                "metadata.tsv",
                format!("pair {} disagrees with pairs.tsv", row.pair_id),
            ));
        }
        let list = session.hypotheses_mut(row.variant);
        if row.pair_id != pair_id(&row.table_id, row.variant, list.len()) {
            return Err(corrupt("pairs.tsv", format!("pair {} out of order", row.pair_id)));
        }
        list.push(Hypothesis {
            hyp_id: m.hyp_id.clone(),
            text: row.text,
            label: row.label,
            strategies: row.strategies,
            relevant_keys: row.relevant_keys,
        });
    }

    for s in &sessions {
        s.validate().map_err(|e| corrupt("sessions.tsv", e.to_string()))?;
    }
    sessions.sort_by(|a, b| a.session_id.cmp(&b.session_id));
    Ok(sessions)
}
