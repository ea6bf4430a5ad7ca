//! Table JSON reading and canonical writing.
//!
//! The input format is the InfoTabS layout: a JSON object whose `"title"`
//! entry is a one-element list and whose every other entry maps an attribute
//! key to its list of value strings. Two optional reserved entries extend it:
//!
//! * `"_meta"`: `{"table_id": ..., "category": ...}`
//! * `"_provenance"`: a sidecar mapping each key to a list of 7-character
//!   provenance strings parallel to that key's values.
//!
//! Plain files parse with every cell untouched (`"0000000"`), the title as
//! table id and an empty category.

use std::collections::HashSet;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::codec::{decode_value_provenance, CodecError, ValueProvenance};
use crate::model::{Section, Table, ValueCell};

pub const TITLE_KEY: &str = "title";
pub const META_KEY: &str = "_meta";
pub const PROVENANCE_KEY: &str = "_provenance";

/// Keys that can never name a table section.
pub fn is_reserved_key(key: &str) -> bool {
    matches!(key, TITLE_KEY | META_KEY | PROVENANCE_KEY)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("malformed table JSON: {0}")]
    MalformedJson(String),
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("table has no sections")]
    EmptyTable,
    #[error("empty section key")]
    EmptyKey,
    #[error("bad provenance for {key:?}[{index}]: {source}")]
    Provenance {
        key: String,
        index: usize,
        source: CodecError,
    },
}

/// Top-level object entries in file order, duplicates kept.
struct Entries(Vec<(String, Value)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Value>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// Parses a table from InfoTabS-style (optionally extended) JSON.
pub fn parse_table(json_text: &str) -> Result<Table, TableError> {
    let entries: Entries = serde_json::from_str(json_text).map_err(|e| TableError::MalformedJson(e.to_string()))?;
    table_from_entries(entries.0)
}

fn string_list(key: &str, v: Value) -> Result<Vec<String>, TableError> {
    let Value::Array(items) = v else {
        return Err(TableError::MalformedJson(format!(
            "value of {key:?} must be a list of strings"
        )));
    };
    items
        .into_iter()
        .map(|item| match item {
            Value::String(s) => Ok(s),
            other => Err(TableError::MalformedJson(format!(
                "value of {key:?} contains non-string {other}"
            ))),
        })
        .collect()
}

fn table_from_entries(entries: Vec<(String, Value)>) -> Result<Table, TableError> {
    let mut seen = HashSet::new();
    for (k, _) in &entries {
        if !seen.insert(k.as_str()) {
            return Err(TableError::DuplicateKey(k.clone()));
        }
    }

    let mut title = None;
    let mut meta = None;
    let mut sidecar = None;
    let mut sections = Vec::new();
    for (key, value) in entries {
        match key.as_str() {
            TITLE_KEY => {
                let mut list = string_list(&key, value)?;
                if list.len() != 1 {
                    return Err(TableError::MalformedJson("title must be a one-element list".into()));
                }
                title = list.pop();
            }
            META_KEY => match value {
                Value::Object(m) => meta = Some(m),
                _ => return Err(TableError::MalformedJson("_meta must be an object".into())),
            },
            PROVENANCE_KEY => match value {
                Value::Object(m) => sidecar = Some(m),
                _ => return Err(TableError::MalformedJson("_provenance must be an object".into())),
            },
            _ => {
                if key.trim().is_empty() {
                    return Err(TableError::EmptyKey);
                }
                let values = string_list(&key, value)?.into_iter().map(ValueCell::new).collect();
                sections.push(Section { key, values });
            }
        }
    }

    let title = title.ok_or(TableError::MissingField("title"))?;
    if title.trim().is_empty() {
        return Err(TableError::MissingField("title"));
    }
    if sections.is_empty() {
        return Err(TableError::EmptyTable);
    }

    let (table_id, category) = match meta {
        None => (title.clone(), String::new()),
        Some(m) => {
            let field = |name: &'static str| -> Result<Option<String>, TableError> {
                match m.get(name) {
                    None => Ok(None),
                    Some(Value::String(s)) => Ok(Some(s.clone())),
                    Some(_) => Err(TableError::MalformedJson(format!("_meta.{name} must be a string"))),
                }
            };
            let category = field("category")?.ok_or(TableError::MissingField("category"))?;
            let table_id = field("table_id")?
                .filter(|s| !s.is_empty())
                .unwrap_or_else(|| title.clone());
            (table_id, category)
        }
    };

    if let Some(sidecar) = sidecar {
        for (key, bits) in sidecar {
            let section = sections
                .iter_mut()
                .find(|s| s.key == key)
                .ok_or_else(|| TableError::MalformedJson(format!("_provenance names unknown key {key:?}")))?;
            let bits = string_list(&key, bits)?;
            if bits.len() != section.values.len() {
                return Err(TableError::MalformedJson(format!(
                    "_provenance for {key:?} has {} entries, key has {} values",
                    bits.len(),
                    section.values.len()
                )));
            }
            for (index, (cell, b)) in section.values.iter_mut().zip(&bits).enumerate() {
                cell.provenance = decode_value_provenance(b).map_err(|source| TableError::Provenance {
                    key: key.clone(),
                    index,
                    source,
                })?;
            }
        }
    }

    Ok(Table {
        table_id,
        title,
        category,
        sections,
    })
}

/// Builds the canonical JSON object for a table.
pub fn table_to_value(t: &Table) -> Value {
    let mut obj = Map::new();
    obj.insert(TITLE_KEY.into(), Value::Array(vec![Value::String(t.title.clone())]));
    for s in &t.sections {
        obj.insert(
            s.key.clone(),
            Value::Array(s.values.iter().map(|c| Value::String(c.text.clone())).collect()),
        );
    }
    let mut meta = Map::new();
    meta.insert("table_id".into(), Value::String(t.table_id.clone()));
    meta.insert("category".into(), Value::String(t.category.clone()));
    obj.insert(META_KEY.into(), Value::Object(meta));

    if t.cells().any(|(_, c)| c.provenance != ValueProvenance::UNTOUCHED) {
        let mut side = Map::new();
        for s in &t.sections {
            side.insert(
                s.key.clone(),
                Value::Array(
                    s.values
                        .iter()
                        .map(|c| Value::String(c.provenance.to_string()))
                        .collect(),
                ),
            );
        }
        obj.insert(PROVENANCE_KEY.into(), Value::Object(side));
    }
    Value::Object(obj)
}

/// Canonical text form: 2-space indented, keys in section order, trailing
/// newline.
pub fn serialize_table(t: &Table) -> String {
    let mut out = serde_json::to_string_pretty(&table_to_value(t)).expect("JSON value always serializes");
    out.push('\n');
    out
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        table_to_value(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Table {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Entries::deserialize(deserializer)?;
        table_from_entries(entries.0).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NYSE: &str = r#"{
        "title": ["New York Stock Exchange"],
        "Type": ["Stock exchange"],
        "Location": ["New York City, New York, U.S."],
        "Founded": ["May 17, 1792; 226 years ago"],
        "Currency": ["United States dollar"],
        "No. of listings": ["2,400"],
        "Volume": ["US$20.161 trillion (2011)"]
    }"#;

    #[test]
    fn parses_infotabs_table_in_file_order() {
        let t = parse_table(NYSE).unwrap();
        assert_eq!(t.title, "New York Stock Exchange");
        assert_eq!(t.table_id, "New York Stock Exchange");
        assert_eq!(
            t.keys().collect::<Vec<_>>(),
            ["Type", "Location", "Founded", "Currency", "No. of listings", "Volume"]
        );
        assert_eq!(
            t.section("Type").unwrap().values,
            vec![ValueCell::new("Stock exchange")]
        );
    }

    #[test]
    fn minimal_table_has_untouched_provenance() {
        let t = parse_table(r#"{"title":["X"],"K":["v"]}"#).unwrap();
        assert_eq!(t.sections.len(), 1);
        assert_eq!(t.cell("K", 0).unwrap().provenance.to_string(), "0000000");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = parse_table(r#"{"title":["X"],"Founded":["1792"],"Founded":["1817"]}"#).unwrap_err();
        assert_eq!(err, TableError::DuplicateKey("Founded".into()));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse_table("{"), Err(TableError::MalformedJson(_))));
        assert!(matches!(parse_table("[1]"), Err(TableError::MalformedJson(_))));
        assert_eq!(parse_table(r#"{"K":["v"]}"#), Err(TableError::MissingField("title")));
        assert_eq!(parse_table(r#"{"title":["X"]}"#), Err(TableError::EmptyTable));
        assert_eq!(
            parse_table(r#"{"title":["X"],"K":["v"],"_meta":{"table_id":"T1"}}"#),
            Err(TableError::MissingField("category"))
        );
        assert!(matches!(
            parse_table(r#"{"title":["X"],"K":[1]}"#),
            Err(TableError::MalformedJson(_))
        ));
        assert!(matches!(
            parse_table(r#"{"title":["X"],"K":["v"],"_provenance":{"K":["1100000"]}}"#),
            Err(TableError::Provenance { index: 0, .. })
        ));
        assert!(matches!(
            parse_table(r#"{"title":["X"],"K":["v"],"_provenance":{"K":["0000000","0000000"]}}"#),
            Err(TableError::MalformedJson(_))
        ));
    }

    #[test]
    fn extended_format_round_trips_byte_identically() {
        let src = r#"{"title":["Flatliners"],"Box Office":["$ 140.7 million"],"Budget":["$85 million","$26 million"],
            "_meta":{"table_id":"T14A","category":"Movie"},
            "_provenance":{"Box Office":["1010001"],"Budget":["0111001","0000000"]}}"#;
        let t = parse_table(src).unwrap();
        assert_eq!(t.table_id, "T14A");
        assert_eq!(t.category, "Movie");
        assert_eq!(t.cell("Budget", 0).unwrap().provenance.to_string(), "0111001");
        let once = serialize_table(&t);
        let reparsed = parse_table(&once).unwrap();
        assert_eq!(reparsed, t);
        assert_eq!(serialize_table(&reparsed), once);
        assert!(once.contains("\"1010001\""));
    }

    #[test]
    fn canonical_layout() {
        let t = parse_table(r#"{"title":["X"],"K":["v"]}"#).unwrap();
        assert_eq!(
            serialize_table(&t),
            "{\n  \"title\": [\n    \"X\"\n  ],\n  \"K\": [\n    \"v\"\n  ],\n  \"_meta\": {\n    \"table_id\": \"X\",\n    \"category\": \"\"\n  }\n}\n"
        );
    }
}
