//! Value type tagging and key → type-group assignment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::Table;

/// Coarse entity type of a key's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TypeGroup {
    Date,
    Money,
    Number,
    Duration,
    Name,
    Other,
}

impl fmt::Display for TypeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeGroup::Date => "DATE",
            TypeGroup::Money => "MONEY",
            TypeGroup::Number => "NUMBER",
            TypeGroup::Duration => "DURATION",
            TypeGroup::Name => "NAME",
            TypeGroup::Other => "OTHER",
        })
    }
}

/// Assigns a type group to a single value string.
pub trait ValueTypeTagger {
    fn tag(&self, value: &str) -> TypeGroup;
}

impl<F: Fn(&str) -> TypeGroup> ValueTypeTagger for F {
    fn tag(&self, value: &str) -> TypeGroup {
        self(value)
    }
}

const MONTH: &str = r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sept?(?:ember)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\.?";

static MONEY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(?:US\$|\$|£|€|¥|₹)\s*\d|\b\d[\d,.]*\s*(?:dollars|euros|pounds|USD|EUR|GBP)\b").unwrap()
});
static DURATION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*\d+(?:\.\d+)?\s*(?:minutes?|mins?|hours?|hrs?|seconds?|secs?|days?|weeks?)\b").unwrap()
});
static DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)\b{MONTH}\s+(?:\d{{1,2}},?\s+)?\d{{4}}\b|\b\d{{1,2}}\s+{MONTH}\s+\d{{4}}\b|\b\d{{4}}-\d{{2}}-\d{{2}}\b|^\s*(?:1\d{{3}}|20\d{{2}})\s*(?:[–-]\s*(?:\d{{4}}|present)\s*)?$"
    ))
    .unwrap()
});
static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*[-+]?\d[\d,]*(?:\.\d+)?\s*(?:\([^)]*\))?\s*$").unwrap());
static NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\p{Lu}[\p{L}.'-]*(?:\s+\p{Lu}[\p{L}.'-]*){1,3}$").unwrap());

/// Regex heuristics, tried in order money, duration, date, number, name.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicTagger;

impl ValueTypeTagger for HeuristicTagger {
    fn tag(&self, value: &str) -> TypeGroup {
        let v = value.trim();
        if MONEY.is_match(v) {
            TypeGroup::Money
        } else if DURATION.is_match(v) {
            TypeGroup::Duration
        } else if DATE.is_match(v) {
            TypeGroup::Date
        } else if NUMBER.is_match(v) {
            TypeGroup::Number
        } else if NAME.is_match(v) {
            TypeGroup::Name
        } else {
            TypeGroup::Other
        }
    }
}

/// Key → type group. Keys not in the map are untyped and compatible with
/// every other key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryMap {
    groups: BTreeMap<String, TypeGroup>,
}

impl CategoryMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, group: TypeGroup) {
        self.groups.insert(key.into(), group);
    }

    pub fn group(&self, key: &str) -> Option<TypeGroup> {
        self.groups.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, TypeGroup)> {
        self.groups.iter().map(|(k, g)| (k.as_str(), *g))
    }

    /// Whether a value under `src_key` may be placed under `dst_key`.
    pub fn compatible(&self, src_key: &str, dst_key: &str) -> bool {
        match (self.group(src_key), self.group(dst_key)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

impl FromIterator<(String, TypeGroup)> for CategoryMap {
    fn from_iter<I: IntoIterator<Item = (String, TypeGroup)>>(iter: I) -> Self {
        Self {
            groups: iter.into_iter().collect(),
        }
    }
}

/// Assigns each key the strict-majority type of its values across the
/// corpus; keys without a strict majority stay untyped.
pub fn build_category_map<'a, I, T>(tables: I, tagger: &T) -> CategoryMap
where
    I: IntoIterator<Item = &'a Table>,
    T: ValueTypeTagger + ?Sized,
{
    let mut counts: BTreeMap<&str, HashMap<TypeGroup, usize>> = BTreeMap::new();
    for table in tables {
        for section in &table.sections {
            let entry = counts.entry(section.key.as_str()).or_default();
            for cell in &section.values {
                *entry.entry(tagger.tag(&cell.text)).or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter_map(|(key, tally)| {
            let total: usize = tally.values().sum();
            tally
                .into_iter()
                .find(|&(_, n)| 2 * n > total)
                .map(|(group, _)| (key.to_owned(), group))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Section, ValueCell};

    #[test]
    fn heuristic_tags() {
        let t = HeuristicTagger;
        assert_eq!(t.tag("May 17, 1792; 226 years ago"), TypeGroup::Date);
        assert_eq!(t.tag("17 May 1792"), TypeGroup::Date);
        assert_eq!(t.tag("1999-04-01"), TypeGroup::Date);
        assert_eq!(t.tag("1950"), TypeGroup::Date);
        assert_eq!(t.tag("$26 million"), TypeGroup::Money);
        assert_eq!(t.tag("US$20.161 trillion (2011)"), TypeGroup::Money);
        assert_eq!(t.tag("113 minutes"), TypeGroup::Duration);
        assert_eq!(t.tag("2,400"), TypeGroup::Number);
        assert_eq!(t.tag("Michael Douglas"), TypeGroup::Name);
        assert_eq!(t.tag("Stock exchange"), TypeGroup::Other);
    }

    fn single_key_table(id: &str, key: &str, values: &[&str]) -> Table {
        Table {
            table_id: id.into(),
            title: id.into(),
            category: "Movie".into(),
            sections: vec![Section::new(key, values.iter().map(|v| ValueCell::new(*v)).collect())],
        }
    }

    #[test]
    fn majority_assignment() {
        let tables = [
            single_key_table("t1", "Founded", &["May 17, 1792; 226 years ago"]),
            single_key_table("t2", "Box office", &["$26 million", "$61.3 million"]),
            single_key_table("t3", "Mixed", &["1950", "Stock exchange"]),
        ];
        let map = build_category_map(&tables, &HeuristicTagger);
        assert_eq!(map.group("Founded"), Some(TypeGroup::Date));
        assert_eq!(map.group("Box office"), Some(TypeGroup::Money));
        assert_eq!(map.group("Mixed"), None);
    }

    #[test]
    fn closure_tagger() {
        let tables = [single_key_table("t1", "K", &["x"])];
        let map = build_category_map(&tables, &|_: &str| TypeGroup::Name);
        assert_eq!(map.group("K"), Some(TypeGroup::Name));
    }

    #[test]
    fn serde_shape() {
        let mut m = CategoryMap::new();
        m.insert("Born", TypeGroup::Date);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"Born":"DATE"}"#);
    }
}
