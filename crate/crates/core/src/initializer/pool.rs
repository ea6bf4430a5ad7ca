//! Corpus-wide value pool indexed by (dataset, category, table, key).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::InitError;
use crate::codec::ValueProvenance;
use crate::model::{DatasetTag, Table};

/// The 4-bit shuffle class: which location dimensions differ between the
/// cell a value lands in and the place it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SourceClass {
    pub other_dataset: bool,
    pub other_category: bool,
    pub other_table: bool,
    pub other_key: bool,
}

impl SourceClass {
    pub fn from_bits(bits: u8) -> Self {
        Self {
            other_dataset: bits & 0b1000 != 0,
            other_category: bits & 0b0100 != 0,
            other_table: bits & 0b0010 != 0,
            other_key: bits & 0b0001 != 0,
        }
    }

    pub fn to_bits(self) -> u8 {
        (u8::from(self.other_dataset) << 3)
            | (u8::from(self.other_category) << 2)
            | (u8::from(self.other_table) << 1)
            | u8::from(self.other_key)
    }

    /// All 16 bit patterns, valid or not, in numeric order.
    pub fn all() -> impl Iterator<Item = SourceClass> {
        (0u8..16).map(SourceClass::from_bits)
    }

    /// The 10 patterns that respect the same-table rule.
    pub fn valid() -> impl Iterator<Item = SourceClass> {
        Self::all().filter(|c| c.is_valid())
    }

    /// A value from the same table cannot come from another dataset or category.
    pub fn is_valid(self) -> bool {
        self.other_table || !(self.other_dataset || self.other_category)
    }

    /// Provenance of a freshly shuffled cell of this class.
    pub fn provenance(self) -> ValueProvenance {
        ValueProvenance {
            from_other_dataset: self.other_dataset,
            from_other_category: self.other_category,
            from_other_table: self.other_table,
            from_other_key: self.other_key,
            ..ValueProvenance::UNTOUCHED
        }
    }
}

impl fmt::Display for SourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.to_bits())
    }
}

impl FromStr for SourceClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 4 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(format!("source class must be 4 bits, got {s:?}"));
        }
        Ok(Self::from_bits(u8::from_str_radix(s, 2).expect("checked binary")))
    }
}

impl Serialize for SourceClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SourceClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Where a value sits in the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PoolLocation {
    pub dataset: DatasetTag,
    pub category: String,
    pub table_id: String,
    pub key: String,
}

impl PoolLocation {
    /// Class of a value moved from `self` into a cell located at `dest`.
    pub fn class_relative_to(&self, dest: &PoolLocation) -> SourceClass {
        SourceClass {
            other_dataset: self.dataset != dest.dataset,
            other_category: self.category != dest.category,
            other_table: self.table_id != dest.table_id,
            other_key: self.key != dest.key,
        }
    }
}

/// A pool value together with its location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate<'a> {
    pub dataset: DatasetTag,
    pub category: &'a str,
    pub table_id: &'a str,
    pub key: &'a str,
    pub text: &'a str,
}

impl Candidate<'_> {
    pub fn location(&self) -> PoolLocation {
        PoolLocation {
            dataset: self.dataset,
            category: self.category.to_owned(),
            table_id: self.table_id.to_owned(),
            key: self.key.to_owned(),
        }
    }
}

type KeyIndex = BTreeMap<String, Vec<String>>;
type TableIndex = BTreeMap<String, KeyIndex>;
type CategoryIndex = BTreeMap<String, TableIndex>;

/// Values of the whole corpus, nested dataset → category → table → key.
#[derive(Debug, Clone, Default)]
pub struct ValuePool {
    index: BTreeMap<DatasetTag, CategoryIndex>,
    tables: HashMap<String, (DatasetTag, String)>,
}

/// Indexes every value of the corpus. Sections without values are skipped.
pub fn build_value_pool<'a, I>(tables: I) -> Result<ValuePool, InitError>
where
    I: IntoIterator<Item = (&'a Table, DatasetTag)>,
{
    let mut pool = ValuePool::default();
    for (table, tag) in tables {
        if pool.tables.contains_key(&table.table_id) {
            return Err(InitError::DuplicateTableId(table.table_id.clone()));
        }
        pool.tables
            .insert(table.table_id.clone(), (tag, table.category.clone()));
        let keys = pool
            .index
            .entry(tag)
            .or_default()
            .entry(table.category.clone())
            .or_default()
            .entry(table.table_id.clone())
            .or_default();
        for section in table.sections.iter().filter(|s| !s.values.is_empty()) {
            keys.insert(
                section.key.clone(),
                section.values.iter().map(|c| c.text.clone()).collect(),
            );
        }
    }
    Ok(pool)
}

impl ValuePool {
    pub fn table_count(&self) -> usize {
        self.tables.len()
    }

    /// Dataset tag and category recorded for a table.
    pub fn table_info(&self, table_id: &str) -> Option<(DatasetTag, &str)> {
        self.tables.get(table_id).map(|(tag, cat)| (*tag, cat.as_str()))
    }

    /// The pool location of `key` inside table `table_id`.
    pub fn origin(&self, table_id: &str, key: &str) -> Option<PoolLocation> {
        self.table_info(table_id).map(|(dataset, category)| PoolLocation {
            dataset,
            category: category.to_owned(),
            table_id: table_id.to_owned(),
            key: key.to_owned(),
        })
    }

    pub fn values_at(&self, loc: &PoolLocation) -> Option<&[String]> {
        self.index
            .get(&loc.dataset)?
            .get(&loc.category)?
            .get(&loc.table_id)?
            .get(&loc.key)
            .map(Vec::as_slice)
    }

    /// Every value whose location differs from `origin` in exactly the
    /// dimensions `class` marks as different. Invalid classes match nothing.
    pub fn candidates(&self, origin: &PoolLocation, class: SourceClass) -> Vec<Candidate<'_>> {
        let mut out = Vec::new();
        if !class.is_valid() {
            return out;
        }
        for (&dataset, categories) in &self.index {
            if (dataset != origin.dataset) != class.other_dataset {
                continue;
            }
            for (category, tables) in categories {
                if (*category != origin.category) != class.other_category {
                    continue;
                }
                for (table_id, keys) in tables {
                    if (*table_id != origin.table_id) != class.other_table {
                        continue;
                    }
                    if class.other_key {
                        for (key, values) in keys.iter().filter(|(k, _)| **k != origin.key) {
                            push_values(&mut out, dataset, category, table_id, key, values);
                        }
                    } else if let Some((key, values)) = keys.get_key_value(&origin.key) {
                        push_values(&mut out, dataset, category, table_id, key, values);
                    }
                }
            }
        }
        out
    }

    /// Iterates over every (location, value) pair in the pool.
    pub fn iter(&self) -> impl Iterator<Item = Candidate<'_>> {
        self.index.iter().flat_map(|(&dataset, cats)| {
            cats.iter().flat_map(move |(category, tables)| {
                tables.iter().flat_map(move |(table_id, keys)| {
                    keys.iter().flat_map(move |(key, values)| {
                        values.iter().map(move |text| Candidate {
                            dataset,
                            category,
                            table_id,
                            key,
                            text,
                        })
                    })
                })
            })
        })
    }
}

fn push_values<'a>(
    out: &mut Vec<Candidate<'a>>,
    dataset: DatasetTag,
    category: &'a str,
    table_id: &'a str,
    key: &'a str,
    values: &'a [String],
) {
    out.extend(values.iter().map(|text| Candidate {
        dataset,
        category,
        table_id,
        key,
        text,
    }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Section, ValueCell};

    fn table(id: &str, category: &str, rows: &[(&str, &[&str])]) -> Table {
        Table {
            table_id: id.into(),
            title: id.into(),
            category: category.into(),
            sections: rows
                .iter()
                .map(|(k, vs)| Section::new(*k, vs.iter().map(|v| ValueCell::new(*v)).collect()))
                .collect(),
        }
    }

    #[test]
    fn same_category_other_table_lookup() {
        let t1 = table("t1", "Person", &[("Born", &["1950"]), ("Died", &["2001"])]);
        let t2 = table("t2", "Person", &[("Born", &["1931"]), ("Died", &["1999"])]);
        let pool = build_value_pool([(&t1, DatasetTag::Test), (&t2, DatasetTag::Test)]).unwrap();
        let origin = pool.origin("t1", "Born").unwrap();
        let got: Vec<_> = pool
            .candidates(&origin, "0010".parse().unwrap())
            .iter()
            .map(|c| (c.table_id, c.key, c.text))
            .collect();
        assert_eq!(got, [("t2", "Born", "1931")]);

        let same: Vec<_> = pool
            .candidates(&origin, SourceClass::default())
            .iter()
            .map(|c| (c.table_id, c.key, c.text))
            .collect();
        assert_eq!(same, [("t1", "Born", "1950")]);
    }

    #[test]
    fn duplicate_table_ids_rejected() {
        let t1 = table("t1", "Person", &[("Born", &["1950"])]);
        let err = build_value_pool([(&t1, DatasetTag::Test), (&t1, DatasetTag::Train)]).unwrap_err();
        assert!(matches!(err, InitError::DuplicateTableId(id) if id == "t1"));
    }

    #[test]
    fn class_validity_and_strings() {
        assert_eq!(SourceClass::valid().count(), 10);
        assert!(!"1000".parse::<SourceClass>().unwrap().is_valid());
        assert_eq!("0111".parse::<SourceClass>().unwrap().to_string(), "0111");
        assert_eq!(
            "1010".parse::<SourceClass>().unwrap().provenance().to_string(),
            "1010000"
        );
        assert!("10".parse::<SourceClass>().is_err());
    }
}
