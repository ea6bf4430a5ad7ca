//! Tab-separated files: the hypothesis/pair table and shared field escaping.
//!
//! Fields escape `\`, tab, newline and carriage return as `\\`, `\t`, `\n`,
//! `\r`. Key lists are joined with `;`, and a literal `;` inside a key is
//! written `\;`.

use thiserror::Error;

use crate::codec::{decode_strategy_flags, encode_strategy_flags, CodecError, StrategyFlags};
use crate::model::{Label, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsvError {
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    BadField { line: usize, message: String },
    #[error("line {line}: {source}")]
    Bits { line: usize, source: CodecError },
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// Joins keys with `;`, escaping `;` and the TSV specials.
pub fn join_keys(keys: &[String]) -> String {
    keys.iter()
        .map(|k| escape_field(k).replace(';', "\\;"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Inverse of [`join_keys`]; the empty string is the empty list.
pub fn split_keys(field: &str) -> Vec<String> {
    if field.is_empty() {
        return Vec::new();
    }
    let mut keys = Vec::new();
    let mut current = String::new();
    let mut chars = field.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => {
                current.push('\\');
                if let Some(next) = chars.next() {
                    current.push(next);
                }
            }
            ';' => keys.push(unescape_field(&std::mem::take(&mut current))),
            c => current.push(c),
        }
    }
    keys.push(unescape_field(&current));
    keys
}

/// Splits a data line into raw (still escaped) fields.
pub fn split_line(line: &str) -> Vec<&str> {
    line.trim_end_matches(['\n', '\r']).split('\t').collect()
}

/// One row of the hypothesis/pairs TSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRow {
    pub pair_id: String,
    pub table_id: String,
    pub variant: Variant,
    pub text: String,
    pub label: Label,
    pub strategies: StrategyFlags,
    pub relevant_keys: Vec<String>,
}

pub const PAIRS_HEADER: &str = "pair_id\ttable_id\tvariant\thypothesis_text\tlabel\tstrategy_bits\trelevant_keys";

pub fn write_pair_rows(rows: &[PairRow]) -> String {
    let mut out = String::from(PAIRS_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            escape_field(&r.pair_id),
            escape_field(&r.table_id),
            r.variant.code().to_owned(),
            escape_field(&r.text),
            r.label.code().to_owned(),
            encode_strategy_flags(r.strategies),
            join_keys(&r.relevant_keys),
        ];
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}

/// Reads pair rows; a leading header line and blank lines are skipped.
pub fn read_pair_rows(text: &str) -> Result<Vec<PairRow>, TsvError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || (i == 0 && line.starts_with("pair_id\t")) {
            continue;
        }
        let f = split_line(line);
        if f.len() != 7 {
            return Err(TsvError::ColumnCount {
                line: line_no,
                expected: 7,
                found: f.len(),
            });
        }
        let bad = |message: String| TsvError::BadField { line: line_no, message };
        rows.push(PairRow {
            pair_id: unescape_field(f[0]),
            table_id: unescape_field(f[1]),
            variant: f[2].parse().map_err(|e| bad(format!("{e}")))?,
            text: unescape_field(f[3]),
            label: f[4].parse().map_err(|e| bad(format!("{e}")))?,
            strategies: decode_strategy_flags(f[5]).map_err(|source| TsvError::Bits { line: line_no, source })?,
            relevant_keys: split_keys(f[6]),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_rows_with_header() {
        let text = "pair_id\ttable_id\tvariant\thypothesis_text\tlabel\tstrategy_bits\trelevant_keys\n\
                    T14_A_0\tT14\tA\tFlatliners made over double.\tC\t100000\tBox Office;Budget\n";
        let rows = read_pair_rows(text).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].variant, Variant::A);
        assert_eq!(rows[0].label, Label::Contradict);
        assert!(rows[0].strategies.table_change_flip);
        assert_eq!(rows[0].relevant_keys, ["Box Office", "Budget"]);
    }

    #[test]
    fn bad_rows() {
        assert!(matches!(
            read_pair_rows("a\tb\n"),
            Err(TsvError::ColumnCount { line: 1, .. })
        ));
        assert!(matches!(
            read_pair_rows("p\tt\tD\tx\tE\t000000\t\n"),
            Err(TsvError::BadField { .. })
        ));
        assert!(matches!(
            read_pair_rows("p\tt\tA\tx\tE\t00000\t\n"),
            Err(TsvError::Bits { .. })
        ));
    }

    proptest! {
        #[test]
        fn rows_round_trip(
            text in "[a-zA-Z0-9 \\t\\n\\\\;.]{0,30}",
            keys in proptest::collection::vec("[a-zA-Z;\\\\ ]{1,8}", 0..4),
            bits in 0u8..64,
        ) {
            let row = PairRow {
                pair_id: "T1_A_0".into(),
                table_id: "T1".into(),
                variant: Variant::B,
                text,
                label: Label::Neutral,
                strategies: StrategyFlags::from_bits(bits),
                relevant_keys: keys,
            };
            let written = write_pair_rows(std::slice::from_ref(&row));
            prop_assert_eq!(read_pair_rows(&written).unwrap(), vec![row]);
        }
    }
}
