//! Bitstring codecs for per-cell value provenance and per-hypothesis
//! strategy flags.
//!
//! Value provenance is a 7-character `'0'`/`'1'` string. The first four
//! characters record where an automatically shuffled value came from
//! relative to the cell it landed in (dataset, category, table, key); the
//! last three record manual edits (copied from the original, newly added,
//! text edited). Strategy flags are a 6-character string, one character per
//! hypothesis perturbation strategy in checkbox order.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Length of an encoded [`ValueProvenance`].
pub const PROVENANCE_BITS: usize = 7;
/// Length of an encoded [`StrategyFlags`].
pub const STRATEGY_BITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bitstring has length {found}, expected {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("bitstring has invalid character {ch:?} at index {index}")]
    BadChar { index: usize, ch: char },
    #[error("provenance {bits} violates invariant: {violation}")]
    InvariantViolation {
        bits: String,
        violation: ProvenanceViolation,
    },
}

/// A broken [`ValueProvenance`] invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ProvenanceViolation {
    /// Dataset or category bit set while the value comes from the same table.
    #[error("dataset/category bit set while table bit is clear")]
    SourceWithoutTable,
    /// A newly added value also claims a shuffle or copy source.
    #[error("newly added value carries a source bit")]
    AddedWithSource,
}

/// 7-bit metadata attached to every table value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ValueProvenance {
    pub from_other_dataset: bool,
    pub from_other_category: bool,
    pub from_other_table: bool,
    pub from_other_key: bool,
    pub copied_from_original: bool,
    pub newly_added: bool,
    pub text_edited: bool,
}

impl ValueProvenance {
    /// Provenance of an untouched cell.
    pub const UNTOUCHED: Self = Self {
        from_other_dataset: false,
        from_other_category: false,
        from_other_table: false,
        from_other_key: false,
        copied_from_original: false,
        newly_added: false,
        text_edited: false,
    };

    /// Provenance of a value typed in by an annotator.
    pub fn added() -> Self {
        Self {
            newly_added: true,
            ..Self::UNTOUCHED
        }
    }

    /// Provenance of a value copied out of the original table.
    pub fn copied() -> Self {
        Self {
            copied_from_original: true,
            ..Self::UNTOUCHED
        }
    }

    /// Packs the flags into the low 7 bits of a byte; bit 1 is the most
    /// significant of the seven.
    pub fn to_bits(self) -> u8 {
        self.as_array().iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b))
    }

    /// Inverse of [`to_bits`](Self::to_bits). Bits above the seventh are ignored.
    pub fn from_bits(bits: u8) -> Self {
        let bit = |i: usize| bits & (1 << (PROVENANCE_BITS - 1 - i)) != 0;
        Self {
            from_other_dataset: bit(0),
            from_other_category: bit(1),
            from_other_table: bit(2),
            from_other_key: bit(3),
            copied_from_original: bit(4),
            newly_added: bit(5),
            text_edited: bit(6),
        }
    }

    fn as_array(self) -> [bool; PROVENANCE_BITS] {
        [
            self.from_other_dataset,
            self.from_other_category,
            self.from_other_table,
            self.from_other_key,
            self.copied_from_original,
            self.newly_added,
            self.text_edited,
        ]
    }

    /// The 4-bit shuffle source prefix (dataset, category, table, key).
    pub fn source_prefix(self) -> String {
        self.as_array()[..4].iter().map(|&b| bit_char(b)).collect()
    }

    /// The prefix with its reading, e.g.
    /// `1010: different dataset, same category, different table, same key`.
    pub fn source_gloss(self) -> String {
        let dims = ["dataset", "category", "table", "key"];
        let parts: Vec<String> = self.as_array()[..4]
            .iter()
            .zip(dims)
            .map(|(&b, d)| format!("{} {d}", if b { "different" } else { "same" }))
            .collect();
        format!("{}: {}", self.source_prefix(), parts.join(", "))
    }

    /// Whether any of the four shuffle-source bits is set.
    pub fn is_shuffled(self) -> bool {
        self.from_other_dataset || self.from_other_category || self.from_other_table || self.from_other_key
    }

    pub fn check(self) -> Result<(), ProvenanceViolation> {
        if !self.from_other_table && (self.from_other_dataset || self.from_other_category) {
            return Err(ProvenanceViolation::SourceWithoutTable);
        }
        if self.newly_added && (self.is_shuffled() || self.copied_from_original) {
            return Err(ProvenanceViolation::AddedWithSource);
        }
        Ok(())
    }

    fn render(self) -> String {
        self.as_array().iter().map(|&b| bit_char(b)).collect()
    }
}

impl fmt::Display for ValueProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Encodes provenance as its 7-character bitstring.
pub fn encode_value_provenance(p: ValueProvenance) -> Result<String, CodecError> {
    p.check().map_err(|violation| CodecError::InvariantViolation {
        bits: p.render(),
        violation,
    })?;
    Ok(p.render())
}

/// Strict decode: rejects bitstrings that break a provenance invariant.
pub fn decode_value_provenance(s: &str) -> Result<ValueProvenance, CodecError> {
    let (p, violation) = decode_value_provenance_lenient(s)?;
    match violation {
        Some(violation) => Err(CodecError::InvariantViolation {
            bits: s.to_owned(),
            violation,
        }),
        None => Ok(p),
    }
}

/// Lenient decode: returns the flags as written plus the violated invariant,
/// if any. Length and character errors are still hard errors.
pub fn decode_value_provenance_lenient(s: &str) -> Result<(ValueProvenance, Option<ProvenanceViolation>), CodecError> {
    let bits = parse_bits::<PROVENANCE_BITS>(s)?;
    let p = ValueProvenance {
        from_other_dataset: bits[0],
        from_other_category: bits[1],
        from_other_table: bits[2],
        from_other_key: bits[3],
        copied_from_original: bits[4],
        newly_added: bits[5],
        text_edited: bits[6],
    };
    Ok((p, p.check().err()))
}

impl Serialize for ValueProvenance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for ValueProvenance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        decode_value_provenance(&s).map_err(serde::de::Error::custom)
    }
}

/// Hypothesis perturbation strategies ticked by the annotator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StrategyFlags {
    pub table_change_flip: bool,
    pub hypothesis_change_flip: bool,
    pub true_info_overlap: bool,
    pub prompt_rewrite: bool,
    pub new_hypothesis: bool,
    pub other: bool,
}

/// One strategy checkbox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    TableChangeFlip,
    HypothesisChangeFlip,
    TrueInfoOverlap,
    PromptRewrite,
    NewHypothesis,
    Other,
}

impl Strategy {
    pub const ALL: [Strategy; STRATEGY_BITS] = [
        Strategy::TableChangeFlip,
        Strategy::HypothesisChangeFlip,
        Strategy::TrueInfoOverlap,
        Strategy::PromptRewrite,
        Strategy::NewHypothesis,
        Strategy::Other,
    ];

    /// Short stable name used as a report group key.
    pub fn name(self) -> &'static str {
        match self {
            Strategy::TableChangeFlip => "table_change_flip",
            Strategy::HypothesisChangeFlip => "hypothesis_change_flip",
            Strategy::TrueInfoOverlap => "true_info_overlap",
            Strategy::PromptRewrite => "prompt_rewrite",
            Strategy::NewHypothesis => "new_hypothesis",
            Strategy::Other => "other",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl StrategyFlags {
    pub fn is_set(&self, s: Strategy) -> bool {
        self.as_array()[s.index()]
    }

    pub fn set(&mut self, s: Strategy, on: bool) {
        let mut arr = self.as_array();
        arr[s.index()] = on;
        *self = Self::from_array(arr);
    }

    pub fn with(mut self, s: Strategy) -> Self {
        self.set(s, true);
        self
    }

    /// Strategies whose checkbox is ticked, in checkbox order.
    pub fn iter_set(&self) -> impl Iterator<Item = Strategy> + '_ {
        Strategy::ALL.into_iter().filter(|s| self.is_set(*s))
    }

    pub fn to_bits(self) -> u8 {
        self.as_array().iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b))
    }

    pub fn from_bits(bits: u8) -> Self {
        let mut arr = [false; STRATEGY_BITS];
        for (i, slot) in arr.iter_mut().enumerate() {
            *slot = bits & (1 << (STRATEGY_BITS - 1 - i)) != 0;
        }
        Self::from_array(arr)
    }

    fn as_array(self) -> [bool; STRATEGY_BITS] {
        [
            self.table_change_flip,
            self.hypothesis_change_flip,
            self.true_info_overlap,
            self.prompt_rewrite,
            self.new_hypothesis,
            self.other,
        ]
    }

    fn from_array(a: [bool; STRATEGY_BITS]) -> Self {
        Self {
            table_change_flip: a[0],
            hypothesis_change_flip: a[1],
            true_info_overlap: a[2],
            prompt_rewrite: a[3],
            new_hypothesis: a[4],
            other: a[5],
        }
    }
}

impl fmt::Display for StrategyFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode_strategy_flags(*self))
    }
}

pub fn encode_strategy_flags(f: StrategyFlags) -> String {
    f.as_array().iter().map(|&b| bit_char(b)).collect()
}

pub fn decode_strategy_flags(s: &str) -> Result<StrategyFlags, CodecError> {
    parse_bits::<STRATEGY_BITS>(s).map(StrategyFlags::from_array)
}

impl Serialize for StrategyFlags {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&encode_strategy_flags(*self))
    }
}

impl<'de> Deserialize<'de> for StrategyFlags {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        decode_strategy_flags(&s).map_err(serde::de::Error::custom)
    }
}

fn bit_char(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

fn parse_bits<const N: usize>(s: &str) -> Result<[bool; N], CodecError> {
    let found = s.chars().count();
    if found != N {
        return Err(CodecError::BadLength { expected: N, found });
    }
    let mut out = [false; N];
    for (index, ch) in s.chars().enumerate() {
        out[index] = match ch {
            '0' => false,
            '1' => true,
            _ => return Err(CodecError::BadChar { index, ch }),
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn untouched_cell_encodes_to_zeros() {
        assert_eq!(encode_value_provenance(ValueProvenance::UNTOUCHED).unwrap(), "0000000");
        assert_eq!(decode_value_provenance("0000000").unwrap(), ValueProvenance::UNTOUCHED);
    }

    #[test]
    fn other_dataset_same_category_other_table_same_key() {
        let p = ValueProvenance {
            from_other_dataset: true,
            from_other_table: true,
            ..Default::default()
        };
        assert_eq!(encode_value_provenance(p).unwrap(), "1010000");
        assert_eq!(decode_value_provenance("1010000").unwrap(), p);
    }

    #[test]
    fn category_table_key_then_text_edit() {
        let p = ValueProvenance {
            from_other_category: true,
            from_other_table: true,
            from_other_key: true,
            text_edited: true,
            ..Default::default()
        };
        assert_eq!(encode_value_provenance(p).unwrap(), "0111001");
    }

    #[test]
    fn strict_decode_rejects_source_without_table() {
        for s in ["1000000", "0100000", "1100000", "1101000"] {
            let err = decode_value_provenance(s).unwrap_err();
            assert!(
                matches!(
                    err,
                    CodecError::InvariantViolation {
                        violation: ProvenanceViolation::SourceWithoutTable,
                        ..
                    }
                ),
                "{s}: {err}"
            );
        }
    }

    #[test]
    fn lenient_decode_reports_violation_with_value() {
        let (p, v) = decode_value_provenance_lenient("1100000").unwrap();
        assert!(p.from_other_dataset && p.from_other_category && !p.from_other_table);
        assert_eq!(v, Some(ProvenanceViolation::SourceWithoutTable));
    }

    #[test]
    fn added_value_with_source_is_rejected() {
        let p = ValueProvenance {
            from_other_key: true,
            newly_added: true,
            ..Default::default()
        };
        assert!(encode_value_provenance(p).is_err());
        assert!(decode_value_provenance("0001010").is_err());
        assert!(decode_value_provenance("0000110").is_err());
        assert!(decode_value_provenance("0000011").is_ok());
    }

    #[test]
    fn length_and_char_errors() {
        assert_eq!(
            decode_value_provenance("000000"),
            Err(CodecError::BadLength { expected: 7, found: 6 })
        );
        assert_eq!(
            decode_value_provenance("00000x0"),
            Err(CodecError::BadChar { index: 5, ch: 'x' })
        );
        assert_eq!(
            decode_strategy_flags("0000000"),
            Err(CodecError::BadLength { expected: 6, found: 7 })
        );
        assert_eq!(
            decode_strategy_flags("0 0000"),
            Err(CodecError::BadChar { index: 1, ch: ' ' })
        );
    }

    #[test]
    fn strategy_flags_examples() {
        assert_eq!(encode_strategy_flags(StrategyFlags::default()), "000000");
        let f = StrategyFlags::default().with(Strategy::NewHypothesis);
        assert_eq!(encode_strategy_flags(f), "000010");
        let d = decode_strategy_flags("100001").unwrap();
        assert_eq!(
            d.iter_set().collect::<Vec<_>>(),
            vec![Strategy::TableChangeFlip, Strategy::Other]
        );
    }

    #[test]
    fn bit_packing_matches_string_order() {
        for bits in 0u8..128 {
            let p = ValueProvenance::from_bits(bits);
            assert_eq!(p.to_bits(), bits);
            assert_eq!(u8::from_str_radix(&p.render(), 2).unwrap(), bits);
        }
        for bits in 0u8..64 {
            let f = StrategyFlags::from_bits(bits);
            assert_eq!(f.to_bits(), bits);
            assert_eq!(u8::from_str_radix(&encode_strategy_flags(f), 2).unwrap(), bits);
        }
    }

    #[test]
    fn serde_uses_bitstrings() {
        let p = decode_value_provenance("1010001").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"1010001\"");
        assert!(serde_json::from_str::<ValueProvenance>("\"1100000\"").is_err());
    }
}
