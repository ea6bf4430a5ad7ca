use proptest::prelude::{prop_assert_eq, proptest};
use tabforge_core::codec::*;

fn bitstring(n: u8, width: usize) -> String {
    format!("{n:0width$b}")
}

// Written from the two validity rules directly.
fn valid_by_hand(s: &str) -> bool {
    let b: Vec<bool> = s.chars().map(|c| c == '1').collect();
    let source_ok = b[2] || (!b[0] && !b[1]);
    let added_ok = !b[5] || !b[..5].iter().any(|&x| x);
    source_ok && added_ok
}

#[test]
fn all_128_provenance_patterns() {
    let mut valid = 0;
    for n in 0u8..128 {
        let s = bitstring(n, 7);
        match decode_value_provenance(&s) {
            Ok(p) => {
                assert!(valid_by_hand(&s), "{s} accepted");
                assert_eq!(encode_value_provenance(p).unwrap(), s);
                assert_eq!(p.to_bits(), n);
                valid += 1;
            }
            Err(CodecError::InvariantViolation { .. }) => assert!(!valid_by_hand(&s), "{s} rejected"),
            Err(e) => panic!("{s}: {e}"),
        }
        let (p, violation) = decode_value_provenance_lenient(&s).unwrap();
        assert_eq!(p.to_string(), s);
        assert_eq!(violation.is_none(), valid_by_hand(&s));
    }
    assert_eq!(valid, 42);
}

#[test]
fn all_64_strategy_patterns() {
    for n in 0u8..64 {
        let s = bitstring(n, 6);
        let f = decode_strategy_flags(&s).unwrap();
        assert_eq!(encode_strategy_flags(f), s);
        assert_eq!(f.to_bits(), n);
    }
    assert_eq!(
        encode_strategy_flags(StrategyFlags::default().with(Strategy::NewHypothesis)),
        "000010"
    );
    let f = decode_strategy_flags("100001").unwrap();
    assert_eq!(
        f.iter_set().collect::<Vec<_>>(),
        [Strategy::TableChangeFlip, Strategy::Other]
    );
}

#[test]
fn worked_example_prefix_glosses() {
    let (p, _) = decode_value_provenance_lenient("1010010").unwrap();
    assert_eq!(
        p.source_gloss(),
        "1010: different dataset, same category, different table, same key"
    );
    let p = decode_value_provenance("0111000").unwrap();
    assert_eq!(
        p.source_gloss(),
        "0111: same dataset, different category, different table, different key"
    );
}

// Worked examples print suffix 010 on edited values. In copy/add/edit bit
// order 010 means "newly added", which a shuffled value cannot be. The
// editor writes edits as 001.
#[test]
fn edited_suffix_follows_bit_order() {
    let (p, violation) = decode_value_provenance_lenient("1010010").unwrap();
    assert!(p.newly_added && !p.text_edited && !p.copied_from_original);
    assert_eq!(violation, Some(ProvenanceViolation::AddedWithSource));
    assert!(decode_value_provenance("1010010").is_err());

    let edited = ValueProvenance {
        text_edited: true,
        ..decode_value_provenance("1010000").unwrap()
    };
    assert_eq!(edited.to_string(), "1010001");
    assert_eq!(ValueProvenance::copied().to_string(), "0000100");
    assert_eq!(ValueProvenance::added().to_string(), "0000010");
}

#[test]
fn malformed_strings() {
    assert!(matches!(
        decode_value_provenance("101"),
        Err(CodecError::BadLength { expected: 7, found: 3 })
    ));
    assert!(matches!(
        decode_value_provenance("10100x0"),
        Err(CodecError::BadChar { index: 5, .. })
    ));
    assert!(matches!(
        decode_strategy_flags("1000000"),
        Err(CodecError::BadLength { expected: 6, .. })
    ));
}

proptest! {
    #[test]
    fn arbitrary_strings_never_panic(s in "[01x]{0,9}") {
        let strict = decode_value_provenance(&s);
        if let Ok(p) = strict {
            prop_assert_eq!(encode_value_provenance(p).unwrap(), s.clone());
        }
        let _ = decode_strategy_flags(&s);
    }
}
