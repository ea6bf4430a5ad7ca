//! Brute-force checks that do not share code paths with the library.

use std::collections::BTreeSet;

use tabforge_core::initializer::TypeGroup;
use tabforge_core::model::{DatasetTag, Table};

/// The 4-bit prefixes a value with `text` could legitimately carry when it
/// lands under `dest_key` of `dest_table`: one per corpus cell holding that
/// text, found by scanning every cell.
pub fn scan_source_prefixes(
    corpus: &[(Table, DatasetTag)],
    dest_table: &str,
    dest_key: &str,
    text: &str,
) -> BTreeSet<String> {
    let (dest, dest_tag) = corpus
        .iter()
        .find(|(t, _)| t.table_id == dest_table)
        .expect("destination table in corpus");
    let mut out = BTreeSet::new();
    for (t, tag) in corpus {
        for s in &t.sections {
            for c in &s.values {
                if c.text != text {
                    continue;
                }
                let bits = [
                    tag != dest_tag,
                    t.category != dest.category,
                    t.table_id != dest.table_id,
                    s.key != dest_key,
                ];
                out.insert(bits.iter().map(|&b| if b { '1' } else { '0' }).collect());
            }
        }
    }
    out
}

/// Move legality from hand-assigned groups: same group, or either untyped.
pub fn move_allowed(src: Option<TypeGroup>, dst: Option<TypeGroup>) -> bool {
    match (src, dst) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    }
}
