//! Seeded generators for sessions and edit commands.

use rand::seq::SliceRandom;
use rand::Rng;
use tabforge_core::codec::StrategyFlags;
use tabforge_core::editor::{AnnotationSession, CellRef, EditCommand};
use tabforge_core::initializer::{build_value_pool, init_session, CategoryMap, InitPolicy};
use tabforge_core::model::{Label, Variant};

use crate::corpus::{toy_corpus, toy_hypotheses, TOY_KEY_GROUPS};

/// Category map holding the hand-assigned toy groups.
pub fn toy_category_map() -> CategoryMap {
    TOY_KEY_GROUPS
        .iter()
        .filter_map(|(k, g)| g.map(|g| (k.to_string(), g)))
        .collect()
}

/// An initialized session for toy table `index` (0..6).
pub fn toy_session(index: usize, seed: u64, p: f64) -> AnnotationSession {
    let corpus = toy_corpus();
    let pool = build_value_pool(corpus.iter().map(|(t, d)| (t, *d))).expect("unique ids");
    let original = &corpus[index].0;
    let policy = InitPolicy::default().with_seed(seed).with_probability(p);
    init_session(original, &toy_hypotheses(original), &pool, &toy_category_map(), &policy).expect("toy init")
}

const TEXTS: &[&str] = &[
    "1950",
    "March 3, 1960",
    "George Martin",
    "$3 million",
    "12",
    "45 minutes",
    "jazz",
    "",
    "  ",
];

const NEW_KEYS: &[&str] = &["Awards", "Origin", "Born", "Producer", "title", "_meta", " ", "Notes"];

fn pick_variant<R: Rng>(rng: &mut R) -> Variant {
    if rng.gen_bool(0.1) {
        Variant::Orig
    } else {
        *Variant::COUNTERFACTUAL.choose(rng).expect("non-empty")
    }
}

fn pick_key<R: Rng>(rng: &mut R, s: &AnnotationSession, v: Variant) -> String {
    let keys: Vec<&str> = s.table(v).keys().collect();
    if keys.is_empty() || rng.gen_bool(0.05) {
        (*NEW_KEYS.choose(rng).expect("non-empty")).to_owned()
    } else {
        (*keys.choose(rng).expect("non-empty")).to_owned()
    }
}

fn pick_cell<R: Rng>(rng: &mut R, s: &AnnotationSession, v: Variant) -> CellRef {
    let key = pick_key(rng, s, v);
    let len = s.table(v).section(&key).map_or(0, |sec| sec.values.len());
    CellRef::new(v, key, rng.gen_range(0..=len))
}

fn pick_hyp<R: Rng>(rng: &mut R, s: &AnnotationSession, v: Variant) -> String {
    match s.hypotheses(v).choose(rng) {
        Some(h) if !rng.gen_bool(0.05) => h.hyp_id.clone(),
        _ => "missing".into(),
    }
}

fn pick_text<R: Rng>(rng: &mut R) -> String {
    (*TEXTS.choose(rng).expect("non-empty")).to_owned()
}

/// A random command aimed mostly at cells, keys and hypotheses that exist.
/// About one in ten is malformed in some way.
pub fn random_command<R: Rng>(rng: &mut R, s: &AnnotationSession) -> EditCommand {
    let v = pick_variant(rng);
    match rng.gen_range(0..11) {
        0 | 1 => {
            let sv = pick_variant(rng);
            let src = pick_cell(rng, s, sv);
            let dst_key = pick_key(rng, s, v);
            let len = s.table(v).section(&dst_key).map_or(0, |sec| sec.values.len());
            EditCommand::MoveValue {
                src,
                dst_variant: v,
                dst_key,
                dst_position: rng.gen_range(0..=len + 1),
            }
        }
        2 => EditCommand::AddValue {
            variant: v,
            key: pick_key(rng, s, v),
            text: pick_text(rng),
        },
        3 => EditCommand::DeleteValue {
            cell: pick_cell(rng, s, v),
        },
        4 => EditCommand::EditValueText {
            cell: pick_cell(rng, s, v),
            new_text: pick_text(rng),
        },
        5 => EditCommand::EditKey {
            variant: v,
            key: pick_key(rng, s, v),
            new_key: (*NEW_KEYS.choose(rng).expect("non-empty")).to_owned(),
        },
        6 => EditCommand::AddSection {
            variant: v,
            key: (*NEW_KEYS.choose(rng).expect("non-empty")).to_owned(),
            texts: (0..rng.gen_range(0..3)).map(|_| pick_text(rng)).collect(),
        },
        7 => EditCommand::DeleteSection {
            variant: v,
            key: pick_key(rng, s, v),
        },
        8 => EditCommand::SetHypothesisText {
            variant: v,
            hyp_id: pick_hyp(rng, s, v),
            text: pick_text(rng),
        },
        9 => {
            if rng.gen_bool(0.5) {
                EditCommand::SetLabel {
                    variant: v,
                    hyp_id: pick_hyp(rng, s, v),
                    label: *Label::ALL.choose(rng).expect("non-empty"),
                }
            } else {
                EditCommand::SetStrategies {
                    variant: v,
                    hyp_id: pick_hyp(rng, s, v),
                    flags: StrategyFlags::from_bits(rng.gen_range(0..64)),
                }
            }
        }
        _ => EditCommand::SetRelevantKeys {
            variant: v,
            hyp_id: pick_hyp(rng, s, v),
            keys: (0..rng.gen_range(0..3)).map(|_| pick_key(rng, s, v)).collect(),
        },
    }
}
