use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracing::warn;

use super::{CategoryMap, InitError, InitPolicy, PoolLocation, SourceClass, ValuePool};
use crate::codec::{StrategyFlags, ValueProvenance};
use crate::editor::{AnnotationSession, Drafts};
use crate::model::{Hypothesis, Table, Variant};

/// A cell that was replaced during initialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    pub key: String,
    pub value_index: usize,
    pub class: SourceClass,
    pub source: PoolLocation,
    pub text: String,
}

/// A cell that was selected for perturbation but had no candidate in any
/// positively weighted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedCell {
    pub key: String,
    pub value_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitOutcome {
    pub table: Table,
    pub replacements: Vec<Replacement>,
    pub skipped: Vec<SkippedCell>,
}

/// Builds a perturbed draft of `original`.
///
/// Output depends only on the inputs and `policy.seed`. Replaced cells carry
/// their class in provenance bits 1-4; every other cell is reset to
/// `0000000`. Cross-key candidates are limited to keys whose type group is
/// compatible with the destination key.
pub fn auto_initialize(
    original: &Table,
    pool: &ValuePool,
    cmap: &CategoryMap,
    policy: &InitPolicy,
) -> Result<InitOutcome, InitError> {
    policy.validate()?;
    if pool.table_info(&original.table_id).is_none() {
        return Err(InitError::OriginNotInPool(original.table_id.clone()));
    }
    let classes: Vec<(SourceClass, f64)> = SourceClass::valid()
        .map(|c| (c, policy.weight(c)))
        .filter(|&(_, w)| w > 0.0)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut table = original.clone();
    let mut replacements = Vec::new();
    let mut skipped = Vec::new();

    for section in &mut table.sections {
        let origin = pool
            .origin(&original.table_id, &section.key)
            .expect("table presence checked above");
        for (value_index, cell) in section.values.iter_mut().enumerate() {
            cell.provenance = ValueProvenance::UNTOUCHED;
            if !rng.gen_bool(policy.perturb_probability) {
                continue;
            }
            let options: Vec<_> = classes
                .iter()
                .filter_map(|&(class, weight)| {
                    let cands: Vec<_> = pool
                        .candidates(&origin, class)
                        .into_iter()
                        .filter(|c| !class.other_key || cmap.compatible(c.key, &section.key))
                        .collect();
                    (!cands.is_empty()).then_some((class, weight, cands))
                })
                .collect();
            if options.is_empty() {
                warn!(
                    table = %original.table_id,
                    key = %section.key,
                    value_index,
                    "no shuffle candidate in any weighted class, cell left unperturbed"
                );
                skipped.push(SkippedCell {
                    key: section.key.clone(),
                    value_index,
                });
                continue;
            }
            let dist = WeightedIndex::new(options.iter().map(|(_, w, _)| *w)).expect("weights are positive and finite");
            let (class, _, cands) = &options[dist.sample(&mut rng)];
            let pick = cands[rng.gen_range(0..cands.len())];
            cell.text = pick.text.to_owned();
            cell.provenance = class.provenance();
            replacements.push(Replacement {
                key: section.key.clone(),
                value_index,
                class: *class,
                source: pick.location(),
                text: pick.text.to_owned(),
            });
        }
    }

    Ok(InitOutcome {
        table,
        replacements,
        skipped,
    })
}

/// Creates an annotation session: the untouched original plus drafts A, B
/// and C, seeded `policy.seed ^ 1`, `^ 2` and `^ 3`. Every variant gets a
/// copy of the original hypotheses with strategies and relevant keys reset.
pub fn init_session(
    original: &Table,
    hypotheses: &[Hypothesis],
    pool: &ValuePool,
    cmap: &CategoryMap,
    policy: &InitPolicy,
) -> Result<AnnotationSession, InitError> {
    if hypotheses.is_empty() {
        return Err(InitError::NoHypotheses);
    }
    let draft = |v: Variant| {
        let seeded = policy.clone().with_seed(policy.seed ^ v.index());
        auto_initialize(original, pool, cmap, &seeded).map(|o| o.table)
    };
    let drafts = Drafts {
        a: draft(Variant::A)?,
        b: draft(Variant::B)?,
        c: draft(Variant::C)?,
    };
    let copies: Vec<Hypothesis> = hypotheses
        .iter()
        .map(|h| Hypothesis {
            strategies: StrategyFlags::default(),
            relevant_keys: Vec::new(),
            ..h.clone()
        })
        .collect();
    Ok(AnnotationSession::new(
        original.table_id.clone(),
        original.clone(),
        drafts,
        hypotheses.to_vec(),
        copies,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initializer::build_value_pool;
    use crate::model::{DatasetTag, Label, Section, ValueCell};

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

    fn corpus() -> Vec<(Table, DatasetTag)> {
        vec![
            (
                table(
                    "t1",
                    "Movie",
                    &[("Budget", &["$26 million"]), ("Box office", &["$61.3 million"])],
                ),
                DatasetTag::Test,
            ),
            (
                table(
                    "t2",
                    "Movie",
                    &[("Budget", &["$85 million"]), ("Box office", &["$140.7 million"])],
                ),
                DatasetTag::Train,
            ),
            (
                table(
                    "t3",
                    "Album",
                    &[("Budget", &["$5.9 million"]), ("Sales", &["$13.3 million"])],
                ),
                DatasetTag::Test,
            ),
        ]
    }

    #[test]
    fn zero_probability_is_identity() {
        let c = corpus();
        let pool = build_value_pool(c.iter().map(|(t, d)| (t, *d))).unwrap();
        let out = auto_initialize(
            &c[0].0,
            &pool,
            &CategoryMap::new(),
            &InitPolicy::default().with_probability(0.0),
        )
        .unwrap();
        assert_eq!(out.table, c[0].0);
        assert!(out.replacements.is_empty());
    }

    #[test]
    fn only_cross_category_cross_key_class() {
        let c = corpus();
        let pool = build_value_pool(c.iter().map(|(t, d)| (t, *d))).unwrap();
        let class: SourceClass = "0111".parse().unwrap();
        let policy = InitPolicy {
            perturb_probability: 1.0,
            class_weights: [(class, 1.0)].into_iter().collect(),
            seed: 3,
        };
        let out = auto_initialize(&c[0].0, &pool, &CategoryMap::new(), &policy).unwrap();
        assert_eq!(out.replacements.len(), 2);
        for cell in out.table.cells().map(|(_, c)| c) {
            assert_eq!(cell.provenance.to_string(), "0111000");
        }
        // Budget can only draw from t3/Sales, Box office from t3/Budget or t3/Sales.
        assert_eq!(out.table.cell("Budget", 0).unwrap().text, "$13.3 million");
    }

    #[test]
    fn missing_candidates_are_skipped_not_fatal() {
        let c = corpus();
        let pool = build_value_pool(c.iter().map(|(t, d)| (t, *d))).unwrap();
        let policy = InitPolicy {
            perturb_probability: 1.0,
            class_weights: [("1111".parse().unwrap(), 1.0)].into_iter().collect(),
            seed: 0,
        };
        let out = auto_initialize(&c[0].0, &pool, &CategoryMap::new(), &policy).unwrap();
        assert_eq!(out.table, c[0].0);
        assert_eq!(out.skipped.len(), 2);
    }

    #[test]
    fn origin_must_be_pooled() {
        let c = corpus();
        let pool = build_value_pool(c.iter().map(|(t, d)| (t, *d))).unwrap();
        let stray = table("t9", "Movie", &[("Budget", &["$1"])]);
        assert_eq!(
            auto_initialize(&stray, &pool, &CategoryMap::new(), &InitPolicy::default()),
            Err(InitError::OriginNotInPool("t9".into()))
        );
    }

    #[test]
    fn session_copies_hypotheses() {
        let c = corpus();
        let pool = build_value_pool(c.iter().map(|(t, d)| (t, *d))).unwrap();
        let mut h = Hypothesis::new("h0", "Flatliners made over double its budget.", Label::Entail);
        h.relevant_keys = vec!["Budget".into()];
        let s = init_session(
            &c[0].0,
            &[h.clone()],
            &pool,
            &CategoryMap::new(),
            &InitPolicy::default(),
        )
        .unwrap();
        for v in Variant::COUNTERFACTUAL {
            let copy = &s.hypotheses(v)[0];
            assert_eq!((copy.text.as_str(), copy.label), (h.text.as_str(), h.label));
            assert!(copy.relevant_keys.is_empty());
        }
        assert_eq!(s.hypotheses(Variant::Orig), &[h]);
        assert_eq!(
            init_session(&c[0].0, &[], &pool, &CategoryMap::new(), &InitPolicy::default()),
            Err(InitError::NoHypotheses)
        );
    }
}
