use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, PairIndex, PairRef, PredictionRecord, Scalar};
use crate::codec::Strategy;
use crate::model::Variant;

/// `100 * correct / total`, rounded to two decimals.
pub fn percentage<S: Scalar>(correct: usize, total: usize) -> Result<S, AnalysisError> {
    if total == 0 {
        return Err(AnalysisError::EmptySelection);
    }
    Ok((S::from_ratio(correct as u64 * 100, total as u64)).round2())
}

/// Accuracy over the records accepted by `filter`, in percent.
pub fn accuracy<S: Scalar>(
    records: &[PredictionRecord],
    filter: impl Fn(&PredictionRecord) -> bool,
) -> Result<S, AnalysisError> {
    let (correct, total) = records
        .iter()
        .filter(|r| filter(r))
        .fold((0, 0), |(c, t), r| (c + r.is_correct() as usize, t + 1));
    percentage(correct, total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectRow<S> {
    pub group_key: String,
    pub n_pairs: usize,
    pub acc_original: S,
    pub acc_counterfactual: S,
    /// Percentage points.
    pub drop: S,
    /// Drop as a percentage of `acc_original`; absent when that is zero.
    pub rel_drop: Option<S>,
}

impl<S: Scalar> EffectRow<S> {
    pub fn new(group_key: impl Into<String>, n_pairs: usize, acc_original: S, acc_counterfactual: S) -> Self {
        let drop = acc_original - acc_counterfactual;
        let hundred = S::from_u32(100).expect("100 fits");
        let rel_drop = (!acc_original.is_zero()).then(|| (drop * hundred / acc_original).round2());
        Self {
            group_key: group_key.into(),
            n_pairs,
            acc_original,
            acc_counterfactual,
            drop,
            rel_drop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EffectReport<S> {
    pub rows: Vec<EffectRow<S>>,
}

pub const REPORT_CSV_HEADER: &str = "group_key,n,acc_orig,acc_cf,drop,rel_drop";

impl<S: Scalar> EffectReport<S> {
    pub fn row(&self, group_key: &str) -> Option<&EffectRow<S>> {
        self.rows.iter().find(|r| r.group_key == group_key)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{REPORT_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.group_key,
                r.n_pairs,
                r.acc_original.fmt2(),
                r.acc_counterfactual.fmt2(),
                r.drop.fmt2(),
                r.rel_drop.map(S::fmt2).unwrap_or_default()
            );
        }
        out
    }

    /// Aligned plain-text table.
    pub fn render(&self) -> String {
        let header = ["group", "n", "acc_orig", "acc_cf", "drop", "rel_drop"];
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.group_key.clone(),
                    r.n_pairs.to_string(),
                    r.acc_original.fmt2(),
                    r.acc_counterfactual.fmt2(),
                    r.drop.fmt2(),
                    r.rel_drop.map(S::fmt2).unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut line = |row: &[&str]| {
            let mut l = format!("{:<w$}", row[0], w = widths[0]);
            for (c, w) in row[1..].iter().zip(&widths[1..]) {
                let _ = write!(l, "  {c:>w$}");
            }
            out.push_str(l.trim_end());
            out.push('\n');
        };
        line(&header);
        for row in &cells {
            line(&row.each_ref().map(String::as_str));
        }
        out
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    correct: usize,
    total: usize,
}

impl Tally {
    fn add(&mut self, r: &PredictionRecord) {
        self.correct += r.is_correct() as usize;
        self.total += 1;
    }
}

/// Shared join and tally. `groups_of` names the groups of a counterfactual
/// pair; the rank orders rows.
fn grouped_effect<S: Scalar>(
    records: &[PredictionRecord],
    index: &PairIndex<'_>,
    groups_of: impl Fn(PairRef) -> Vec<(u32, String)>,
) -> Result<EffectReport<S>, AnalysisError> {
    let mut originals: HashMap<&str, &PredictionRecord> = HashMap::new();
    let mut counterfactual = Vec::new();
    let mut seen = HashMap::new();
    for r in records {
        if seen.insert(r.pair_id.as_str(), ()).is_some() {
            return Err(AnalysisError::DuplicateRecord(r.pair_id.clone()));
        }
        if r.subset == Variant::Orig {
            originals.insert(&r.pair_id, r);
        } else {
            counterfactual.push(r);
        }
    }

    let mut groups: BTreeMap<(u32, String), (Tally, Tally)> = BTreeMap::new();
    for r in counterfactual {
        let pair = index
            .get(&r.pair_id)
            .ok_or_else(|| AnalysisError::JoinFailure(r.pair_id.clone()))?;
        if pair.variant != r.subset {
            return Err(AnalysisError::SubsetMismatch(r.pair_id.clone()));
        }
        let orig_ids = index.originals_for(pair);
        if orig_ids.is_empty() {
            return Err(AnalysisError::JoinFailure(r.pair_id.clone()));
        }
        let orig_recs = orig_ids
            .iter()
            .map(|id| {
                originals
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| AnalysisError::JoinFailure(id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for key in groups_of(pair) {
            let (orig, cf) = groups.entry(key).or_default();
            cf.add(r);
            for o in &orig_recs {
                orig.add(o);
            }
        }
    }

    let rows = groups
        .into_iter()
        .map(|((_, key), (orig, cf))| {
            Ok(EffectRow::new(
                key,
                cf.total,
                percentage(orig.correct, orig.total)?,
                percentage(cf.correct, cf.total)?,
            ))
        })
        .collect::<Result<_, AnalysisError>>()?;
    Ok(EffectReport { rows })
}

/// Accuracy drop per hypothesis strategy. A pair counts toward every
/// strategy whose flag is set; strategies used by no pair get no row.
pub fn strategy_effect<S: Scalar>(
    records: &[PredictionRecord],
    index: &PairIndex<'_>,
) -> Result<EffectReport<S>, AnalysisError> {
    grouped_effect(records, index, |p| {
        let flags = index.hypothesis(p).strategies;
        Strategy::ALL
            .iter()
            .enumerate()
            .filter(|(_, s)| flags.is_set(**s))
            .map(|(i, s)| (i as u32, s.name().to_owned()))
            .collect()
    })
}

/// The distinct 4-bit source prefixes on the cells a pair depends on: the
/// cells under its relevant keys, or the whole table when none are marked.
/// Falls back to `0000` when those keys hold no cells.
pub fn relevant_prefixes(index: &PairIndex<'_>, p: PairRef) -> Vec<(u32, String)> {
    let table = index.session(p).table(p.variant);
    let hyp = index.hypothesis(p);
    let mut found: BTreeMap<u32, String> = BTreeMap::new();
    for s in &table.sections {
        if !hyp.relevant_keys.is_empty() && !hyp.relevant_keys.contains(&s.key) {
            continue;
        }
        for c in &s.values {
            let prefix = c.provenance.source_prefix();
            found.insert(u32::from(c.provenance.to_bits() >> 3), prefix);
        }
    }
    if found.is_empty() {
        found.insert(0, "0000".into());
    }
    found.into_iter().collect()
}

/// Accuracy drop per provenance source pattern.
pub fn provenance_effect<S: Scalar>(
    records: &[PredictionRecord],
    index: &PairIndex<'_>,
) -> Result<EffectReport<S>, AnalysisError> {
    grouped_effect(records, index, |p| relevant_prefixes(index, p))
}

/// Accuracy drop per counterfactual variant.
pub fn variant_effect<S: Scalar>(
    records: &[PredictionRecord],
    index: &PairIndex<'_>,
) -> Result<EffectReport<S>, AnalysisError> {
    grouped_effect(records, index, |p| {
        vec![(p.variant.index() as u32, p.variant.code().to_owned())]
    })
}
