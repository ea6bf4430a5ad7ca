use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::editor::AnnotationSession;
use crate::model::{Hypothesis, Label, Variant};
use crate::store::pair_id;
use crate::tsv::split_line;

pub const PREDICTIONS_HEADER: &str = "pair_id\tsubset\tgold\tpredicted";

/// One model prediction. `subset` is `Orig` for original pairs and the
/// draft variant for counterfactual ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub pair_id: String,
    pub subset: Variant,
    pub gold: Label,
    pub predicted: Label,
}

impl PredictionRecord {
    pub fn new(pair_id: impl Into<String>, subset: Variant, gold: Label, predicted: Label) -> Self {
        Self {
            pair_id: pair_id.into(),
            subset,
            gold,
            predicted,
        }
    }

    pub fn is_correct(&self) -> bool {
        self.gold == self.predicted
    }
}

/// Parses a predictions TSV. A leading header row is skipped; blank lines
/// are ignored. The subset column takes `orig`/`original`/`A`/`B`/`C`.
pub fn read_predictions(text: &str) -> Result<Vec<PredictionRecord>, AnalysisError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (i == 0 && line.starts_with("pair_id\t")) {
            continue;
        }
        let bad = |msg: String| AnalysisError::Malformed {
            line: i + 1,
            message: msg,
        };
        let f = split_line(line);
        if f.len() != 4 {
            return Err(bad(format!("expected 4 columns, found {}", f.len())));
        }
        let subset: Variant = f[1]
            .parse()
            .map_err(|e: crate::model::ParseEnumError| bad(e.to_string()))?;
        let label = |s: &str| s.parse::<Label>().map_err(|e| bad(e.to_string()));
        out.push(PredictionRecord {
            pair_id: f[0].to_owned(),
            subset,
            gold: label(f[2])?,
            predicted: label(f[3])?,
        });
    }
    Ok(out)
}

pub fn write_predictions(records: &[PredictionRecord]) -> String {
    let mut out = format!("{PREDICTIONS_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.pair_id,
            r.subset.code(),
            r.gold.code(),
            r.predicted.code()
        ));
    }
    out
}

/// Where a pair id points inside a session list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRef {
    pub session: usize,
    pub variant: Variant,
    pub hyp_index: usize,
}

/// Pair-id lookup over a set of sessions, using the export pair-id scheme.
#[derive(Debug, Clone)]
pub struct PairIndex<'a> {
    sessions: &'a [AnnotationSession],
    pairs: HashMap<String, PairRef>,
}

impl<'a> PairIndex<'a> {
    pub fn new(sessions: &'a [AnnotationSession]) -> Self {
        let mut pairs = HashMap::new();
        for (si, s) in sessions.iter().enumerate() {
            for v in Variant::ALL {
                for hi in 0..s.hypotheses(v).len() {
                    pairs.insert(
                        pair_id(&s.original.table_id, v, hi),
                        PairRef {
                            session: si,
                            variant: v,
                            hyp_index: hi,
                        },
                    );
                }
            }
        }
        Self { sessions, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, pair_id: &str) -> Option<PairRef> {
        self.pairs.get(pair_id).copied()
    }

    pub fn session(&self, r: PairRef) -> &'a AnnotationSession {
        &self.sessions[r.session]
    }

    pub fn hypothesis(&self, r: PairRef) -> &'a Hypothesis {
        &self.sessions[r.session].hypotheses(r.variant)[r.hyp_index]
    }

    /// The original pairs a counterfactual pair is compared against: the
    /// original hypothesis with the same id, or every original pair of the
    /// session when there is none.
    pub fn originals_for(&self, r: PairRef) -> Vec<String> {
        let s = &self.sessions[r.session];
        let hyp_id = &self.hypothesis(r).hyp_id;
        let origs = s.hypotheses(Variant::Orig);
        let same: Vec<usize> = (0..origs.len()).filter(|&i| &origs[i].hyp_id == hyp_id).collect();
        let chosen = if same.is_empty() {
            (0..origs.len()).collect()
        } else {
            same
        };
        chosen
            .into_iter()
            .map(|i| pair_id(&s.original.table_id, Variant::Orig, i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions_round_trip() {
        let recs = vec![
            PredictionRecord::new("T1_orig_0", Variant::Orig, Label::Entail, Label::Neutral),
            PredictionRecord::new("T1_A_0", Variant::A, Label::Contradict, Label::Contradict),
        ];
        let text = write_predictions(&recs);
        assert_eq!(read_predictions(&text).unwrap(), recs);
        assert_eq!(
            read_predictions("x\toriginal\tE\tE\n").unwrap()[0].subset,
            Variant::Orig
        );
    }

    #[test]
    fn bad_rows() {
        assert!(matches!(
            read_predictions("a\tA\tE\n"),
            Err(AnalysisError::Malformed { line: 1, .. })
        ));
        assert!(read_predictions("a\tD\tE\tE\n").is_err());
        assert!(read_predictions("a\tA\tE\tX\n").is_err());
    }
}
