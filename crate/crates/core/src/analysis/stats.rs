use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::editor::AnnotationSession;
use crate::model::{Label, Variant};

/// Counts over a set of sessions. Per-variant arrays are indexed by
/// [`Variant::index`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    /// Original tables, one per session.
    pub tables: usize,
    /// Drafts carrying at least one hypothesis.
    pub counterfactual_tables: usize,
    pub tables_per_variant: [usize; 4],
    pub pairs_per_variant: [usize; 4],
    /// `[E, C, N]` counts per variant.
    pub labels_per_variant: [[usize; 3]; 4],
}

impl DatasetStats {
    pub fn pairs(&self, v: Variant) -> usize {
        self.pairs_per_variant[v.index() as usize]
    }

    /// Table-hypothesis pairs over the three drafts.
    pub fn counterfactual_pairs(&self) -> usize {
        Variant::COUNTERFACTUAL.iter().map(|&v| self.pairs(v)).sum()
    }

    /// Label counts over the drafts.
    pub fn counterfactual_labels(&self) -> [usize; 3] {
        let mut out = [0; 3];
        for v in Variant::COUNTERFACTUAL {
            for (o, n) in out.iter_mut().zip(self.labels_per_variant[v.index() as usize]) {
                *o += n;
            }
        }
        out
    }

    /// One `name value` line per count. `total` is the number of
    /// counterfactual pairs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tables {}", self.tables);
        let _ = writeln!(out, "counterfactual_tables {}", self.counterfactual_tables);
        for v in Variant::COUNTERFACTUAL {
            let _ = writeln!(out, "tables_{v} {}", self.tables_per_variant[v.index() as usize]);
        }
        for v in Variant::ALL {
            let _ = writeln!(out, "pairs_{v} {}", self.pairs(v));
        }
        let _ = writeln!(out, "total {}", self.counterfactual_pairs());
        for v in Variant::ALL {
            let l = self.labels_per_variant[v.index() as usize];
            let _ = writeln!(out, "labels_{v} E={} C={} N={}", l[0], l[1], l[2]);
        }
        out
    }
}

fn label_slot(l: Label) -> usize {
    match l {
        Label::Entail => 0,
        Label::Contradict => 1,
        Label::Neutral => 2,
    }
}

pub fn dataset_stats(sessions: &[AnnotationSession]) -> DatasetStats {
    let mut st = DatasetStats {
        tables: sessions.len(),
        ..DatasetStats::default()
    };
    for s in sessions {
        for v in Variant::ALL {
            let i = v.index() as usize;
            let hyps = s.hypotheses(v);
            st.pairs_per_variant[i] += hyps.len();
            for h in hyps {
                st.labels_per_variant[i][label_slot(h.label)] += 1;
            }
            if v.is_counterfactual() && !hyps.is_empty() {
                st.tables_per_variant[i] += 1;
                st.counterfactual_tables += 1;
            }
        }
    }
    st
}
