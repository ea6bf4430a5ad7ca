//! Random analysis inputs, brute-force recounts and a reference dataset shape.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tabforge_core::analysis::PredictionRecord;
use tabforge_core::codec::{encode_strategy_flags, StrategyFlags, ValueProvenance};
use tabforge_core::editor::{AnnotationSession, Drafts};
use tabforge_core::model::{Hypothesis, Label, Section, Table, ValueCell, Variant};

use crate::gen::toy_session;

fn relabel(s: &mut AnnotationSession, id: &str) {
    s.session_id = id.to_owned();
    s.original.table_id = id.to_owned();
    s.counterfactuals.a.table_id = id.to_owned();
    s.counterfactuals.b.table_id = id.to_owned();
    s.counterfactuals.c.table_id = id.to_owned();
}

/// `n_sessions` annotated sessions with random strategies, relevant keys,
/// extra C hypotheses and provenance, plus predictions for every original
/// pair and a random sample of counterfactual pairs, `n_records` in total
/// when enough pairs exist.
pub fn random_analysis_case(
    seed: u64,
    n_sessions: usize,
    n_records: usize,
) -> (Vec<AnnotationSession>, Vec<PredictionRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sessions = Vec::new();
    for k in 0..n_sessions {
        let mut s = toy_session(k % 6, rng.gen(), 0.7);
        relabel(&mut s, &format!("s{k:03}"));
        for _ in 0..rng.gen_range(0..3) {
            let n = s.hypotheses.c.len();
            s.hypotheses.c.push(Hypothesis::new(
                format!("n{n}"),
                "An extra statement.",
                *Label::ALL.choose(&mut rng).expect("labels"),
            ));
        }
        for v in Variant::COUNTERFACTUAL {
            let keys: Vec<String> = s.table(v).keys().map(str::to_owned).collect();
            if let Some(t) = s.table_mut(v) {
                for sec in &mut t.sections {
                    for c in &mut sec.values {
                        if rng.gen_bool(0.2) {
                            c.provenance = ValueProvenance::copied();
                        }
                    }
                }
            }
            for h in s.hypotheses_mut(v) {
                h.strategies = StrategyFlags::from_bits(rng.gen_range(0..64));
                h.relevant_keys = keys.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
            }
        }
        sessions.push(s);
    }

    let mut orig = Vec::new();
    let mut cf = Vec::new();
    for s in &sessions {
        for v in Variant::ALL {
            for (i, h) in s.hypotheses(v).iter().enumerate() {
                let predicted = if rng.gen_bool(0.6) {
                    h.label
                } else {
                    *Label::ALL.choose(&mut rng).expect("labels")
                };
                let r = PredictionRecord::new(
                    format!("{}_{}_{i}", s.original.table_id, v.code()),
                    v,
                    h.label,
                    predicted,
                );
                if v == Variant::Orig {
                    orig.push(r);
                } else {
                    cf.push(r);
                }
            }
        }
    }
    cf.shuffle(&mut rng);
    cf.truncate(n_records.saturating_sub(orig.len()));
    orig.extend(cf);
    orig.shuffle(&mut rng);
    (sessions, orig)
}

/// One recounted report row; accuracies in hundredths of a percent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecountRow {
    pub group: String,
    pub n: usize,
    pub orig_hundredths: i64,
    pub cf_hundredths: i64,
}

/// `num / den` rounded half away from zero.
pub fn div_round(num: i64, den: i64) -> i64 {
    let q = (2 * num.abs() + den) / (2 * den);
    if num < 0 {
        -q
    } else {
        q
    }
}

fn hundredths(correct: usize, total: usize) -> i64 {
    div_round(10_000 * correct as i64, total as i64)
}

fn find_pair<'a>(
    sessions: &'a [AnnotationSession],
    pair_id: &str,
) -> Option<(&'a AnnotationSession, Variant, &'a Hypothesis)> {
    for s in sessions {
        for v in Variant::ALL {
            for (i, h) in s.hypotheses(v).iter().enumerate() {
                if format!("{}_{}_{i}", s.original.table_id, v.code()) == pair_id {
                    return Some((s, v, h));
                }
            }
        }
    }
    None
}

fn recount(
    records: &[PredictionRecord],
    sessions: &[AnnotationSession],
    groups: &[String],
    member: impl Fn(&AnnotationSession, Variant, &Hypothesis, &str) -> bool,
) -> Vec<RecountRow> {
    let mut rows = Vec::new();
    for g in groups {
        let (mut oc, mut ot, mut cc, mut ct) = (0, 0, 0, 0);
        for r in records.iter().filter(|r| r.subset != Variant::Orig) {
            let (s, v, h) = find_pair(sessions, &r.pair_id).expect("record joins");
            if !member(s, v, h, g) {
                continue;
            }
            ct += 1;
            cc += usize::from(r.gold == r.predicted);
            let origs = s.hypotheses(Variant::Orig);
            let mut idx: Vec<usize> = (0..origs.len()).filter(|&i| origs[i].hyp_id == h.hyp_id).collect();
            if idx.is_empty() {
                idx = (0..origs.len()).collect();
            }
            for i in idx {
                let id = format!("{}_orig_{i}", s.original.table_id);
                let o = records.iter().find(|r| r.pair_id == id).expect("original predicted");
                ot += 1;
                oc += usize::from(o.gold == o.predicted);
            }
        }
        if ct > 0 {
            rows.push(RecountRow {
                group: g.clone(),
                n: ct,
                orig_hundredths: hundredths(oc, ot),
                cf_hundredths: hundredths(cc, ct),
            });
        }
    }
    rows
}

const STRATEGY_NAMES: [&str; 6] = [
    "table_change_flip",
    "hypothesis_change_flip",
    "true_info_overlap",
    "prompt_rewrite",
    "new_hypothesis",
    "other",
];

/// Per-strategy recount: a pair belongs to strategy j when character j of
/// its flag bitstring is `1`.
pub fn recount_strategy(records: &[PredictionRecord], sessions: &[AnnotationSession]) -> Vec<RecountRow> {
    let groups: Vec<String> = STRATEGY_NAMES.iter().map(|s| s.to_string()).collect();
    recount(records, sessions, &groups, |_, _, h, g| {
        let j = STRATEGY_NAMES.iter().position(|n| *n == g).expect("known");
        encode_strategy_flags(h.strategies).as_bytes()[j] == b'1'
    })
}

fn prefixes(t: &Table, keys: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in &t.sections {
        if keys.is_empty() || keys.contains(&s.key) {
            for c in &s.values {
                out.push(c.provenance.to_string()[..4].to_owned());
            }
        }
    }
    if out.is_empty() {
        out.push("0000".into());
    }
    out
}

/// Per-pattern recount over all sixteen 4-bit strings.
pub fn recount_provenance(records: &[PredictionRecord], sessions: &[AnnotationSession]) -> Vec<RecountRow> {
    let groups: Vec<String> = (0..16).map(|b| format!("{b:04b}")).collect();
    recount(records, sessions, &groups, |s, v, h, g| {
        prefixes(s.table(v), &h.relevant_keys).iter().any(|p| p == g)
    })
}

fn fmt_hundredths(h: i64) -> String {
    let sign = if h < 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", h.abs() / 100, h.abs() % 100)
}

/// CSV report rendered from recounted rows.
pub fn recount_csv(rows: &[RecountRow]) -> String {
    let mut out = String::from("group_key,n,acc_orig,acc_cf,drop,rel_drop\n");
    for r in rows {
        let drop = r.orig_hundredths - r.cf_hundredths;
        let rel = if r.orig_hundredths == 0 {
            String::new()
        } else {
            fmt_hundredths(div_round(drop * 10_000, r.orig_hundredths))
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.group,
            r.n,
            fmt_hundredths(r.orig_hundredths),
            fmt_hundredths(r.cf_hundredths),
            fmt_hundredths(drop),
            rel
        ));
    }
    out
}

fn stub_table(id: &str) -> Table {
    Table {
        table_id: id.into(),
        title: format!("Entity {id}"),
        category: "Person".into(),
        sections: vec![
            Section::new("Born", vec![ValueCell::new("1950")]),
            Section::new("Occupation", vec![ValueCell::new("writer")]),
        ],
    }
}

fn hyps(prefix: &str, n: usize) -> Vec<Hypothesis> {
    (0..n)
        .map(|i| Hypothesis::new(format!("{prefix}{i}"), format!("Statement {i}."), Label::ALL[i % 3]))
        .collect()
}

/// 47 sessions with a fixed reference shape: 9 original
/// hypotheses each; A holds 423 pairs over 47 tables, B 405 over 45 and
/// C 154 over 17, giving 109 counterfactual tables and 982 pairs.
pub fn reference_shape_sessions() -> Vec<AnnotationSession> {
    (0..47)
        .map(|k| {
            let id = format!("T{k:02}");
            let t = stub_table(&id);
            let mut s = AnnotationSession::new(
                id,
                t.clone(),
                Drafts {
                    a: t.clone(),
                    b: t.clone(),
                    c: t,
                },
                hyps("h", 9),
                hyps("h", 9),
            );
            if k >= 45 {
                s.hypotheses.b.clear();
            }
            s.hypotheses.c = match k {
                0..=15 => hyps("h", 9),
                16 => hyps("h", 10),
                _ => Vec::new(),
            };
            s
        })
        .collect()
}
