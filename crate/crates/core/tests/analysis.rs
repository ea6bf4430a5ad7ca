use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tabforge_core::analysis::*;
use tabforge_core::codec::{decode_value_provenance, Strategy, StrategyFlags, ValueProvenance};
use tabforge_core::editor::AnnotationSession;
use tabforge_core::model::{Hypothesis, Label, Variant};
use tabforge_core::Exact;
use tabforge_testkit::analysis::{random_analysis_case, recount_csv, recount_provenance, recount_strategy};
use tabforge_testkit::{checks, toy_session};

fn exact(s: &str) -> Exact {
    Exact::parse_decimal(s).unwrap()
}

#[test]
fn arithmetic_and_recounts() {
    let r = checks::analysis_checks(20);
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

#[test]
fn seven_of_nine() {
    let recs: Vec<PredictionRecord> = (0..9)
        .map(|i| {
            let pred = if i < 7 { Label::Entail } else { Label::Neutral };
            PredictionRecord::new(format!("x_{i}"), Variant::Orig, Label::Entail, pred)
        })
        .collect();
    assert_eq!(accuracy::<Exact>(&recs, |_| true).unwrap(), exact("77.78"));
    assert_eq!(accuracy::<f64>(&recs, |_| true).unwrap(), 77.78);
    assert_eq!(accuracy::<Exact>(&recs[..7], |_| true).unwrap(), exact("100"));
    assert_eq!(accuracy::<f64>(&recs, |_| false), Err(AnalysisError::EmptySelection));
}

#[test]
fn accuracy_ignores_order() {
    let (_, mut recs) = random_analysis_case(5, 10, 120);
    let before = accuracy::<Exact>(&recs, |r| r.subset != Variant::Orig).unwrap();
    recs.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(accuracy::<Exact>(&recs, |r| r.subset != Variant::Orig).unwrap(), before);
}

fn all_records(sessions: &[AnnotationSession], wrong: impl Fn(Variant, &Hypothesis) -> bool) -> Vec<PredictionRecord> {
    let mut out = Vec::new();
    for s in sessions {
        for v in Variant::ALL {
            for (i, h) in s.hypotheses(v).iter().enumerate() {
                let pred = if wrong(v, h) { other_label(h.label) } else { h.label };
                out.push(PredictionRecord::new(
                    tabforge_core::store::pair_id(&s.original.table_id, v, i),
                    v,
                    h.label,
                    pred,
                ));
            }
        }
    }
    out
}

fn other_label(l: Label) -> Label {
    if l == Label::Neutral {
        Label::Entail
    } else {
        Label::Neutral
    }
}

#[test]
fn only_the_mispredicted_strategy_drops() {
    let mut s = toy_session(0, 1, 0.5);
    for v in Variant::COUNTERFACTUAL {
        for (i, h) in s.hypotheses_mut(v).iter_mut().enumerate() {
            h.strategies = if i == 0 {
                StrategyFlags::default().with(Strategy::TableChangeFlip)
            } else {
                StrategyFlags::default().with(Strategy::PromptRewrite)
            };
        }
    }
    let sessions = vec![s];
    let recs = all_records(&sessions, |v, h| {
        v.is_counterfactual() && h.strategies.is_set(Strategy::TableChangeFlip)
    });
    let index = PairIndex::new(&sessions);
    let rep = strategy_effect::<Exact>(&recs, &index).unwrap();
    assert_eq!(rep.rows.len(), 2);
    let flip = rep.row("table_change_flip").unwrap();
    assert_eq!(
        (flip.acc_original, flip.acc_counterfactual, flip.drop),
        (exact("100"), exact("0"), exact("100"))
    );
    assert_eq!(flip.rel_drop, Some(exact("100")));
    let other = rep.row("prompt_rewrite").unwrap();
    assert_eq!(other.drop, exact("0"));
    assert_eq!(other.n_pairs, 6);
}

#[test]
fn provenance_groups() {
    let mut s = toy_session(0, 1, 0.0);
    // every cell untouched: a single 0000 group
    let sessions = vec![s.clone()];
    let recs = all_records(&sessions, |_, _| false);
    let rep = provenance_effect::<Exact>(&recs, &PairIndex::new(&sessions)).unwrap();
    assert_eq!(
        rep.rows.iter().map(|r| r.group_key.as_str()).collect::<Vec<_>>(),
        ["0000"]
    );

    let a = &mut s.counterfactuals.a;
    let k0 = a.sections[0].key.clone();
    let k1 = a.sections[1].key.clone();
    let k2 = a.sections[2].key.clone();
    a.sections[0].values[0].provenance = prov("1010000");
    a.sections[1].values[0].provenance = prov("0111000");
    for s2 in &mut a.sections[2..] {
        for c in &mut s2.values {
            c.provenance = prov("1111000");
        }
    }
    s.hypotheses.a[0].relevant_keys = vec![k0, k1];
    for h in &mut s.hypotheses.a[1..] {
        h.relevant_keys = vec![k2.clone()];
    }
    let sessions = vec![s];
    let recs = all_records(&sessions, |v, h| v == Variant::A && h.hyp_id == "h0");
    let rep = provenance_effect::<Exact>(&recs, &PairIndex::new(&sessions)).unwrap();
    for key in ["1010", "0111"] {
        let row = rep.row(key).unwrap();
        assert_eq!(row.n_pairs, 1, "{key}");
        assert_eq!(row.acc_counterfactual, exact("0"));
    }
    assert!(rep.row("1111").is_some());
    assert_eq!(
        recount_csv(
            &recount_provenance(&recs, &sessions)
                .into_iter()
                .filter(|r| r.n > 0)
                .collect::<Vec<_>>()
        ),
        rep.to_csv()
    );
}

fn prov(bits: &str) -> ValueProvenance {
    decode_value_provenance(bits).unwrap()
}

#[test]
fn join_errors() {
    let sessions = vec![toy_session(0, 1, 0.5)];
    let index = PairIndex::new(&sessions);
    let mut recs = all_records(&sessions, |_, _| false);
    recs.push(PredictionRecord::new(
        "zz_A_0",
        Variant::A,
        Label::Entail,
        Label::Entail,
    ));
    assert!(matches!(strategy_effect::<f64>(&recs, &index), Err(AnalysisError::JoinFailure(p)) if p == "zz_A_0"));

    let mut recs = all_records(&sessions, |_, _| false);
    recs.retain(|r| r.subset != Variant::Orig);
    assert!(matches!(
        strategy_effect::<f64>(&recs, &index),
        Err(AnalysisError::JoinFailure(_))
    ));

    let mut recs = all_records(&sessions, |_, _| false);
    recs[4].subset = Variant::B;
    assert!(matches!(
        variant_effect::<f64>(&recs, &index),
        Err(AnalysisError::SubsetMismatch(_))
    ));

    let mut recs = all_records(&sessions, |_, _| false);
    recs.push(recs[0].clone());
    assert!(matches!(
        variant_effect::<f64>(&recs, &index),
        Err(AnalysisError::DuplicateRecord(_))
    ));
}

#[test]
fn csv_matches_recount() {
    for seed in 0..5 {
        let (sessions, recs) = random_analysis_case(seed, 30, 300);
        let rep = strategy_effect::<Exact>(&recs, &PairIndex::new(&sessions)).unwrap();
        let expected: Vec<_> = recount_strategy(&recs, &sessions)
            .into_iter()
            .filter(|r| r.n > 0)
            .collect();
        assert_eq!(rep.to_csv(), recount_csv(&expected));
        let float = strategy_effect::<f64>(&recs, &PairIndex::new(&sessions)).unwrap();
        assert_eq!(float.to_csv(), rep.to_csv());
    }
}

#[test]
fn stats_counts() {
    let empty = dataset_stats(&[]);
    assert_eq!(empty, DatasetStats::default());
    assert!(empty.render().contains("total 0\n"));

    let s = toy_session(0, 1, 0.5);
    let st = dataset_stats(&[s]);
    assert_eq!(
        (st.tables, st.counterfactual_tables, st.counterfactual_pairs()),
        (1, 3, 9)
    );
    assert_eq!(st.counterfactual_labels(), [3, 3, 3]);

    let r = checks::stats_reference_shape();
    assert!(r.is_ok(), "{}", r.unwrap_err());
}
