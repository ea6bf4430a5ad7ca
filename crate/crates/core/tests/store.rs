use std::fs;

use tabforge_core::editor::{apply_edit, default_rules, EditCommand};
use tabforge_core::model::Variant;
use tabforge_core::store::*;
use tabforge_testkit::analysis::random_analysis_case;
use tabforge_testkit::{checks, toy_category_map, toy_session};

#[test]
fn random_interleavings_match_model_and_export_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let r = checks::store_model(dir.path(), 100);
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

#[test]
fn restore_of_older_checkpoint_gives_pre_edit_state() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let s0 = toy_session(1, 3, 0.5);
    let first = store.save_checkpoint(&s0).unwrap();
    let s1 = apply_edit(
        &s0,
        &EditCommand::DeleteSection {
            variant: Variant::A,
            key: "Spouse".into(),
        },
        &toy_category_map(),
    )
    .unwrap();
    let second = store.save_checkpoint(&s1).unwrap();
    assert_eq!((first.as_str(), second.as_str()), ("ckpt-1", "ckpt-2"));
    assert_eq!(store.restore_checkpoint("p2", &first).unwrap(), s0);
    assert_eq!(store.restore_checkpoint("p2", &second).unwrap(), s1);
    // restoring writes nothing
    assert_eq!(store.list_checkpoints("p2").unwrap().len(), 2);
}

#[test]
fn saving_twice_keeps_both() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let s = toy_session(0, 0, 0.5);
    let a = store.save_checkpoint(&s).unwrap();
    let b = store.save_checkpoint(&s).unwrap();
    assert_ne!(a, b);
    let list = store.list_checkpoints(&s.session_id).unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(
        store.load_checkpoint(&s.session_id, &a).unwrap().payload,
        store.load_checkpoint(&s.session_id, &b).unwrap().payload
    );
    let bytes = fs::read(dir.path().join("sessions/p1/ckpt-1.json")).unwrap();
    store.save_checkpoint(&s).unwrap();
    assert_eq!(fs::read(dir.path().join("sessions/p1/ckpt-1.json")).unwrap(), bytes);
}

#[test]
fn unknown_ids() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    assert!(matches!(store.load_session("nope"), Err(StoreError::NotFound(_))));
    assert!(matches!(store.load_session("../x"), Err(StoreError::InvalidId(_))));
    store.put_session(&toy_session(0, 0, 0.5)).unwrap();
    assert!(matches!(
        store.restore_checkpoint("p1", "ckpt-9"),
        Err(StoreError::NotFound(_))
    ));
    assert!(matches!(
        store.restore_checkpoint("p1", "head"),
        Err(StoreError::NotFound(_))
    ));
    assert_eq!(store.list_sessions().unwrap(), ["p1"]);
}

#[test]
fn dangling_keys_block_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let mut s = toy_session(0, 0, 0.5);
    s.hypotheses.a[0].relevant_keys = vec!["Ghost".into()];
    assert!(matches!(store.save_checkpoint(&s), Err(StoreError::DanglingKeys(d)) if d.len() == 1));
}

#[test]
fn nine_hypotheses_give_thirty_six_rows() {
    let mut s = toy_session(0, 0, 0.5);
    for v in Variant::ALL {
        let list = s.hypotheses_mut(v);
        let base = list[0].clone();
        list.clear();
        for i in 0..9 {
            let mut h = base.clone();
            h.hyp_id = format!("h{i}");
            list.push(h);
        }
    }
    let (bundle, summary) = build_export(&[s], &default_rules(), false).unwrap();
    assert_eq!(summary.pair_rows, 36);
    assert_eq!(bundle.files["pairs.tsv"].lines().count(), 37);
    assert_eq!(bundle.files.keys().filter(|k| k.starts_with("tables/")).count(), 4);
    assert!(bundle.files.contains_key("tables/p1_A.json"));
}

#[test]
fn structural_lint_blocks_unless_forced() {
    let mut s = toy_session(0, 0, 0.5);
    s.counterfactuals.a.section_mut("Born").unwrap().values.clear();
    let err = build_export(&[s.clone()], &default_rules(), false).unwrap_err();
    assert!(matches!(err, StoreError::LintBlocked(ref e) if e.len() == 1));
    assert!(build_export(&[s], &default_rules(), true).is_ok());
}

#[test]
fn bundle_survives_disk_round_trip() {
    let (sessions, _) = random_analysis_case(3, 5, 0);
    let dir = tempfile::tempdir().unwrap();
    let summary = export_dataset(&sessions, dir.path(), &default_rules(), false).unwrap();
    assert_eq!(summary.sessions, 5);
    let bundle = ExportBundle::read_from(dir.path()).unwrap();
    assert_eq!(import_bundle(&bundle).unwrap(), sessions);
}

#[test]
fn duplicate_table_ids_rejected() {
    let s = toy_session(0, 0, 0.5);
    let mut t = s.clone();
    t.session_id = "other".into();
    assert!(matches!(
        build_export(&[s, t], &default_rules(), false),
        Err(StoreError::DuplicateTable(_))
    ));
}
