use tabforge_core::editor::*;
use tabforge_core::model::{Label, Variant};
use tabforge_core::table_json::serialize_table;
use tabforge_testkit::{checks, toy_category_map, toy_session};

#[test]
fn ten_thousand_random_sequences_match_reference() {
    let r = checks::editor_properties(10_000, 10);
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

#[test]
fn type_validator_matches_hand_groups() {
    let r = checks::type_validator_equivalence();
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

#[test]
fn lint_fixtures_and_dates() {
    let r = checks::constraint_linter();
    assert!(r.is_ok(), "{}", r.unwrap_err());
}

fn edit(s: &AnnotationSession, cmd: EditCommand) -> Result<AnnotationSession, EditError> {
    apply_edit(s, &cmd, &toy_category_map())
}

#[test]
fn original_is_read_only() {
    let s = toy_session(0, 1, 0.5);
    let before = serialize_table(&s.original);
    let err = edit(
        &s,
        EditCommand::AddValue {
            variant: Variant::Orig,
            key: "Born".into(),
            text: "1900".into(),
        },
    )
    .unwrap_err();
    assert_eq!(err, EditError::ForbiddenOriginalEdit);
    let err = edit(
        &s,
        EditCommand::MoveValue {
            src: CellRef::new(Variant::A, "Born", 0),
            dst_variant: Variant::Orig,
            dst_key: "Born".into(),
            dst_position: 0,
        },
    )
    .unwrap_err();
    assert_eq!(err, EditError::ForbiddenOriginalEdit);
    assert_eq!(serialize_table(&s.original), before);

    // marking relevant rows of an original hypothesis is allowed
    let next = edit(
        &s,
        EditCommand::SetRelevantKeys {
            variant: Variant::Orig,
            hyp_id: "h0".into(),
            keys: vec!["Born".into(), "Born".into(), "Died".into()],
        },
    )
    .unwrap();
    assert_eq!(next.hypotheses(Variant::Orig)[0].relevant_keys, ["Born", "Died"]);
}

#[test]
fn edit_key_renames_relevant_keys() {
    let s = toy_session(0, 1, 0.0);
    let s = edit(
        &s,
        EditCommand::SetRelevantKeys {
            variant: Variant::B,
            hyp_id: "h1".into(),
            keys: vec!["Spouse".into()],
        },
    )
    .unwrap();
    let s = edit(
        &s,
        EditCommand::EditKey {
            variant: Variant::B,
            key: "Spouse".into(),
            new_key: "Partner".into(),
        },
    )
    .unwrap();
    assert_eq!(s.hypotheses(Variant::B)[1].relevant_keys, ["Partner"]);
    assert!(s.dangling_relevant_keys().is_empty());
    assert_eq!(s.revision, 2);
    assert_eq!(
        edit(
            &s,
            EditCommand::EditKey {
                variant: Variant::B,
                key: "Partner".into(),
                new_key: "Born".into(),
            },
        )
        .unwrap_err(),
        EditError::DuplicateKey("Born".into())
    );
}

#[test]
fn add_section_and_labels() {
    let s = toy_session(3, 1, 0.0);
    let s = edit(
        &s,
        EditCommand::AddSection {
            variant: Variant::C,
            key: "Awards".into(),
            texts: vec!["Grammy".into(), "Hall of Fame".into()],
        },
    )
    .unwrap();
    let sec = s.table(Variant::C).section("Awards").unwrap();
    assert!(sec.values.iter().all(|c| c.provenance.to_string() == "0000010"));
    let s = edit(
        &s,
        EditCommand::SetLabel {
            variant: Variant::C,
            hyp_id: "h0".into(),
            label: Label::Contradict,
        },
    )
    .unwrap();
    assert_eq!(s.hypotheses(Variant::C)[0].label, Label::Contradict);
    assert_eq!(s.hypotheses(Variant::Orig)[0].label, Label::Entail);
    assert_eq!(
        edit(
            &s,
            EditCommand::SetHypothesisText {
                variant: Variant::C,
                hyp_id: "h0".into(),
                text: "   ".into(),
            },
        )
        .unwrap_err(),
        EditError::EmptyText
    );
}

#[test]
fn session_lint_flags_drafts_by_variant() {
    let mut s = toy_session(0, 1, 0.0);
    s.counterfactuals.b.section_mut("Born").unwrap().values[0].text = "1999".into();
    s.counterfactuals.b.section_mut("Died").unwrap().values[0].text = "1950".into();
    let report = lint_session(&s, &default_rules());
    let v: Vec<_> = report.violations().collect();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].variant, Some(Variant::B));
    assert_eq!(v[0].keys, ["Born", "Died"]);
    assert_eq!(report.blocking().count(), 0);
}
