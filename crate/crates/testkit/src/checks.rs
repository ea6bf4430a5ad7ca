//! Whole-criterion checks. Each returns a short summary on success and the
//! first discrepancy on failure.

use std::collections::HashMap;
use std::path::Path;

use chrono::Datelike;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tabforge_core::analysis::{
    accuracy, dataset_stats, provenance_effect, strategy_effect, EffectRow, PairIndex, PredictionRecord, Scalar,
};
use tabforge_core::codec::{decode_value_provenance, decode_value_provenance_lenient, encode_value_provenance};
use tabforge_core::editor::dates::earliest_date;
use tabforge_core::editor::{
    apply_edit, default_rules, lint_constraints, validate_move, AnnotationSession, EditCommand, LintKind, MoveCheck,
};
use tabforge_core::initializer::{auto_initialize, build_category_map, build_value_pool, HeuristicTagger, InitPolicy};
use tabforge_core::model::{Label, Variant};
use tabforge_core::store::{build_export, import_bundle, SessionStore};
use tabforge_core::table_json::{parse_table, serialize_table};
use tabforge_core::Exact;

use crate::analysis::{
    random_analysis_case, recount_provenance, recount_strategy, reference_shape_sessions, RecountRow,
};
use crate::corpus::{toy_corpus, toy_group, DATE_FIXTURE, TOY_KEY_GROUPS};
use crate::gen::{random_command, toy_category_map, toy_session};
use crate::oracle::{move_allowed, scan_source_prefixes};
use crate::reference::{RefErr, RefModel};

pub type CheckResult = Result<String, String>;

/// Exhaustive provenance and strategy codec round trip.
pub fn codec_exhaustive() -> CheckResult {
    let mut valid = 0;
    for n in 0u8..128 {
        let s = format!("{n:07b}");
        let b: Vec<bool> = s.chars().map(|c| c == '1').collect();
        let expect_ok = (b[2] || !(b[0] || b[1])) && (!b[5] || !b[..5].contains(&true));
        match decode_value_provenance(&s) {
            Ok(p) => {
                ensure!(expect_ok, "{s} decoded but breaks a validity rule");
                ensure!(
                    encode_value_provenance(p).as_deref() == Ok(s.as_str()),
                    "{s} does not round-trip"
                );
                valid += 1;
            }
            Err(_) => ensure!(!expect_ok, "{s} rejected but valid"),
        }
    }
    for n in 0u8..64 {
        let s = format!("{n:06b}");
        let f = tabforge_core::codec::decode_strategy_flags(&s).map_err(|e| e.to_string())?;
        ensure!(
            tabforge_core::codec::encode_strategy_flags(f) == s,
            "strategy {s} does not round-trip"
        );
    }
    Ok(format!(
        "{valid} valid / {} rejected provenance patterns, 64 strategy patterns",
        128 - valid
    ))
}

/// Worked-example bitstrings: prefixes read as printed, suffix read in copy/add/edit bit order.
pub fn worked_example_fixtures() -> CheckResult {
    let cases = [
        (
            "1010010",
            "1010: different dataset, same category, different table, same key",
        ),
        (
            "0111010",
            "0111: same dataset, different category, different table, different key",
        ),
        (
            "0111000",
            "0111: same dataset, different category, different table, different key",
        ),
    ];
    for (bits, gloss) in cases {
        let (p, _) = decode_value_provenance_lenient(bits).map_err(|e| e.to_string())?;
        ensure!(p.source_gloss() == gloss, "{bits}: gloss {:?}", p.source_gloss());
    }
    let (p, v) = decode_value_provenance_lenient("1010010").map_err(|e| e.to_string())?;
    ensure!(p.newly_added && !p.text_edited, "suffix 010 must read as newly added");
    ensure!(v.is_some(), "suffix 010 on a shuffled value must be flagged");
    ensure!(
        decode_value_provenance("1010010").is_err(),
        "strict decode must reject 1010010"
    );
    Ok("3 worked-example strings; suffix 010 read as newly added".into())
}

/// Seeded initializer runs checked against a brute-force location scan.
pub fn initializer_oracle(runs: u64) -> CheckResult {
    let corpus = toy_corpus();
    let pool = build_value_pool(corpus.iter().map(|(t, d)| (t, *d))).map_err(|e| e.to_string())?;
    let cmap = build_category_map(corpus.iter().map(|(t, _)| t), &HeuristicTagger);
    for (key, group) in TOY_KEY_GROUPS {
        ensure!(
            cmap.group(key) == *group,
            "tagger put {key:?} in {:?}, expected {group:?}",
            cmap.group(key)
        );
    }
    let mut replaced = 0usize;
    for seed in 0..runs {
        let policy = InitPolicy::default().with_seed(seed);
        for (original, _) in &corpus {
            let out = auto_initialize(original, &pool, &cmap, &policy).map_err(|e| e.to_string())?;
            let again = auto_initialize(original, &pool, &cmap, &policy).map_err(|e| e.to_string())?;
            ensure!(
                serialize_table(&out.table) == serialize_table(&again.table),
                "seed {seed} table {}: rerun differs",
                original.table_id
            );
            for r in &out.replacements {
                let cell = out
                    .table
                    .cell(&r.key, r.value_index)
                    .ok_or("replacement points nowhere")?;
                let prefix = cell.provenance.source_prefix();
                ensure!(
                    cell.provenance.check().is_ok(),
                    "invalid provenance {}",
                    cell.provenance
                );
                ensure!(prefix == r.class.to_string(), "recorded {prefix} but class {}", r.class);
                let scan = scan_source_prefixes(&corpus, &original.table_id, &r.key, &cell.text);
                ensure!(
                    scan.contains(&prefix),
                    "seed {seed}: {:?} under {}/{} recorded {prefix}, scan found {scan:?}",
                    cell.text,
                    original.table_id,
                    r.key
                );
                ensure!(
                    move_allowed(toy_group(&r.source.key), toy_group(&r.key)),
                    "seed {seed}: {} value landed under {}",
                    r.source.key,
                    r.key
                );
                replaced += 1;
            }
            for (s, o) in out.table.sections.iter().zip(&original.sections) {
                for (i, (c, oc)) in s.values.iter().zip(&o.values).enumerate() {
                    let was_replaced = out.replacements.iter().any(|r| r.key == s.key && r.value_index == i);
                    if !was_replaced {
                        ensure!(
                            c.text == oc.text && c.provenance.to_bits() == 0,
                            "untouched cell changed"
                        );
                    }
                }
            }
        }
    }
    ensure!(replaced > 0, "no cell was ever replaced");
    Ok(format!(
        "{runs} seeds x {} tables, {replaced} replacements, 0 violations",
        corpus.len()
    ))
}

/// Every toy key pair, plus an unknown key, against the hand-assigned groups.
pub fn type_validator_equivalence() -> CheckResult {
    let corpus = toy_corpus();
    let cmap = build_category_map(corpus.iter().map(|(t, _)| t), &HeuristicTagger);
    let mut keys: Vec<&str> = TOY_KEY_GROUPS.iter().map(|(k, _)| *k).collect();
    keys.push("Unseen key");
    let mut pairs = 0;
    for src in &keys {
        for dst in &keys {
            let expected = move_allowed(toy_group(src), toy_group(dst));
            let got = validate_move(&cmap, src, dst);
            ensure!(
                (got == MoveCheck::Compatible) == expected,
                "{src} -> {dst}: got {got:?}, oracle says {expected}"
            );
            if let MoveCheck::Incompatible { src_group, dst_group } = got {
                ensure!(
                    Some(src_group) == toy_group(src) && Some(dst_group) == toy_group(dst),
                    "{src} -> {dst}: wrong groups reported"
                );
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} key pairs agree"))
}

fn cell_multiset(s: &AnnotationSession) -> HashMap<(String, u8), i64> {
    let mut m = HashMap::new();
    for v in Variant::COUNTERFACTUAL {
        for sec in &s.table(v).sections {
            for c in &sec.values {
                *m.entry((c.text.clone(), c.provenance.to_bits())).or_insert(0) += 1;
            }
        }
    }
    m
}

fn multiset_diff(a: &HashMap<(String, u8), i64>, b: &HashMap<(String, u8), i64>) -> Vec<(String, u8)> {
    let mut out = Vec::new();
    for (k, &n) in a {
        for _ in 0..(n - b.get(k).copied().unwrap_or(0)).max(0) {
            out.push(k.clone());
        }
    }
    out
}

/// Checks the cell-level effect of one accepted command.
fn check_cell_effects(before: &AnnotationSession, after: &AnnotationSession, cmd: &EditCommand) -> Result<(), String> {
    let (b, a) = (cell_multiset(before), cell_multiset(after));
    let added = multiset_diff(&a, &b);
    let removed = multiset_diff(&b, &a);
    match cmd {
        EditCommand::MoveValue { src, .. } if src.variant == Variant::Orig => {
            ensure!(removed.is_empty(), "copy removed cells");
            ensure!(added.len() == 1 && added[0].1 == 0b0000100, "copy added {added:?}");
        }
        EditCommand::MoveValue { .. } => {
            ensure!(
                added.is_empty() && removed.is_empty(),
                "cut-paste changed the cell multiset"
            );
        }
        EditCommand::AddValue { .. } | EditCommand::AddSection { .. } => {
            ensure!(removed.is_empty(), "add removed cells");
            ensure!(added.iter().all(|c| c.1 == 0b0000010), "add produced {added:?}");
        }
        EditCommand::EditValueText { .. } => {
            ensure!(
                added.len() == removed.len() && added.len() <= 1,
                "edit changed more than one cell"
            );
            if let (Some(n), Some(o)) = (added.first(), removed.first()) {
                ensure!(n.1 == o.1 | 1, "edit turned {:07b} into {:07b}", o.1, n.1);
            }
        }
        _ => ensure!(added.is_empty(), "{} created cells {added:?}", cmd.op_name()),
    }
    // Only deletes and text edits may take a cell away.
    if !matches!(
        cmd,
        EditCommand::DeleteValue { .. } | EditCommand::DeleteSection { .. } | EditCommand::EditValueText { .. }
    ) {
        ensure!(removed.is_empty(), "{} dropped cells {removed:?}", cmd.op_name());
    }
    Ok(())
}

/// Random command sequences against the reference model.
pub fn editor_properties(sequences: u64, steps: usize) -> CheckResult {
    let cmap = toy_category_map();
    let (mut accepted, mut rejected) = (0usize, 0usize);
    for seq in 0..sequences {
        let mut rng = ChaCha8Rng::seed_from_u64(seq);
        let mut s = toy_session((seq % 6) as usize, seq, 0.5);
        let mut model = RefModel::from_session(&s);
        let original_bytes = serialize_table(&s.original);
        for step in 0..steps {
            let cmd = random_command(&mut rng, &s);
            let snapshot = s.clone();
            let got = apply_edit(&s, &cmd, &cmap);
            let want = model.apply(&cmd);
            ensure!(s == snapshot, "apply_edit mutated its input");
            match (got, want) {
                (Ok(next), Ok(())) => {
                    ensure!(
                        RefModel::from_session(&next) == model,
                        "seq {seq} step {step}: {cmd:?} diverged from reference"
                    );
                    ensure!(next.revision == s.revision + 1, "revision not bumped");
                    ensure!(
                        serialize_table(&next.original) == original_bytes,
                        "original table changed"
                    );
                    check_cell_effects(&s, &next, &cmd).map_err(|e| format!("seq {seq} step {step}: {e}"))?;
                    s = next;
                    accepted += 1;
                }
                (Err(e), Err(k)) => {
                    ensure!(
                        RefErr::of(&e) == k,
                        "seq {seq} step {step}: {cmd:?} gave {e}, reference {k:?}"
                    );
                    ensure!(RefModel::from_session(&s) == model, "reference changed on error");
                    rejected += 1;
                }
                (Ok(_), Err(k)) => return Err(format!("seq {seq} step {step}: {cmd:?} accepted, reference {k:?}")),
                (Err(e), Ok(())) => return Err(format!("seq {seq} step {step}: {cmd:?} rejected ({e}), reference ok")),
            }
        }
    }
    Ok(format!(
        "{sequences} sequences, {accepted} accepted / {rejected} rejected commands"
    ))
}

/// Linter fixtures plus the hand-parsed date table.
pub fn constraint_linter() -> CheckResult {
    let rules = default_rules();
    let t = |json: &str| parse_table(json).map_err(|e| e.to_string());
    let bad = lint_constraints(&t(r#"{"title":["P"],"Born":["1950"],"Died":["1940"]}"#)?, &rules);
    ensure!(
        bad.violations().count() == 1 && bad.entries.len() == 1,
        "Born>Died: {:?}",
        bad.entries
    );
    let good = lint_constraints(&t(r#"{"title":["P"],"Born":["1950"],"Died":["1960"]}"#)?, &rules);
    ensure!(good.is_empty(), "well-ordered: {:?}", good.entries);
    let unk = lint_constraints(
        &t(r#"{"title":["A"],"Released":["March 1970"],"Recorded":["gibberish"]}"#)?,
        &rules,
    );
    ensure!(
        !unk.has_violations() && unk.entries.len() == 1 && unk.entries[0].kind == LintKind::Unverifiable,
        "unparseable: {:?}",
        unk.entries
    );
    for (text, want) in DATE_FIXTURE {
        let got = earliest_date([*text]).map(|d| (d.year(), d.month(), d.day()));
        ensure!(got == *want, "date {text:?}: got {got:?}, want {want:?}");
    }
    Ok(format!("3 lint fixtures, {} date cases", DATE_FIXTURE.len()))
}

/// Edit/save/restore interleavings against an in-memory checkpoint list,
/// then an export round trip.
pub fn store_model(root: &Path, runs: u64) -> CheckResult {
    let cmap = toy_category_map();
    let mut saves = 0;
    for run in 0..runs {
        let store = SessionStore::open(root.join(format!("run{run}"))).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + run);
        let mut s = toy_session((run % 6) as usize, run, 0.5);
        store.put_session(&s).map_err(|e| e.to_string())?;
        let mut model: Vec<AnnotationSession> = Vec::new();
        for step in 0..25 {
            match rng.gen_range(0..4) {
                0 | 1 => {
                    let cmd = random_command(&mut rng, &s);
                    if let Ok(next) = apply_edit(&s, &cmd, &cmap) {
                        s = next;
                        store.put_session(&s).map_err(|e| e.to_string())?;
                    }
                }
                2 => {
                    let id = store.save_checkpoint(&s).map_err(|e| e.to_string())?;
                    model.push(s.clone());
                    ensure!(id == format!("ckpt-{}", model.len()), "run {run}: checkpoint id {id}");
                    ensure!(
                        store
                            .restore_checkpoint(&s.session_id, &id)
                            .map_err(|e| e.to_string())?
                            == s,
                        "run {run}: restore(save(s)) != s"
                    );
                    saves += 1;
                }
                _ if !model.is_empty() => {
                    let i = rng.gen_range(0..model.len());
                    let restored = store
                        .restore_checkpoint(&s.session_id, &format!("ckpt-{}", i + 1))
                        .map_err(|e| e.to_string())?;
                    ensure!(
                        restored == model[i],
                        "run {run} step {step}: checkpoint {} differs",
                        i + 1
                    );
                    s = restored;
                    store.put_session(&s).map_err(|e| e.to_string())?;
                }
                _ => {}
            }
            ensure!(
                store.load_session(&s.session_id).map_err(|e| e.to_string())? == s,
                "run {run} step {step}: stored head differs"
            );
        }
        let listed = store.list_checkpoints(&s.session_id).map_err(|e| e.to_string())?;
        ensure!(
            listed.len() == model.len(),
            "run {run}: {} checkpoints listed",
            listed.len()
        );
        for (info, want) in listed.iter().zip(&model) {
            let got = store
                .load_checkpoint(&s.session_id, &info.checkpoint_id)
                .map_err(|e| e.to_string())?;
            ensure!(
                got.payload == *want && info.revision == want.revision,
                "run {run}: {} rewritten",
                info.checkpoint_id
            );
        }
    }

    let (sessions, _) = random_analysis_case(7, 12, 0);
    let (first, _) = build_export(&sessions, &default_rules(), false).map_err(|e| e.to_string())?;
    let imported = import_bundle(&first).map_err(|e| e.to_string())?;
    ensure!(imported == sessions, "import(export(x)) != x");
    let (second, _) = build_export(&imported, &default_rules(), false).map_err(|e| e.to_string())?;
    ensure!(first == second, "export -> import -> export is not byte-stable");
    Ok(format!(
        "{runs} interleavings, {saves} checkpoints; {} bundle files stable",
        first.files.len()
    ))
}

fn exact(s: &str) -> Exact {
    <Exact as tabforge_core::analysis::Scalar>::parse_decimal(s).expect("decimal literal")
}

fn rows_match(got: &[EffectRow<Exact>], want: &[RecountRow]) -> Result<(), String> {
    ensure!(
        got.len() == want.len(),
        "{} rows, recount has {}",
        got.len(),
        want.len()
    );
    for (g, w) in got.iter().zip(want) {
        ensure!(
            g.group_key == w.group
                && g.n_pairs == w.n
                && g.acc_original == Exact::new(w.orig_hundredths, 100)
                && g.acc_counterfactual == Exact::new(w.cf_hundredths, 100)
                && g.drop == g.acc_original - g.acc_counterfactual,
            "row {g:?} vs recount {w:?}"
        );
    }
    Ok(())
}

/// Accuracy arithmetic and recount agreement.
pub fn analysis_checks(random_seeds: u64) -> CheckResult {
    let balanced: Vec<PredictionRecord> = (0..300)
        .map(|i| PredictionRecord::new(format!("p{i}"), Variant::A, Label::ALL[i % 3], Label::Entail))
        .collect();
    let majority: Exact = accuracy(&balanced, |_| true).map_err(|e| e.to_string())?;
    let gap = majority - exact("33.33");
    ensure!(
        gap <= exact("0.005") && gap >= -exact("0.005"),
        "majority baseline {majority}"
    );

    for (o, c, d) in [("78.91", "61.26", "17.65"), ("64.32", "44.85", "19.47")] {
        let row = EffectRow::new("rows", 1, exact(o), exact(c));
        ensure!(row.drop == exact(d), "{o} - {c} gave {}", row.drop);
    }

    for seed in 0..random_seeds {
        let (sessions, records) = random_analysis_case(seed, 40, 500);
        ensure!(records.len() == 500, "seed {seed}: {} records", records.len());
        let index = PairIndex::new(&sessions);
        let st = strategy_effect::<Exact>(&records, &index).map_err(|e| e.to_string())?;
        rows_match(&st.rows, &recount_strategy(&records, &sessions))
            .map_err(|e| format!("seed {seed} strategy: {e}"))?;
        let pr = provenance_effect::<Exact>(&records, &index).map_err(|e| e.to_string())?;
        rows_match(&pr.rows, &recount_provenance(&records, &sessions))
            .map_err(|e| format!("seed {seed} provenance: {e}"))?;
    }
    Ok(format!(
        "majority {}; drops 17.65 / 19.47; {random_seeds} x 500-record recounts agree",
        majority.fmt2()
    ))
}

/// The reference-shaped corpus, counted directly and after an export round trip.
pub fn stats_reference_shape() -> CheckResult {
    let sessions = reference_shape_sessions();
    let (bundle, _) = build_export(&sessions, &default_rules(), false).map_err(|e| e.to_string())?;
    let imported = import_bundle(&bundle).map_err(|e| e.to_string())?;
    let st = dataset_stats(&imported);
    let text = st.render();
    ensure!(text.lines().any(|l| l == "total 982"), "stats:\n{text}");
    ensure!(
        st.pairs(Variant::A) == 423 && st.pairs(Variant::B) == 405 && st.pairs(Variant::C) == 154,
        "per-variant pairs {:?}",
        st.pairs_per_variant
    );
    ensure!(
        st.counterfactual_tables == 109,
        "counterfactual tables {}",
        st.counterfactual_tables
    );
    Ok("total 982; 109 counterfactual tables".into())
}
