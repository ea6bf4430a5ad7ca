//! Scripted HTTP client for the session service.

use std::path::Path;

use reqwest::{Client, StatusCode};
use serde_json::{json, Value};
use tabforge_core::editor::AnnotationSession;
use tabforge_core::store::SessionStore;
use tokio::task::JoinSet;

use crate::checks::CheckResult;
use crate::gen::{toy_category_map, toy_session};

/// Status each error code must carry.
const CODE_STATUS: [(&str, u16); 7] = [
    ("forbidden_original_edit", 403),
    ("type_violation", 409),
    ("revision_conflict", 409),
    ("not_found", 404),
    ("bad_request", 400),
    ("lint_blocked", 422),
    ("storage_failure", 500),
];

/// Writes the six toy sessions and their category map into a store root.
pub fn seed_store(root: &Path) -> Result<Vec<AnnotationSession>, String> {
    let store = SessionStore::open(root).map_err(|e| e.to_string())?;
    let sessions: Vec<AnnotationSession> = (0..6).map(|i| toy_session(i, 11, 0.5)).collect();
    for s in &sessions {
        store.put_session(s).map_err(|e| e.to_string())?;
    }
    let cmap = serde_json::to_string(&toy_category_map()).map_err(|e| e.to_string())?;
    std::fs::write(root.join("category_map.json"), cmap).map_err(|e| e.to_string())?;
    Ok(sessions)
}

/// Checks an error body against the error schema and the status table.
pub fn check_error_body(status: StatusCode, body: &Value) -> Result<String, String> {
    let obj = body
        .as_object()
        .ok_or_else(|| format!("error body is not an object: {body}"))?;
    for k in obj.keys() {
        ensure!(
            ["http_status", "code", "message", "details"].contains(&k.as_str()),
            "unexpected field {k:?} in {body}"
        );
    }
    let code = obj
        .get("code")
        .and_then(Value::as_str)
        .ok_or_else(|| format!("no code in {body}"))?;
    let declared = obj.get("http_status").and_then(Value::as_u64);
    ensure!(obj.get("message").is_some_and(Value::is_string), "no message in {body}");
    let expected = CODE_STATUS
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, s)| *s)
        .ok_or_else(|| format!("unknown code {code:?}"))?;
    ensure!(
        status.as_u16() == expected && declared == Some(u64::from(expected)),
        "code {code} came with status {status} / declared {declared:?}"
    );
    Ok(code.to_owned())
}

struct Api {
    client: Client,
    base: String,
}

impl Api {
    async fn send(&self, req: reqwest::RequestBuilder) -> Result<(StatusCode, String), String> {
        let resp = req.send().await.map_err(|e| e.to_string())?;
        let status = resp.status();
        let text = resp.text().await.map_err(|e| e.to_string())?;
        Ok((status, text))
    }

    async fn get(&self, path: &str) -> Result<(StatusCode, String), String> {
        self.send(self.client.get(format!("{}{path}", self.base))).await
    }

    async fn post_raw(&self, path: &str, body: String) -> Result<(StatusCode, String), String> {
        self.send(
            self.client
                .post(format!("{}{path}", self.base))
                .header("content-type", "application/json")
                .body(body),
        )
        .await
    }

    async fn post(&self, path: &str, body: &Value) -> Result<(StatusCode, String), String> {
        self.post_raw(path, body.to_string()).await
    }

    /// Expects a JSON success body.
    async fn ok_json(&self, r: Result<(StatusCode, String), String>, what: &str) -> Result<Value, String> {
        let (status, text) = r?;
        ensure!(status == StatusCode::OK, "{what}: status {status}: {text}");
        serde_json::from_str(&text).map_err(|e| format!("{what}: {e}"))
    }

    /// Expects an error with `code`.
    async fn err(&self, r: Result<(StatusCode, String), String>, code: &str, what: &str) -> Result<Value, String> {
        let (status, text) = r?;
        let body: Value = serde_json::from_str(&text).map_err(|e| format!("{what}: {e}: {text}"))?;
        let got = check_error_body(status, &body).map_err(|e| format!("{what}: {e}"))?;
        ensure!(got == code, "{what}: expected {code}, got {got}");
        Ok(body)
    }
}

fn revision(v: &Value) -> u64 {
    v["revision"].as_u64().unwrap_or(u64::MAX)
}

/// Runs every endpoint against a server on `base` (e.g.
/// `http://127.0.0.1:8080`) whose store was filled by [`seed_store`].
/// Ends with `posters` concurrent writers against one session.
pub async fn api_contract(base: &str, posters: usize, edits_each: usize) -> CheckResult {
    let api = Api {
        client: Client::new(),
        base: base.trim_end_matches('/').to_owned(),
    };

    let ids = api.ok_json(api.get("/api/sessions").await, "list").await?;
    ensure!(ids == json!(["a1", "a2", "a3", "p1", "p2", "p3"]), "session list {ids}");

    let (_, first) = api.get("/api/sessions/p1").await?;
    let (_, second) = api.get("/api/sessions/p1").await?;
    ensure!(first == second, "repeated reads differ");
    let p1: AnnotationSession = serde_json::from_str(&first).map_err(|e| format!("session body: {e}"))?;
    let base_rev = p1.revision;

    api.err(api.get("/api/sessions/nobody").await, "not_found", "unknown session")
        .await?;
    api.err(api.get("/api/sessions/nobody/lint").await, "not_found", "unknown lint")
        .await?;
    api.err(
        api.get("/api/sessions/nobody/checkpoints").await,
        "not_found",
        "unknown checkpoints",
    )
    .await?;
    api.err(
        api.post(
            "/api/sessions/nobody/edits",
            &json!({"op": "set_label", "variant": "A", "hyp_id": "h0", "label": "E"}),
        )
        .await,
        "not_found",
        "edit on unknown session",
    )
    .await?;

    api.err(
        api.post(
            "/api/sessions/p1/edits",
            &json!({"op": "add_value", "variant": "orig", "key": "Born", "text": "1900"}),
        )
        .await,
        "forbidden_original_edit",
        "edit original",
    )
    .await?;

    let violation = api
        .err(
            api.post(
                "/api/sessions/p1/edits",
                &json!({
                    "op": "move_value",
                    "src": {"variant": "orig", "key": "Born", "value_index": 0},
                    "dst_variant": "A", "dst_key": "Spouse", "dst_position": 0
                }),
            )
            .await,
            "type_violation",
            "DATE into NAME",
        )
        .await?;
    ensure!(
        violation["details"]["src_group"] == "DATE" && violation["details"]["dst_group"] == "NAME",
        "violation details {}",
        violation["details"]
    );

    api.err(
        api.post_raw("/api/sessions/p1/edits", "{not json".into()).await,
        "bad_request",
        "malformed",
    )
    .await?;
    api.err(
        api.post("/api/sessions/p1/edits", &json!({"op": "paint_it_black"}))
            .await,
        "bad_request",
        "unknown op",
    )
    .await?;
    api.err(
        api.post(
            "/api/sessions/p1/edits",
            &json!({"op": "add_value", "variant": "A", "key": "Born", "text": "  "}),
        )
        .await,
        "bad_request",
        "blank text",
    )
    .await?;
    api.err(
        api.post(
            "/api/sessions/p1/edits",
            &json!({"op": "set_label", "variant": "A", "hyp_id": "h0", "label": "N", "expected_revision": base_rev + 5}),
        )
        .await,
        "revision_conflict",
        "stale revision",
    )
    .await?;

    let after = api
        .ok_json(
            api.post(
                "/api/sessions/p1/edits",
                &json!({"op": "set_label", "variant": "A", "hyp_id": "h0", "label": "N", "expected_revision": base_rev}),
            )
            .await,
            "valid edit",
        )
        .await?;
    ensure!(
        revision(&after) == base_rev + 1,
        "revision after one edit: {}",
        revision(&after)
    );
    let rejected_then: AnnotationSession = serde_json::from_value(after.clone()).map_err(|e| e.to_string())?;
    ensure!(
        rejected_then.counterfactuals == p1.counterfactuals,
        "rejected edits changed the tables"
    );

    let ck = api
        .ok_json(api.post("/api/sessions/p1/checkpoints", &json!({})).await, "checkpoint")
        .await?;
    let ck_id = ck["checkpoint_id"].as_str().ok_or("no checkpoint_id")?.to_owned();
    let list = api
        .ok_json(api.get("/api/sessions/p1/checkpoints").await, "checkpoint list")
        .await?;
    ensure!(
        list.as_array()
            .is_some_and(|l| l.len() == 1 && l[0]["checkpoint_id"] == ck_id.as_str()),
        "checkpoint list {list}"
    );
    let edited = api
        .ok_json(
            api.post(
                "/api/sessions/p1/edits",
                &json!({"op": "delete_section", "variant": "B", "key": "Born"}),
            )
            .await,
            "delete section",
        )
        .await?;
    ensure!(revision(&edited) == base_rev + 2, "revision {}", revision(&edited));
    let restored = api
        .ok_json(
            api.post(&format!("/api/sessions/p1/restore/{ck_id}"), &json!({})).await,
            "restore",
        )
        .await?;
    ensure!(
        restored["counterfactuals"] == after["counterfactuals"] && restored["hypotheses"] == after["hypotheses"],
        "restore did not bring back the checkpoint state"
    );
    ensure!(
        revision(&restored) == base_rev + 3,
        "revision after restore {}",
        revision(&restored)
    );
    api.err(
        api.post("/api/sessions/p1/restore/ckpt-99", &json!({})).await,
        "not_found",
        "unknown checkpoint",
    )
    .await?;

    let lint = api.ok_json(api.get("/api/sessions/p1/lint").await, "lint").await?;
    ensure!(lint["entries"].is_array(), "lint body {lint}");

    let export = api.ok_json(api.get("/api/export").await, "export").await?;
    let pairs = export["files"]["pairs.tsv"].as_str().ok_or("export has no pairs.tsv")?;
    ensure!(
        pairs.lines().count() == 1 + 6 * 12,
        "pairs.tsv has {} lines",
        pairs.lines().count()
    );
    ensure!(
        export["files"]["tables/p1_A.json"].is_string(),
        "export has no tables/p1_A.json"
    );

    let (status, page) = api.get("/").await?;
    ensure!(status == StatusCode::OK && page.contains("<"), "GET / gave {status}");
    api.err(api.get("/api/nothing/here").await, "not_found", "unknown endpoint")
        .await?;

    // concurrent writers on one session
    let target = "p3";
    let start: Value = api
        .ok_json(api.get(&format!("/api/sessions/{target}")).await, "p3")
        .await?;
    let start_s: AnnotationSession = serde_json::from_value(start.clone()).map_err(|e| e.to_string())?;
    let key = start_s
        .counterfactuals
        .a
        .sections
        .first()
        .ok_or("p3 draft A has no sections")?
        .key
        .clone();
    let mut tasks = JoinSet::new();
    for w in 0..posters {
        let client = api.client.clone();
        let base = api.base.clone();
        let key = key.clone();
        tasks.spawn(async move {
            let api = Api { client, base };
            let mut accepted = Vec::new();
            for i in 0..edits_each {
                let body = match i % 4 {
                    3 => json!({"op": "set_label", "variant": "B", "hyp_id": "missing", "label": "E"}),
                    2 => json!({"op": "add_value", "variant": "orig", "key": key, "text": "x"}),
                    _ => json!({"op": "add_value", "variant": "A", "key": key, "text": format!("w{w}-{i}")}),
                };
                let (status, text) = api.post(&format!("/api/sessions/{target}/edits"), &body).await?;
                if status == StatusCode::OK {
                    accepted.push(format!("w{w}-{i}"));
                } else {
                    let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
                    check_error_body(status, &v)?;
                }
            }
            Ok::<_, String>(accepted)
        });
    }
    let mut accepted = Vec::new();
    while let Some(r) = tasks.join_next().await {
        accepted.extend(r.map_err(|e| e.to_string())??);
    }
    let end: Value = api
        .ok_json(api.get(&format!("/api/sessions/{target}")).await, "p3 after")
        .await?;
    ensure!(
        revision(&end) == revision(&start) + accepted.len() as u64,
        "revision {} != {} + {} accepted",
        revision(&end),
        revision(&start),
        accepted.len()
    );
    let end_s: AnnotationSession = serde_json::from_value(end.clone()).map_err(|e| e.to_string())?;
    let texts: Vec<&str> = end_s
        .counterfactuals
        .a
        .section(&key)
        .ok_or("target key vanished")?
        .texts()
        .collect();
    for a in &accepted {
        ensure!(
            texts.iter().filter(|t| *t == a).count() == 1,
            "edit {a} lost or duplicated"
        );
    }
    Ok(format!(
        "all endpoints; {posters} posters, {} accepted edits, revision {}",
        accepted.len(),
        revision(&end)
    ))
}
