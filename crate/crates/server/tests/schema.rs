use serde_json::Value;
use tabforge_server::ERROR_CODES;

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/openapi.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn error_codes_match_schema() {
    let doc = schema();
    let api_error = &doc["components"]["schemas"]["ApiError"];
    let codes: Vec<&str> = api_error["properties"]["code"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(codes, ERROR_CODES.map(|(c, _)| c));
    for (code, status) in ERROR_CODES {
        assert_eq!(api_error["x-status-by-code"][code], u64::from(status), "{code}");
    }
}

#[test]
fn every_route_is_documented() {
    let doc = schema();
    for (path, method) in [
        ("/api/sessions", "get"),
        ("/api/sessions/{id}", "get"),
        ("/api/sessions/{id}/edits", "post"),
        ("/api/sessions/{id}/checkpoints", "get"),
        ("/api/sessions/{id}/checkpoints", "post"),
        ("/api/sessions/{id}/restore/{ckpt}", "post"),
        ("/api/sessions/{id}/lint", "get"),
        ("/api/export", "get"),
        ("/", "get"),
    ] {
        assert!(doc["paths"][path][method].is_object(), "{method} {path}");
    }
}
