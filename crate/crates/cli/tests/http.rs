mod support;

use std::sync::Arc;

use dairector_core::session::{FixedClock, RequestKind, SessionConfig};
use serde_json::{json, Value};
use support::*;

fn server(dir: &std::path::Path) -> Server {
    Server::start(engine(), dir, Arc::new(FixedClock::epoch()))
}

fn create(s: &Server, body: &str) -> (String, Value) {
    let (status, v) = s.request("POST", "/api/sessions", Some(body));
    assert_eq!(status, 201, "{v}");
    (v["session_id"].as_str().unwrap().to_string(), v)
}

fn advance(s: &Server, id: &str, body: &str) -> (u16, Value) {
    s.request("POST", &format!("/api/sessions/{id}/advance"), Some(body))
}

#[test]
fn same_seed_same_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let s = server(dir.path());
    let (a, ea) = create(&s, r#"{"seed": 7}"#);
    let (b, eb) = create(&s, r#"{"seed": 7}"#);
    assert_ne!(a, b);
    assert_eq!(ea["entry"], eb["entry"]);
    for body in [r#"{"request":"tilt"}"#, r#"{"request":"platform"}"#, r#"{"request":"tilt","prompt":"a duel"}"#] {
        let (sa, ra) = advance(&s, &a, body);
        let (sb, rb) = advance(&s, &b, body);
        assert_eq!((sa, sb), (200, 200), "{ra}");
        assert_eq!(ra["entry"], rb["entry"]);
    }
    let (_, ta) = s.request("GET", &format!("/api/sessions/{a}"), None);
    let (_, tb) = s.request("GET", &format!("/api/sessions/{b}"), None);
    assert_eq!(ta["transcript"], tb["transcript"]);
    assert_eq!(ta["seed"], 7);
    assert_eq!(ta["transcript"].as_array().unwrap().len(), 4);
}

#[test]
fn error_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let s = server(dir.path());
    let (st, v) = s.request("GET", "/api/sessions/no-such-session", None);
    assert_eq!(st, 404);
    assert_eq!(v["error"]["code"], "not_found");
    assert_eq!(advance(&s, "no-such-session", r#"{"request":"tilt"}"#).0, 404);
    assert_eq!(s.request("GET", "/api/nothing", None).0, 404);

    let (st, v) = s.request("POST", "/api/sessions", Some("{not json"));
    assert_eq!(st, 400);
    assert_eq!(v["error"]["code"], "bad_request");
    assert_eq!(s.request("POST", "/api/sessions", Some(r#"{"sed": 1}"#)).0, 400);
    assert_eq!(s.request("POST", "/api/sessions", Some(r#"{"root": "nope"}"#)).0, 400);

    let (id, _) = create(&s, "");
    assert_eq!(advance(&s, &id, "").0, 400);
    assert_eq!(advance(&s, &id, r#"{"request":"jump"}"#).0, 400);
}

#[test]
fn ended_session_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let s = server(dir.path());
    let (id, _) = create(&s, r#"{"seed": 1, "root": "746", "max_depth": 2}"#);
    assert_eq!(advance(&s, &id, r#"{"request":"platform"}"#).0, 200);
    let (st, v) = advance(&s, &id, r#"{"request":"platform"}"#);
    assert_eq!(st, 200);
    assert_eq!(v["entry"]["kind"], "ENDED");
    assert_eq!(v["ended"], true);
    let (st, v) = advance(&s, &id, r#"{"request":"platform"}"#);
    assert_eq!(st, 409);
    assert_eq!(v["error"]["code"], "ended");
    let (st, v) = advance(&s, &id, r#"{"request":"tilt"}"#);
    assert_eq!(st, 200);
    assert_eq!(v["entry"]["kind"], "TILT");
}

#[test]
fn http_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let s = server(dir.path());
    let (id, created) = create(&s, r#"{"seed": 42, "root": "18a"}"#);

    let e = engine();
    let clock = FixedClock::epoch();
    let cfg = SessionConfig {
        seed: Some(42),
        root: Some("18a".into()),
        max_depth: None,
    };
    let mut local = e.create_session(names(), &cfg, &clock).unwrap();
    assert_eq!(created["entry"], serde_json::to_value(local.last_entry()).unwrap());
    let steps = [
        (RequestKind::Platform, Some("gossip about the bride")),
        (RequestKind::Tilt, None),
        (RequestKind::Platform, None),
    ];
    for (kind, prompt) in steps {
        let body = json!({"request": kind, "prompt": prompt}).to_string();
        let (st, v) = advance(&s, &id, &body);
        assert_eq!(st, 200, "{v}");
        let entry = e.handle_request(&mut local, kind, prompt, &clock).unwrap();
        assert_eq!(v["entry"], serde_json::to_value(&entry).unwrap());
    }
}

#[test]
fn health_reports_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let s = server(dir.path());
    let (st, v) = s.request("GET", "/api/health", None);
    assert_eq!(st, 200);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["model_hash"], engine().model_hash());
}

#[test]
fn sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let (id, before) = {
        let s = server(dir.path());
        let (id, _) = create(&s, r#"{"seed": 3, "root": "18a"}"#);
        advance(&s, &id, r#"{"request":"tilt"}"#);
        advance(&s, &id, r#"{"request":"platform"}"#);
        let (_, t) = s.request("GET", &format!("/api/sessions/{id}"), None);
        (id, t)
    };
    let s = server(dir.path());
    let (st, after) = s.request("GET", &format!("/api/sessions/{id}"), None);
    assert_eq!(st, 200);
    assert_eq!(after, before);
    let (st, v) = advance(&s, &id, r#"{"request":"tilt"}"#);
    assert_eq!(st, 200);
    assert_eq!(v["seq"], 3);
}
