use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use paramine_core::alignment::{emit_alignment_inputs, parse_links};
use paramine_core::extractor::{extract_article, RawPage, SiteProfile};
use paramine_core::model::save_articles;
use paramine_core::{mine, ArticleIndex, CorpusFile, HeadlineAnnotation, Language, MinerConfig, ValidationConfig, Verdict};
use paramine_service::{router, Store};
use serde_json::{json, Value};
use tokio::sync::RwLock;
use tower::ServiceExt;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pipeline")
}

fn verdicts() -> Vec<(String, String, Verdict)> {
    std::fs::read_to_string(fixtures().join("verdicts.tsv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[0].to_string(), c[1].to_string(), c[2].parse().unwrap())
        })
        .collect()
}

/// Articles, candidates and alignment documents built from the fixture pages.
fn data_dir(dir: &Path) {
    let profile = SiteProfile::load(fixtures().join("profile.json")).unwrap();
    let mut ckb = CorpusFile::new("kp", Language::Ckb);
    let mut kmr = CorpusFile::new("kp", Language::Kmr);
    for page in RawPage::load_dir(&fixtures().join("pages")).unwrap() {
        let a = extract_article(&page, &profile).unwrap();
        if a.language == Language::Ckb { &mut ckb } else { &mut kmr }.articles.push(a);
    }
    std::fs::create_dir_all(dir.join("articles")).unwrap();
    save_articles(&ckb, dir.join("articles/kp.ckb.json")).unwrap();
    save_articles(&kmr, dir.join("articles/kp.kmr.json")).unwrap();
    let sets = mine(&ckb, &kmr, MinerConfig::default()).unwrap();
    std::fs::write(dir.join("candidates.json"), serde_json::to_string(&sets).unwrap()).unwrap();
    let annotations: Vec<_> = verdicts()
        .into_iter()
        .map(|(s, t, v)| HeadlineAnnotation {
            source_id: s,
            target_id: t,
            verdict: v,
            annotator: "fixture".into(),
            timestamp: None,
            matched_via: None,
        })
        .collect();
    emit_alignment_inputs(&annotations, &ArticleIndex::new([&ckb, &kmr]), &dir.join("alignment")).unwrap();
}

fn app(dir: &Path) -> Router {
    router(Arc::new(RwLock::new(Store::open(dir, ValidationConfig::default()).unwrap())))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    (status, serde_json::from_str(&text).unwrap_or(Value::Null), text)
}

fn verdict_body(s: &str, t: &str, v: &str) -> Value {
    json!({ "source_id": s, "target_id": t, "verdict": v, "annotator": "ana" })
}

#[tokio::test]
async fn verdict_then_next_task_skips_pair() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());

    let (status, task, _) = call(&app, "GET", "/tasks/next?annotator=ana", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(task["verdicts"], json!(["equivalent", "possible", "none"]));
    let source = task["source"]["id"].as_str().unwrap().to_string();
    let first = task["candidates"][0]["target_id"].as_str().unwrap().to_string();
    let before = task["candidates"].as_array().unwrap().len();

    let (status, body, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&source, &first, "equivalent"))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["verdict"], "equivalent");

    let (_, task, _) = call(&app, "GET", "/tasks/next?annotator=ana", None).await;
    let remaining: Vec<&str> = task["candidates"].as_array().unwrap().iter().map(|c| c["target_id"].as_str().unwrap()).collect();
    if before == 1 {
        assert_ne!(task["source"]["id"], source.as_str());
    } else {
        assert_eq!(task["source"]["id"], source.as_str());
        assert_eq!(remaining.len(), before - 1);
        assert!(!remaining.contains(&first.as_str()));
    }

    // Another annotator still sees the full set.
    let (_, other, _) = call(&app, "GET", "/tasks/next?annotator=bob", None).await;
    assert_eq!(other["candidates"].as_array().unwrap().len(), before);
}

#[tokio::test]
async fn queue_drains_to_no_content() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());
    let (_, counts, _) = call(&app, "GET", "/tasks?annotator=ana", None).await;
    assert_eq!(counts["pending"], 4);
    for _ in 0..20 {
        let (status, task, _) = call(&app, "GET", "/tasks/next?annotator=ana", None).await;
        if status == StatusCode::NO_CONTENT {
            break;
        }
        let s = task["source"]["id"].as_str().unwrap();
        for c in task["candidates"].as_array().unwrap() {
            let (st, _, _) = call(&app, "POST", "/verdicts", Some(verdict_body(s, c["target_id"].as_str().unwrap(), "none"))).await;
            assert_eq!(st, StatusCode::CREATED);
        }
    }
    let (status, _, _) = call(&app, "GET", "/tasks/next?annotator=ana", None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (_, counts, _) = call(&app, "GET", "/tasks?annotator=ana", None).await;
    assert_eq!(counts["pending"], 0);
    let (_, all, _) = call(&app, "GET", "/verdicts", None).await;
    assert_eq!(all.as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn bad_verdicts_rejected() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());
    let (s, t, _) = verdicts()[0].clone();

    let (status, body, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&s, &t, "maybe"))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["field"], "verdict");

    let mut missing = verdict_body(&s, &t, "none");
    missing.as_object_mut().unwrap().remove("annotator");
    let (status, body, _) = call(&app, "POST", "/verdicts", Some(missing)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["field"], "annotator");

    let (status, body, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&s, "kp-0000000000000000", "none"))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["field"], "target_id");

    let (status, _, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&s, &t, "none"))).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, _, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&s, &t, "equivalent"))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn link_validation_and_versions() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());

    let (status, sessions, _) = call(&app, "GET", "/sessions", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(sessions, json!([{ "id": "ckb-kmr", "version": 0 }]));
    let (_, session, _) = call(&app, "GET", "/sessions/ckb-kmr", None).await;
    assert_eq!(session["src_segments"].as_array().unwrap().len(), 10);
    assert_eq!(session["tgt_segments"].as_array().unwrap().len(), 10);

    let bad = json!({ "version": 0, "links": [{ "src": [0], "tgt": [0] }, { "src": [1], "tgt": [12] }] });
    let (status, body, _) = call(&app, "POST", "/sessions/ckb-kmr/links", Some(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!((body["link"].clone(), body["side"].clone(), body["index"].clone()), (json!(2), json!("target"), json!(12)));
    assert!(body["error"].as_str().unwrap().contains("12"));

    let ok = json!({ "version": 0, "links": [{ "src": [0], "tgt": [0] }] });
    let (status, body, _) = call(&app, "POST", "/sessions/ckb-kmr/links", Some(ok.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["version"], 1);

    let (status, body, _) = call(&app, "POST", "/sessions/ckb-kmr/links", Some(ok)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["version"], 1);

    let stale_op = json!({ "version": 0, "op": "merge", "side": "src", "index": 3 });
    let (status, _, _) = call(&app, "POST", "/sessions/ckb-kmr/segments", Some(stale_op)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let bad_op = json!({ "version": 1, "op": "merge", "side": "src", "index": 9 });
    let (status, body, _) = call(&app, "POST", "/sessions/ckb-kmr/segments", Some(bad_op)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    // Merging the last segment names the missing follower.
    assert_eq!((body["side"].clone(), body["index"].clone()), (json!("src"), json!(10)));

    let (status, _, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn restart_recovers_acknowledged_writes() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let (s, t, _) = verdicts()[1].clone();
    {
        let app = app(dir.path());
        call(&app, "POST", "/verdicts", Some(verdict_body(&s, &t, "equivalent"))).await;
        let links = json!({ "version": 0, "links": [{ "src": [2], "tgt": [2] }] });
        call(&app, "POST", "/sessions/ckb-kmr/links", Some(links)).await;
        let op = json!({ "version": 1, "op": "edit", "side": "tgt", "index": 2, "text": "Serok gihîşt Bexdayê." });
        let (status, _, _) = call(&app, "POST", "/sessions/ckb-kmr/segments", Some(op)).await;
        assert_eq!(status, StatusCode::OK);
    }
    let app = app(dir.path());
    let (_, all, _) = call(&app, "GET", "/verdicts", None).await;
    assert_eq!(all.as_array().unwrap().len(), 1);
    assert_eq!(all[0]["target_id"], t.as_str());
    let (_, session, _) = call(&app, "GET", "/sessions/ckb-kmr", None).await;
    assert_eq!(session["version"], 2);
    assert_eq!(session["links"], json!([{ "src": [2], "tgt": [2] }]));
    assert_eq!(session["tgt_segments"][2]["text"], "Serok gihîşt Bexdayê.");
    assert_eq!(session["tgt_segments"][2]["edited"], true);

    // Export compacts the log; a further restart still sees the same state.
    let (status, _, first) = call(&app, "GET", "/export", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(std::fs::read_to_string(dir.path().join("events.jsonl")).unwrap(), "");
    let app = self::app(dir.path());
    let (_, _, second) = call(&app, "GET", "/export", None).await;
    assert_eq!(first, second);
    let (status, _, _) = call(&app, "POST", "/verdicts", Some(verdict_body(&s, &t, "none"))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

/// Pushes the fixture link file through the API and compares the export
/// with the reference output of the file-based import.
#[tokio::test]
async fn api_export_matches_file_import() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());
    let links = parse_links(&std::fs::read_to_string(fixtures().join("links.tsv")).unwrap()).unwrap();
    let body = json!({ "version": 0, "links": links });
    let (status, _, _) = call(&app, "POST", "/sessions/ckb-kmr/links", Some(body)).await;
    assert_eq!(status, StatusCode::OK);

    let req = Request::builder().uri("/export").body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["x-rejected-links"], "1");
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let expected = std::fs::read(fixtures().join("expected_pairs.tsv")).unwrap();
    assert_eq!(bytes.to_vec(), expected);
}

/// Same pairs reached through segment operations instead of link-level
/// merges and edits.
#[tokio::test]
async fn segment_operations_match_file_import() {
    let dir = tempfile::tempdir().unwrap();
    data_dir(dir.path());
    let app = app(dir.path());
    let ops = [
        json!({ "op": "merge", "side": "src", "index": 3 }),
        json!({ "op": "merge", "side": "tgt", "index": 3 }),
        json!({ "op": "edit", "side": "tgt", "index": 5, "text": "Parlamana Kurdistanê îro civiya." }),
    ];
    for (v, op) in ops.into_iter().enumerate() {
        let mut op = op;
        op["version"] = json!(v);
        let (status, _, text) = call(&app, "POST", "/sessions/ckb-kmr/segments", Some(op)).await;
        assert_eq!(status, StatusCode::OK, "{text}");
    }
    let links: Vec<Value> = (0..9).map(|i| json!({ "src": [i], "tgt": [i] })).collect();
    let (status, _, _) = call(&app, "POST", "/sessions/ckb-kmr/links", Some(json!({ "version": 3, "links": links }))).await;
    assert_eq!(status, StatusCode::OK);
    let (_, _, tsv) = call(&app, "GET", "/export", None).await;
    assert_eq!(tsv, std::fs::read_to_string(fixtures().join("expected_pairs.tsv")).unwrap());
}
