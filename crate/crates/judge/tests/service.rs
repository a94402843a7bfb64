mod common;

use std::collections::BTreeMap;

use axum::http::{Method, StatusCode};
use common::*;
use trelkit::html::extract_text;
use trelkit::model::{Grade, Manifest};
use trelkit_judge::service::LOSSY_HEADER;
use trelkit_judge::{clean_document, export_qrels, read_log, router};

const PROVENANCE_MARKERS: &[&str] = &["provenance", "google", "noise", "pooled", "first_depth", "depth"];

fn assert_no_provenance(payload: &[u8]) {
    let text = String::from_utf8_lossy(payload).to_lowercase();
    for m in PROVENANCE_MARKERS {
        assert!(!text.contains(m), "payload mentions {m}: {text}");
    }
}

/// Independent replay: walk the raw log lines in order, keep the last
/// grade per key, print qrels lines sorted by topic then document.
fn replay_oracle(log: &std::path::Path, assessor: &str) -> String {
    let mut latest: BTreeMap<(String, String), i64> = BTreeMap::new();
    for line in std::fs::read_to_string(log).unwrap_or_default().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["assessor_id"] == assessor {
            let key = (v["topic_id"].as_str().unwrap().to_string(), v["doc_id"].as_str().unwrap().to_string());
            latest.insert(key, v["grade"].as_i64().unwrap());
        }
    }
    latest.iter().map(|((t, d), g)| format!("{t} 0 {d} {g}\n")).collect()
}

#[tokio::test]
async fn topics_list_assignment_and_progress() {
    let fx = fixture();
    let app = router(fx.load());
    let r = get(&app, "/api/topics", ALICE).await;
    assert_eq!(r.status, StatusCode::OK);
    let topics = r.json();
    let ids: Vec<&str> = topics.as_array().unwrap().iter().map(|t| t["topic_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["2011-001", "2011-002"]);
    assert_eq!(topics[0]["title"], "gold units");
    assert_eq!(topics[0]["levels"]["2"], "fully");
    assert_eq!(topics[0]["judged"], 0);
    assert_eq!(topics[0]["total"], fx.pool("2011-001").len());

    let bob = get(&app, "/api/topics", BOB).await.json();
    assert_eq!(bob.as_array().unwrap().len(), 1);
    assert_eq!(bob[0]["topic_id"], "2011-002");
}

#[tokio::test]
async fn judging_whole_pool_reaches_full_progress() {
    let fx = fixture();
    let app = router(fx.load());
    let pool = fx.pool("2011-002");
    for (i, d) in pool.presentation_order.iter().enumerate() {
        assert_eq!(judge(&app, BOB, "2011-002", d, (i % 3) as i64).await.status, StatusCode::OK);
    }
    let t = get(&app, "/api/topics", BOB).await.json();
    assert_eq!(t[0]["judged"], t[0]["total"]);
    let view = get(&app, "/api/pools/2011-002", BOB).await.json();
    assert_eq!(view["judged"], pool.len());
    // progress is per assessor
    let alice = get(&app, "/api/pools/2011-002", ALICE).await.json();
    assert_eq!(alice["judged"], 0);
}

#[tokio::test]
async fn pool_order_is_stored_shuffle_and_stable() {
    let fx = fixture();
    let order = |v: serde_json::Value| -> Vec<String> {
        v["docs"].as_array().unwrap().iter().map(|d| d["doc_id"].as_str().unwrap().to_string()).collect()
    };
    let first = order(get(&router(fx.load()), "/api/pools/2011-001", ALICE).await.json());
    assert_eq!(first, fx.pool("2011-001").presentation_order);
    let again = order(get(&router(fx.load()), "/api/pools/2011-001", ALICE).await.json());
    assert_eq!(first, again);
}

#[tokio::test]
async fn rejudging_keeps_latest_grade() {
    let fx = fixture();
    let app = router(fx.load());
    let doc = &fx.pool("2011-001").presentation_order[0];
    judge(&app, ALICE, "2011-001", doc, 0).await;
    let ack = judge(&app, ALICE, "2011-001", doc, 2).await.json();
    assert_eq!(ack["grade"], 2);
    assert_eq!(ack["assessor_id"], "alice");
    assert!(ack["timestamp"].as_str().unwrap().ends_with('Z'));
    let export = get(&app, "/api/export/qrels", ALICE).await.text();
    assert_eq!(export, format!("2011-001 0 {doc} 2\n"));
    let view = get(&app, "/api/pools/2011-001", ALICE).await.json();
    assert_eq!(view["docs"][0]["grade"], 2);
    assert!(view["docs"][1]["grade"].is_null());
}

#[tokio::test]
async fn export_matches_log_replay() {
    let fx = fixture();
    let app = router(fx.load());
    let order = &fx.pool("2011-001").presentation_order;
    for (d, g) in [(0, 1), (1, -1), (2, 2), (0, 0)] {
        judge(&app, ALICE, "2011-001", &order[d], g).await;
    }
    let export = get(&app, "/api/export/qrels", ALICE).await.text();
    assert_eq!(export.lines().count(), 3);
    assert_eq!(export, replay_oracle(&fx.log_path(), "alice"));
    assert_eq!(get(&app, "/api/export/qrels", BOB).await.text(), "");
}

#[tokio::test]
async fn two_assessors_one_topic_export_separately() {
    let fx = fixture();
    let app = router(fx.load());
    let doc = &fx.pool("2011-002").presentation_order[0];
    judge(&app, ALICE, "2011-002", doc, 2).await;
    judge(&app, BOB, "2011-002", doc, 0).await;
    let per = export_qrels(&read_log(&fx.log_path()).unwrap());
    assert_eq!(per.len(), 2);
    assert_eq!(per["alice"].get("2011-002", doc), Some(Grade::Highly));
    assert_eq!(per["bob"].get("2011-002", doc), Some(Grade::NotRelevant));
}

#[tokio::test]
async fn errors_map_to_statuses() {
    let fx = fixture();
    let app = router(fx.load());
    // noise documents can sit in both pools, so take one only topic 1 has
    let in_pool = fx.pool("2011-001").doc_ids().find(|d| !fx.pool("2011-002").contains(d)).unwrap().to_string();
    let t2_doc = fx.pool("2011-002").presentation_order[0].clone();
    let manifest: Manifest = trelkit::model::parse_manifest(&std::fs::read_to_string(fx.dir.path().join("manifest.tsv")).unwrap()).unwrap();
    let outside = manifest
        .entries()
        .iter()
        .map(|e| e.doc_id.clone())
        .find(|d| !fx.pool("2011-001").contains(d))
        .unwrap();

    assert_eq!(call(&app, Method::GET, "/api/topics", None, None).await.status, StatusCode::UNAUTHORIZED);
    assert_eq!(get(&app, "/api/topics", "nope").await.status, StatusCode::UNAUTHORIZED);
    assert_eq!(judge(&app, ALICE, "2011-999", &in_pool, 1).await.status, StatusCode::NOT_FOUND);
    assert_eq!(judge(&app, ALICE, "2011-001", "no-such-doc", 1).await.status, StatusCode::NOT_FOUND);
    let bad = judge(&app, ALICE, "2011-001", &in_pool, 3).await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(bad.json()["error"].as_str().unwrap().contains("-1, 0, 1, 2"));
    assert_eq!(judge(&app, ALICE, "2011-001", &in_pool, -2).await.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(judge(&app, ALICE, "2011-001", &outside, 1).await.status, StatusCode::FORBIDDEN);
    assert_eq!(judge(&app, BOB, "2011-001", &in_pool, 1).await.status, StatusCode::FORBIDDEN);
    assert_eq!(get(&app, "/api/pools/2011-001", BOB).await.status, StatusCode::FORBIDDEN);
    assert_eq!(get(&app, "/api/pools/2011-003", ALICE).await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, &format!("/api/docs/{in_pool}/clean"), BOB).await.status, StatusCode::FORBIDDEN);
    assert_eq!(get(&app, &format!("/api/docs/{t2_doc}/clean"), BOB).await.status, StatusCode::OK);
    assert_eq!(get(&app, "/api/docs/no-such-doc/clean", ALICE).await.status, StatusCode::NOT_FOUND);
    // nothing rejected reached the log
    assert_eq!(read_log(&fx.log_path()).unwrap().len(), 0);
}

#[tokio::test]
async fn no_payload_carries_provenance() {
    let fx = fixture();
    let app = router(fx.load());
    assert_no_provenance(&get(&app, "/api/topics", ALICE).await.body);
    for pool in &fx.pools {
        assert!(pool.with_provenance(trelkit::pooling::Provenance::Noise).count() > 0);
        let listing = get(&app, &format!("/api/pools/{}", pool.topic_id), ALICE).await;
        assert_no_provenance(&listing.body);
        for d in &pool.presentation_order {
            let doc = get(&app, &format!("/api/docs/{d}/clean"), ALICE).await;
            assert_eq!(doc.status, StatusCode::OK);
            assert_no_provenance(&doc.body);
            assert_no_provenance(format!("{:?}", doc.headers).as_bytes());
            let ack = judge(&app, ALICE, &pool.topic_id, d, 1).await;
            assert_no_provenance(&ack.body);
        }
    }
    assert_no_provenance(&get(&app, "/api/pools/2011-001", ALICE).await.body);
}

#[tokio::test]
async fn served_documents_are_clean_and_faithful() {
    let fx = fixture();
    let app = router(fx.load());
    let manifest = trelkit::model::parse_manifest(&std::fs::read_to_string(fx.dir.path().join("manifest.tsv")).unwrap()).unwrap();
    let mut lossy_seen = 0;
    for d in &fx.pool("2011-001").presentation_order {
        let r = get(&app, &format!("/api/docs/{d}/clean"), ALICE).await;
        assert!(r.headers["content-type"].to_str().unwrap().starts_with("text/html"));
        let body = r.text();
        for tag in ["<script", "<style", "<object", "<link", "style=", "onclick", "bgcolor"] {
            assert!(!body.contains(tag), "{tag} in {body}");
        }
        let raw = std::fs::read(fx.dir.path().join(&manifest.get(d).unwrap().path)).unwrap();
        let direct = clean_document(&raw);
        let words = |s: &str| extract_text(s).split_whitespace().map(str::to_string).collect::<Vec<_>>();
        assert_eq!(words(&body), words(&direct.html));
        assert_eq!(words(&body), words(&String::from_utf8_lossy(&raw)));
        if direct.lossy {
            lossy_seen += 1;
            assert_eq!(r.headers[LOSSY_HEADER], "true");
            assert!(body.contains('\u{fffd}'));
        } else {
            assert!(r.headers.get(LOSSY_HEADER).is_none());
        }
    }
    assert_eq!(lossy_seen, 1);
}

#[tokio::test]
async fn grades_survive_restart() {
    let fx = fixture();
    let doc = fx.pool("2011-001").presentation_order[3].clone();
    {
        let app = router(fx.load());
        judge(&app, ALICE, "2011-001", &doc, 1).await;
    }
    let app = router(fx.load());
    let view = get(&app, "/api/pools/2011-001", ALICE).await.json();
    assert_eq!(view["docs"][3]["grade"], 1);
    assert_eq!(view["judged"], 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_writes_form_one_total_order() {
    let fx = fixture();
    let app = router(fx.load());
    let order = fx.pool("2011-001").presentation_order.clone();
    let mut tasks = Vec::new();
    for i in 0..60 {
        let app = app.clone();
        let doc = order[i % order.len()].clone();
        tasks.push(tokio::spawn(async move { judge(&app, ALICE, "2011-001", &doc, (i % 4) as i64 - 1).await.status }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let log = read_log(&fx.log_path()).unwrap();
    assert_eq!(log.len(), 60);
    assert!(log.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    let export = get(&app, "/api/export/qrels", ALICE).await.text();
    assert_eq!(export, replay_oracle(&fx.log_path(), "alice"));
    assert_eq!(export.lines().count(), order.len().min(60));
}

#[tokio::test]
async fn static_bundle_served_outside_api() {
    let ui = tempfile::tempdir().unwrap();
    std::fs::write(ui.path().join("index.html"), "<html>judge ui</html>").unwrap();
    std::fs::write(ui.path().join("app.js"), "console.log(1)").unwrap();
    let fx = fixture_with_ui(Some(ui.path()));
    let app = router(fx.load());
    let index = call(&app, Method::GET, "/", None, None).await;
    assert_eq!(index.status, StatusCode::OK);
    assert!(index.text().contains("judge ui"));
    let js = call(&app, Method::GET, "/app.js", None, None).await;
    assert_eq!(js.status, StatusCode::OK);
    // the API still wants a token
    assert_eq!(call(&app, Method::GET, "/api/topics", None, None).await.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn real_socket_round_trip() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let fx = fixture();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(trelkit_judge::serve(listener, fx.load()));
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    let req = format!("GET /api/topics HTTP/1.1\r\nHost: {addr}\r\nAuthorization: Bearer {ALICE}\r\nConnection: close\r\n\r\n");
    stream.write_all(req.as_bytes()).await.unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).await.unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("gold units"));
}

#[test]
fn load_rejects_unassigned_topic() {
    let fx = fixture();
    std::fs::write(
        fx.dir.path().join("assignments.toml"),
        format!("[[assessor]]\nid = \"alice\"\ntoken = \"{ALICE}\"\ntopics = [\"2011-001\"]\n"),
    )
    .unwrap();
    let config = trelkit_judge::ServiceConfig::load(&fx.config_path).unwrap();
    let err = trelkit_judge::JudgeState::load(&config).err().unwrap().to_string();
    assert!(err.contains("2011-002"), "{err}");
}
