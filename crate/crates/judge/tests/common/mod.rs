use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;
use trelkit::model::{write_manifest, write_topics, Manifest, ManifestEntry, RankedRun, Topic};
use trelkit::pooling::{build_pool, write_pools, Pool, PoolConfig, PoolingInput};
use trelkit_judge::{JudgeState, ServiceConfig};

pub const ALICE: &str = "tok-alice";
pub const BOB: &str = "tok-bob";

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub config_path: PathBuf,
    pub pools: Vec<Pool>,
}

impl Fixture {
    pub fn log_path(&self) -> PathBuf {
        self.dir.path().join("judgments.jsonl")
    }

    pub fn load(&self) -> Arc<JudgeState> {
        JudgeState::load(&ServiceConfig::load(&self.config_path).unwrap()).unwrap()
    }

    pub fn pool(&self, topic: &str) -> &Pool {
        self.pools.iter().find(|p| p.topic_id == topic).unwrap()
    }
}

fn page(i: usize) -> String {
    format!(
        r#"<html><head><title>t</title><link rel="stylesheet" href="s.css">
        <script>track({i})</script><style>body {{ color: yellow }}</style></head>
        <body bgcolor="black"><h1 style="color:red">Heading {i}</h1>
        <p onclick="x()">Body text number {i} about gold units.</p>
        <object data="f.swf"></object></body></html>"#
    )
}

/// Two judged topics and one decoy topic. Document ids are opaque so they
/// say nothing about where a document came from.
pub fn fixture() -> Fixture {
    fixture_with_ui(None)
}

pub fn fixture_with_ui(ui_dir: Option<&Path>) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    std::fs::create_dir_all(root.join("docs")).unwrap();

    let mut topics = Vec::new();
    for (n, title) in [(1, "gold units"), (2, "river floods")] {
        let mut t = Topic::noise(format!("2011-00{n}"), title);
        t.is_noise = false;
        for (g, d) in [(0, "nothing useful"), (1, "partly"), (2, "fully")] {
            t.levels.insert(g, d.to_string());
        }
        topics.push(t);
    }
    topics.push(Topic::noise("2011-003", "decoy subject"));

    // 0..11 topic 1 (0 undecodable), 12..19 topic 2, 20..29 decoy
    let source = |i: usize| match i {
        0..=11 => "2011-001",
        12..=19 => "2011-002",
        _ => "2011-003",
    };
    let mut entries = Vec::new();
    for i in 0..30 {
        let id = format!("x{:04}", (i * 7919) % 10007);
        let rel = PathBuf::from(format!("docs/{id}.html"));
        let mut bytes = page(i).into_bytes();
        if i == 0 {
            bytes.extend_from_slice(b"<p>caf\xe9</p>");
        }
        std::fs::write(root.join(&rel), bytes).unwrap();
        entries.push(ManifestEntry { doc_id: id, path: rel, source_topics: [source(i).to_string()].into() });
    }
    let manifest = Manifest::from_entries(entries.clone()).unwrap();
    let ids: Vec<String> = entries.iter().map(|e| e.doc_id.clone()).collect();
    let noise: Vec<String> = ids[20..].to_vec();

    let mut pools = Vec::new();
    for (topic, docs, k) in [("2011-001", &ids[0..12], 12), ("2011-002", &ids[12..20], 6)] {
        let mut a = RankedRun::new("p1");
        a.set_scored(topic, docs.iter().enumerate().map(|(r, d)| (d.clone(), 100.0 - r as f64))).unwrap();
        let mut b = RankedRun::new("p2");
        b.set_scored(topic, docs.iter().rev().enumerate().map(|(r, d)| (d.clone(), 100.0 - r as f64))).unwrap();
        let runs = [a, b];
        let input = PoolingInput {
            topic_id: topic.into(),
            runs: &runs,
            google_top: docs[docs.len() - 3..].to_vec(),
            noise_docs: noise.clone(),
        };
        pools.push(build_pool(&input, &PoolConfig { k, k_g: 2, k_n: 2, seed: 7 }).unwrap());
    }

    std::fs::write(root.join("topics.xml"), write_topics(&topics)).unwrap();
    std::fs::write(root.join("manifest.tsv"), write_manifest(&manifest)).unwrap();
    std::fs::write(root.join("pools.tsv"), write_pools(&pools)).unwrap();
    std::fs::write(
        root.join("assignments.toml"),
        format!(
            "[[assessor]]\nid = \"alice\"\ntoken = \"{ALICE}\"\ntopics = [\"2011-001\", \"2011-002\"]\n\n\
             [[assessor]]\nid = \"bob\"\ntoken = \"{BOB}\"\ntopics = [\"2011-002\"]\n"
        ),
    )
    .unwrap();
    let ui = ui_dir.map(|p| format!("ui_dir = {:?}\n", p.display().to_string())).unwrap_or_default();
    let config_path = root.join("judge.toml");
    std::fs::write(
        &config_path,
        format!(
            "port = 0\ndocs_root = \".\"\nmanifest = \"manifest.tsv\"\ntopics = \"topics.xml\"\n\
             pools = [\"pools.tsv\"]\nassignments = \"assignments.toml\"\nlog = \"judgments.jsonl\"\n{ui}"
        ),
    )
    .unwrap();
    Fixture { dir, config_path, pools }
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).unwrap()
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, token: Option<&str>, body: Option<serde_json::Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

pub async fn get(app: &Router, uri: &str, token: &str) -> Reply {
    call(app, Method::GET, uri, Some(token), None).await
}

pub async fn judge(app: &Router, token: &str, topic: &str, doc: &str, grade: i64) -> Reply {
    let body = serde_json::json!({ "topic_id": topic, "doc_id": doc, "grade": grade });
    call(app, Method::POST, "/api/judgments", Some(token), Some(body)).await
}
