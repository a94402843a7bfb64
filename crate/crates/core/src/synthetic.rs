//! Planted-relevance test collections.
//!
//! Each topic gets its own crawl of documents, a fixed share of which are
//! relevant at grade 1 or 2. Simulated systems score documents as
//! `quality * grade + U(0, 2)`, so higher quality puts relevant documents
//! nearer the top. The full judgments are known, which lets pooled
//! (incomplete) judgments be compared against the truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{write_manifest, write_qrels, write_run, write_topics, Grade, Manifest, ManifestEntry, Qrels, RankedRun, Topic};
use crate::pooling::{noise_candidates, PoolingInput};

#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub topics: usize,
    pub noise_topics: usize,
    pub docs_per_topic: usize,
    pub relevant_per_topic: usize,
    pub pooling_systems: usize,
    pub scored_systems: usize,
    /// Documents returned per topic by every system.
    pub run_depth: usize,
    /// Length of the web-search result list per topic.
    pub google_depth: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            topics: 23,
            noise_topics: 2,
            docs_per_topic: 300,
            relevant_per_topic: 50,
            pooling_systems: 12,
            scored_systems: 15,
            run_depth: 100,
            google_depth: 20,
            seed: 2011,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCollection {
    pub topics: Vec<Topic>,
    pub manifest: Manifest,
    /// Generated HTML pages, keyed by document id.
    pub pages: BTreeMap<String, String>,
    pub pooling_runs: Vec<RankedRun>,
    pub google: RankedRun,
    pub systems: Vec<RankedRun>,
    /// Complete judgments for every document crawled for a real topic.
    pub qrels: Qrels,
}

impl SyntheticCollection {
    pub fn noise_docs(&self) -> Vec<String> {
        noise_candidates(&self.topics, &self.manifest)
    }

    /// Pooling inputs for every real topic.
    pub fn pooling_inputs(&self) -> Vec<PoolingInput<'_>> {
        let noise = self.noise_docs();
        self.topics
            .iter()
            .filter(|t| !t.is_noise)
            .map(|t| PoolingInput {
                topic_id: t.id.clone(),
                runs: &self.pooling_runs,
                google_top: self.google.doc_ids(&t.id).into_iter().map(String::from).collect(),
                noise_docs: noise.clone(),
            })
            .collect()
    }

    /// Writes the collection as files: `topics.xml`, `manifest.tsv`,
    /// `docs/`, `google.run`, `pooling/*.run`, `systems/*.run`, `qrels.txt`.
    pub fn write_to(&self, dir: &Path) -> Result<SyntheticPaths> {
        let paths = SyntheticPaths::under(dir);
        fs::create_dir_all(dir.join("docs"))?;
        fs::create_dir_all(dir.join("pooling"))?;
        fs::create_dir_all(dir.join("systems"))?;
        fs::write(&paths.topics, write_topics(&self.topics))?;
        fs::write(&paths.manifest, write_manifest(&self.manifest))?;
        for e in self.manifest.entries() {
            fs::write(dir.join(&e.path), &self.pages[&e.doc_id])?;
        }
        fs::write(&paths.google, write_run(&self.google))?;
        for run in &self.pooling_runs {
            let p = dir.join("pooling").join(format!("{}.run", run.system_id));
            fs::write(&p, write_run(run))?;
        }
        for run in &self.systems {
            let p = dir.join("systems").join(format!("{}.run", run.system_id));
            fs::write(&p, write_run(run))?;
        }
        fs::write(&paths.qrels, write_qrels(&self.qrels))?;
        Ok(SyntheticPaths {
            pooling_runs: self.pooling_runs.iter().map(|r| dir.join("pooling").join(format!("{}.run", r.system_id))).collect(),
            systems: self.systems.iter().map(|r| dir.join("systems").join(format!("{}.run", r.system_id))).collect(),
            ..paths
        })
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticPaths {
    pub root: PathBuf,
    pub topics: PathBuf,
    pub manifest: PathBuf,
    pub docs_root: PathBuf,
    pub google: PathBuf,
    pub qrels: PathBuf,
    pub pooling_runs: Vec<PathBuf>,
    pub systems: Vec<PathBuf>,
}

impl SyntheticPaths {
    fn under(dir: &Path) -> Self {
        SyntheticPaths {
            root: dir.to_path_buf(),
            topics: dir.join("topics.xml"),
            manifest: dir.join("manifest.tsv"),
            docs_root: dir.to_path_buf(),
            google: dir.join("google.run"),
            qrels: dir.join("qrels.txt"),
            pooling_runs: Vec::new(),
            systems: Vec::new(),
        }
    }
}

const WORDS: &[&str] = &[
    "crowd", "worker", "task", "quality", "gold", "unit", "payment", "label", "survey", "platform",
    "answer", "vote", "review", "market", "job", "requester", "fraud", "bonus", "time", "data",
];

pub fn generate(spec: &SyntheticSpec) -> SyntheticCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total_topics = spec.topics + spec.noise_topics;
    let topic_id = |i: usize| format!("2011-{:03}", i + 1);

    let mut topics = Vec::with_capacity(total_topics);
    let mut entries = Vec::new();
    let mut pages = BTreeMap::new();
    let mut qrels = Qrels::new();
    // topic -> (doc, grade)
    let mut universe: Vec<(String, Vec<(String, Grade)>)> = Vec::new();

    for i in 0..total_topics {
        let id = topic_id(i);
        let is_noise = i >= spec.topics;
        topics.push(if is_noise {
            Topic::noise(&id, format!("decoy subject {}", i + 1))
        } else {
            Topic {
                id: id.clone(),
                title: format!("synthetic information need {}", i + 1),
                levels: BTreeMap::from([
                    (2, "the document fully answers the need.".to_string()),
                    (1, "the document partially answers the need.".to_string()),
                    (0, "the document does not answer the need.".to_string()),
                ]),
                is_noise: false,
            }
        });

        let mut grades: Vec<Grade> = (0..spec.docs_per_topic)
            .map(|d| {
                if !is_noise && d < spec.relevant_per_topic {
                    if rng.gen_bool(0.6) {
                        Grade::Highly
                    } else {
                        Grade::Somewhat
                    }
                } else {
                    Grade::NotRelevant
                }
            })
            .collect();
        grades.shuffle(&mut rng);

        let mut docs = Vec::with_capacity(spec.docs_per_topic);
        for (d, grade) in grades.into_iter().enumerate() {
            let doc_id = format!("{id}-d{d:04}");
            let words = rng.gen_range(20..200);
            let mut page = String::from("<html><head><title>page</title></head><body><p>");
            for w in 0..words {
                if w > 0 {
                    page.push(' ');
                }
                page.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
            }
            page.push_str("</p></body></html>\n");
            pages.insert(doc_id.clone(), page);
            entries.push(ManifestEntry {
                doc_id: doc_id.clone(),
                path: PathBuf::from(format!("docs/{doc_id}.html")),
                source_topics: [id.clone()].into(),
            });
            if !is_noise {
                qrels.set(&id, &doc_id, grade);
            }
            docs.push((doc_id, grade));
        }
        universe.push((id, docs));
    }

    let real = &universe[..spec.topics];
    let simulate = |system_id: String, quality: f64, depth: usize, rng: &mut ChaCha8Rng| {
        let mut run = RankedRun::new(system_id);
        for (topic, docs) in real {
            let mut scored: Vec<(String, f64)> = docs
                .iter()
                .map(|(d, g)| (d.clone(), quality * g.level() as f64 + rng.gen_range(0.0..2.0)))
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1));
            scored.truncate(depth);
            run.set_scored(topic.clone(), scored).expect("unique documents");
        }
        run
    };

    let google = simulate("google".into(), 2.5, spec.google_depth, &mut rng);
    let pooling_runs = (0..spec.pooling_systems)
        .map(|i| {
            let q = rng.gen_range(0.3..0.9);
            simulate(format!("p{:04}", i + 1), q, spec.run_depth, &mut rng)
        })
        .collect();
    let systems = (0..spec.scored_systems)
        .map(|i| {
            let q = rng.gen_range(0.3..1.5);
            simulate(format!("{:02}.{}", i / 3 + 1, i % 3 + 1), q, spec.run_depth, &mut rng)
        })
        .collect();

    SyntheticCollection {
        topics,
        manifest: Manifest::from_entries(entries).expect("generated ids are unique"),
        pages,
        pooling_runs,
        google,
        systems,
        qrels,
    }
}

/// Renders a one-line summary, mostly for logs.
pub fn describe(c: &SyntheticCollection) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{} topics, {} documents, {} pooling runs, {} systems, {} judgments",
        c.topics.len(),
        c.manifest.len(),
        c.pooling_runs.len(),
        c.systems.len(),
        c.qrels.len()
    );
    s
}
