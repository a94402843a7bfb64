use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Qrels;
use crate::error::{Error, Result};

/// A crawled document with its raw bytes and the topics it was crawled for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocRecord {
    pub doc_id: String,
    pub source_topics: BTreeSet<String>,
    pub content: Vec<u8>,
    pub url: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub path: PathBuf,
    pub source_topics: BTreeSet<String>,
}

/// Index of the complete collection: `doc_id<TAB>relative_path<TAB>topics`.
#[derive(Clone, Debug, Default)]
pub struct Manifest {
    entries: Vec<ManifestEntry>,
    by_id: HashMap<String, usize>,
}

/// A document id that some topic's pool or qrels refers to but the manifest
/// does not contain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DanglingRef {
    pub topic_id: String,
    pub doc_id: String,
}

/// Answers whether a document was crawled for a topic.
pub trait CrawlSource: Sync {
    fn crawled_for(&self, doc_id: &str, topic_id: &str) -> bool;
}

impl Manifest {
    pub fn from_entries(entries: impl IntoIterator<Item = ManifestEntry>) -> Result<Self> {
        let mut m = Manifest::default();
        for e in entries {
            m.push(e)?;
        }
        Ok(m)
    }

    fn push(&mut self, entry: ManifestEntry) -> Result<()> {
        if entry.source_topics.is_empty() {
            return Err(Error::validation(format!("document {} has no source topic", entry.doc_id)));
        }
        if self.by_id.contains_key(&entry.doc_id) {
            return Err(Error::validation(format!("document {} listed twice", entry.doc_id)));
        }
        self.by_id.insert(entry.doc_id.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, doc_id: &str) -> Option<&ManifestEntry> {
        self.by_id.get(doc_id).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.by_id.contains_key(doc_id)
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Documents crawled for `topic_id`, in manifest order.
    pub fn docs_for_topic<'a>(&'a self, topic_id: &'a str) -> impl Iterator<Item = &'a ManifestEntry> + 'a {
        self.entries.iter().filter(move |e| e.source_topics.contains(topic_id))
    }

    /// Reads every listed document relative to `root`.
    pub fn load_documents(&self, root: &Path) -> Result<Vec<DocRecord>> {
        self.entries
            .iter()
            .map(|e| {
                let content = fs::read(root.join(&e.path))?;
                Ok(DocRecord {
                    doc_id: e.doc_id.clone(),
                    source_topics: e.source_topics.clone(),
                    content,
                    url: None,
                })
            })
            .collect()
    }

    pub fn dangling_in_qrels(&self, qrels: &Qrels) -> Vec<DanglingRef> {
        qrels
            .iter()
            .filter(|(_, d, _)| !self.contains(d))
            .map(|(t, d, _)| DanglingRef {
                topic_id: t.to_string(),
                doc_id: d.to_string(),
            })
            .collect()
    }
}

impl CrawlSource for Manifest {
    fn crawled_for(&self, doc_id: &str, topic_id: &str) -> bool {
        self.get(doc_id).is_some_and(|e| e.source_topics.contains(topic_id))
    }
}

impl CrawlSource for HashMap<String, BTreeSet<String>> {
    fn crawled_for(&self, doc_id: &str, topic_id: &str) -> bool {
        self.get(doc_id).is_some_and(|t| t.contains(topic_id))
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut m = Manifest::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [doc_id, path, topics] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let source_topics: BTreeSet<String> = topics
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
        if doc_id.is_empty() || path.is_empty() {
            return Err(Error::parse(lineno, "empty document id or path"));
        }
        m.push(ManifestEntry {
            doc_id: doc_id.to_string(),
            path: PathBuf::from(path),
            source_topics,
        })
        .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(m)
}

pub fn write_manifest(m: &Manifest) -> String {
    let mut out = String::new();
    for e in &m.entries {
        let topics: Vec<&str> = e.source_topics.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{}\t{}\t{}", e.doc_id, e.path.display(), topics.join(","));
    }
    out
}
