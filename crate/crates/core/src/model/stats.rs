use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DocRecord;
use crate::html;

/// Mean and median of a per-document quantity. The median of an even-sized
/// sample is the lower of the two middle values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: u64,
}

impl Summary {
    pub fn of(values: &[u64]) -> Self {
        if values.is_empty() {
            return Summary::default();
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let mean = sorted.iter().map(|&v| v as f64).sum::<f64>() / sorted.len() as f64;
        Summary {
            mean,
            median: sorted[(sorted.len() - 1) / 2],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub doc_count: usize,
    pub total_bytes: u64,
    pub words: Summary,
    pub bytes: Summary,
    /// Number of documents crawled for each topic.
    pub downloads_per_topic: BTreeMap<String, usize>,
}

impl CollectionStats {
    pub fn mean_downloads_per_topic(&self) -> f64 {
        if self.downloads_per_topic.is_empty() {
            return 0.0;
        }
        self.downloads_per_topic.values().sum::<usize>() as f64 / self.downloads_per_topic.len() as f64
    }
}

/// Size and length statistics over a set of documents. Words are the
/// whitespace tokens of the page's visible text; undecodable bytes are
/// replaced before extraction.
pub fn collection_stats(docs: &[DocRecord]) -> CollectionStats {
    let bytes: Vec<u64> = docs.iter().map(|d| d.content.len() as u64).collect();
    let words: Vec<u64> = docs
        .iter()
        .map(|d| html::word_count(&String::from_utf8_lossy(&d.content)) as u64)
        .collect();
    let mut downloads_per_topic = BTreeMap::new();
    for d in docs {
        for t in &d.source_topics {
            *downloads_per_topic.entry(t.clone()).or_insert(0) += 1;
        }
    }
    CollectionStats {
        doc_count: docs.len(),
        total_bytes: bytes.iter().sum(),
        words: Summary::of(&words),
        bytes: Summary::of(&bytes),
        downloads_per_topic,
    }
}
