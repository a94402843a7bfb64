use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedDoc {
    pub doc_id: String,
    pub score: f64,
}

/// One system's ranked results for every topic it answered. Ranks are
/// implicit: position `i` in a topic's list is rank `i + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedRun {
    pub system_id: String,
    topics: BTreeMap<String, Vec<RankedDoc>>,
}

impl RankedRun {
    pub fn new(system_id: impl Into<String>) -> Self {
        RankedRun {
            system_id: system_id.into(),
            topics: BTreeMap::new(),
        }
    }

    /// Stores a topic's list ordered by non-increasing score. Equal scores
    /// keep their input order.
    pub fn set_scored<I, D>(&mut self, topic_id: impl Into<String>, docs: I) -> Result<()>
    where
        I: IntoIterator<Item = (D, f64)>,
        D: Into<String>,
    {
        let mut docs: Vec<RankedDoc> = docs
            .into_iter()
            .map(|(d, score)| RankedDoc {
                doc_id: d.into(),
                score,
            })
            .collect();
        docs.sort_by(|a, b| b.score.total_cmp(&a.score));
        self.set_ranking(topic_id, docs)
    }

    /// Stores a topic's list in the given order.
    pub fn set_ranking(&mut self, topic_id: impl Into<String>, docs: Vec<RankedDoc>) -> Result<()> {
        let topic_id = topic_id.into();
        let mut seen = HashSet::with_capacity(docs.len());
        for d in &docs {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(Error::validation(format!(
                    "run {}: document {} appears twice for topic {topic_id}",
                    self.system_id, d.doc_id
                )));
            }
        }
        self.topics.insert(topic_id, docs);
        Ok(())
    }

    pub fn topic(&self, topic_id: &str) -> Option<&[RankedDoc]> {
        self.topics.get(topic_id).map(Vec::as_slice)
    }

    /// Ranked document ids for a topic; empty if the topic is absent.
    pub fn doc_ids(&self, topic_id: &str) -> Vec<&str> {
        self.topic(topic_id)
            .map(|docs| docs.iter().map(|d| d.doc_id.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &str> {
        self.topics.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RankedDoc])> {
        self.topics.iter().map(|(t, d)| (t.as_str(), d.as_slice()))
    }
}

/// Parses TREC-style run lines `topic Q0 doc rank score tag`.
pub fn parse_run(text: &str) -> Result<RankedRun> {
    parse_run_with_warnings(text).map(|(run, _)| run)
}

/// Like [`parse_run`], also returning non-fatal diagnostics: rank gaps,
/// repeated ranks, and scores that disagree with rank order.
pub fn parse_run_with_warnings(text: &str) -> Result<(RankedRun, Vec<String>)> {
    let mut tag: Option<String> = None;
    // topic -> (rank, input position, doc, score)
    let mut rows: BTreeMap<String, Vec<(u64, usize, String, f64)>> = BTreeMap::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [topic, _q0, doc, rank, score, system] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 6 fields, found {}", fields.len())));
        };
        let rank: u64 = rank
            .parse()
            .map_err(|_| Error::parse(lineno, format!("rank `{rank}` is not a non-negative integer")))?;
        let score: f64 = score
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::parse(lineno, format!("score `{score}` is not a finite number")))?;
        match &tag {
            None => tag = Some(system.to_string()),
            Some(t) if t != system => {
                return Err(Error::parse(lineno, format!("run tag `{system}` differs from `{t}`")));
            }
            Some(_) => {}
        }
        let list = rows.entry(topic.to_string()).or_default();
        if list.iter().any(|(_, _, d, _)| d == doc) {
            return Err(Error::parse(lineno, format!("document {doc} repeated for topic {topic}")));
        }
        list.push((rank, lineno, doc.to_string(), score));
    }

    let mut warnings = Vec::new();
    let mut run = RankedRun::new(tag.unwrap_or_default());
    for (topic, mut list) in rows {
        list.sort_by_key(|&(rank, pos, _, _)| (rank, pos));
        let contiguous = list.iter().enumerate().all(|(i, (rank, ..))| *rank == i as u64 + 1);
        if !contiguous {
            warnings.push(format!("topic {topic}: ranks are not 1..{}; reordered by given rank", list.len()));
        }
        if list.windows(2).any(|w| w[1].3 > w[0].3) {
            warnings.push(format!("topic {topic}: scores increase along rank order"));
        }
        let docs = list
            .into_iter()
            .map(|(_, _, doc_id, score)| RankedDoc { doc_id, score })
            .collect();
        run.set_ranking(topic, docs)?;
    }
    Ok((run, warnings))
}

pub fn write_run(run: &RankedRun) -> String {
    let mut out = String::new();
    for (topic, docs) in run.iter() {
        for (i, d) in docs.iter().enumerate() {
            let _ = writeln!(out, "{topic} Q0 {} {} {} {}", d.doc_id, i + 1, d.score, run.system_id);
        }
    }
    out
}
