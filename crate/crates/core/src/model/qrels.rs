use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::Grade;
use crate::error::{Error, Result};

/// Graded judgments for a single topic, keyed by document id.
pub type Judgments = BTreeMap<String, Grade>;

/// Relevance judgments: at most one grade per (topic, document).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qrels {
    topics: BTreeMap<String, Judgments>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a judgment, rejecting a second grade for the same pair.
    pub fn insert(&mut self, topic_id: &str, doc_id: &str, grade: Grade) -> Result<()> {
        let judgments = self.topics.entry(topic_id.to_string()).or_default();
        if judgments.contains_key(doc_id) {
            return Err(Error::validation(format!("({topic_id}, {doc_id}) judged twice")));
        }
        judgments.insert(doc_id.to_string(), grade);
        Ok(())
    }

    /// Adds or replaces a judgment.
    pub fn set(&mut self, topic_id: &str, doc_id: &str, grade: Grade) {
        self.topics
            .entry(topic_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), grade);
    }

    pub fn get(&self, topic_id: &str, doc_id: &str) -> Option<Grade> {
        self.topics.get(topic_id)?.get(doc_id).copied()
    }

    pub fn topic(&self, topic_id: &str) -> Option<&Judgments> {
        self.topics.get(topic_id)
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &str> {
        self.topics.keys().map(String::as_str)
    }

    pub fn topics(&self) -> impl Iterator<Item = (&str, &Judgments)> {
        self.topics.iter().map(|(t, j)| (t.as_str(), j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, Grade)> {
        self.topics
            .iter()
            .flat_map(|(t, j)| j.iter().map(move |(d, g)| (t.as_str(), d.as_str(), *g)))
    }

    pub fn len(&self) -> usize {
        self.topics.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of documents with grade >= 1 for a topic.
    pub fn relevant_count(&self, topic_id: &str) -> usize {
        self.topic(topic_id)
            .map(|j| j.values().filter(|g| g.is_relevant()).count())
            .unwrap_or(0)
    }

    /// Replaces a topic's judgments wholesale; an empty map removes the topic.
    pub fn set_topic(&mut self, topic_id: &str, judgments: Judgments) {
        if judgments.is_empty() {
            self.topics.remove(topic_id);
        } else {
            self.topics.insert(topic_id.to_string(), judgments);
        }
    }

    /// Collapses the graded scale to binary: grades 1 and 2 become 1, grades
    /// 0 and -1 become 0. The key set is unchanged.
    pub fn conflate_binary(&self) -> Qrels {
        let topics = self
            .topics
            .iter()
            .map(|(t, j)| (t.clone(), j.iter().map(|(d, g)| (d.clone(), g.conflated())).collect()))
            .collect();
        Qrels { topics }
    }
}

impl FromIterator<(String, String, Grade)> for Qrels {
    /// Later entries for the same pair replace earlier ones.
    fn from_iter<I: IntoIterator<Item = (String, String, Grade)>>(iter: I) -> Self {
        let mut q = Qrels::new();
        for (t, d, g) in iter {
            q.set(&t, &d, g);
        }
        q
    }
}

/// Parses `topic iteration doc grade` lines.
pub fn parse_qrels(text: &str) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [topic, _iter, doc, grade] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 4 fields, found {}", fields.len())));
        };
        let grade = grade
            .parse::<i64>()
            .ok()
            .and_then(Grade::from_value)
            .ok_or_else(|| Error::parse(lineno, format!("grade `{grade}` outside {{-1, 0, 1, 2}}")))?;
        qrels
            .insert(topic, doc, grade)
            .map_err(|_| Error::parse(lineno, format!("({topic}, {doc}) judged twice")))?;
    }
    Ok(qrels)
}

pub fn write_qrels(qrels: &Qrels) -> String {
    let mut out = String::new();
    for (t, d, g) in qrels.iter() {
        let _ = writeln!(out, "{t} 0 {d} {g}");
    }
    out
}
