//! Judgment quality control with noise documents.
//!
//! Noise documents come from decoy topics and should be judged nonrelevant
//! for every real topic. A high share of relevant grades on them points at
//! careless judging, although some noise documents do turn out to be
//! relevant; each flag lists the documents involved for manual review.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::model::{Grade, Qrels};
use crate::pooling::{Pool, Provenance};

pub const DEFAULT_FLAG_THRESHOLD: f64 = 0.5;

/// Noise documents by topic, as recorded in the pools.
pub fn noise_docs_by_topic(pools: &[Pool]) -> BTreeMap<String, BTreeSet<String>> {
    pools
        .iter()
        .map(|p| {
            let docs = p.with_provenance(Provenance::Noise).map(String::from).collect();
            (p.topic_id.clone(), docs)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditGroup {
    pub assessor_id: String,
    pub topic_id: String,
    pub judged: usize,
    pub counts: BTreeMap<i8, usize>,
    /// Share of judged noise documents graded 1 or 2.
    pub relevant_rate: f64,
    pub relevant_docs: Vec<String>,
    /// Noise documents in the pool this assessor did not judge.
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditFlag {
    pub assessor_id: String,
    pub topic_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub threshold: f64,
    pub total_noise_judgments: usize,
    /// grade value -> number of noise judgments with that grade
    pub counts: BTreeMap<i8, usize>,
    pub rates: BTreeMap<i8, f64>,
    pub groups: Vec<AuditGroup>,
    pub flags: Vec<AuditFlag>,
}

impl AuditReport {
    pub fn count(&self, grade: Grade) -> usize {
        self.counts.get(&grade.value()).copied().unwrap_or(0)
    }

    pub fn rate(&self, grade: Grade) -> f64 {
        self.rates.get(&grade.value()).copied().unwrap_or(0.0)
    }

    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

fn zero_counts() -> BTreeMap<i8, usize> {
    Grade::ALL.iter().map(|g| (g.value(), 0)).collect()
}

/// Counts the grades given to noise documents, per assessor and topic, and
/// flags every group whose relevant rate exceeds `threshold`. Unjudgeable
/// grades count toward totals but are never relevant.
pub fn noise_audit(
    judgments: &BTreeMap<String, Qrels>,
    noise_docs: &BTreeMap<String, BTreeSet<String>>,
    threshold: f64,
) -> AuditReport {
    let mut counts = zero_counts();
    let mut groups = Vec::new();
    let mut flags = Vec::new();

    for (assessor, qrels) in judgments {
        for (topic, judged) in qrels.topics() {
            let Some(noise) = noise_docs.get(topic) else {
                continue;
            };
            let mut group_counts = zero_counts();
            let mut relevant_docs = Vec::new();
            let mut missing = Vec::new();
            for doc in noise {
                match judged.get(doc) {
                    Some(g) => {
                        *group_counts.get_mut(&g.value()).expect("all grades present") += 1;
                        if g.is_relevant() {
                            relevant_docs.push(doc.clone());
                        }
                    }
                    None => missing.push(doc.clone()),
                }
            }
            let n: usize = group_counts.values().sum();
            for (g, c) in &group_counts {
                *counts.get_mut(g).expect("all grades present") += c;
            }
            let relevant_rate = if n == 0 { 0.0 } else { relevant_docs.len() as f64 / n as f64 };
            if relevant_rate > threshold {
                flags.push(AuditFlag {
                    assessor_id: assessor.clone(),
                    topic_id: topic.to_string(),
                    reason: format!(
                        "{} of {n} noise documents judged relevant ({:.1}% > {:.1}%)",
                        relevant_docs.len(),
                        relevant_rate * 100.0,
                        threshold * 100.0
                    ),
                });
            }
            groups.push(AuditGroup {
                assessor_id: assessor.clone(),
                topic_id: topic.to_string(),
                judged: n,
                counts: group_counts,
                relevant_rate,
                relevant_docs,
                missing,
            });
        }
    }

    let total: usize = counts.values().sum();
    let rates = counts
        .iter()
        .map(|(g, c)| (*g, if total == 0 { 0.0 } else { *c as f64 / total as f64 }))
        .collect();
    AuditReport {
        threshold,
        total_noise_judgments: total,
        counts,
        rates,
        groups,
        flags,
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "noise judgments: {}", self.total_noise_judgments)?;
        for g in Grade::ALL.iter().rev() {
            writeln!(f, "  grade {:>2}: {:>6}  {:>7.2}%", g.value(), self.count(*g), self.rate(*g) * 100.0)?;
        }
        for group in &self.groups {
            write!(
                f,
                "{}\t{}\t{} judged\t{:.2}% relevant",
                group.assessor_id,
                group.topic_id,
                group.judged,
                group.relevant_rate * 100.0
            )?;
            if !group.missing.is_empty() {
                write!(f, "\t{} unjudged", group.missing.len())?;
            }
            writeln!(f)?;
        }
        if self.flags.is_empty() {
            writeln!(f, "no flags")?;
        }
        for flag in &self.flags {
            writeln!(f, "FLAG {}\t{}\t{}", flag.assessor_id, flag.topic_id, flag.reason)?;
        }
        Ok(())
    }
}
