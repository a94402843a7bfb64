//! Size-k judging pools.
//!
//! A pool starts from a fixed base (the first `k_g` documents of the web
//! search results plus `k_n` documents sampled from the noise topics) and
//! grows one depth at a time, unioning every pooling system's top-`d`
//! documents, until it holds at least `k` distinct documents.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Manifest, RankedRun, Topic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Google,
    Noise,
    Pooled,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Google => "google",
            Provenance::Noise => "noise",
            Provenance::Pooled => "pooled",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "google" => Ok(Provenance::Google),
            "noise" => Ok(Provenance::Noise),
            "pooled" => Ok(Provenance::Pooled),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

/// A pool member. `first_depth` is set exactly for pooled documents: the
/// smallest rank at which any pooling system returned it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub doc_id: String,
    pub provenance: Provenance,
    pub first_depth: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Target pool size.
    pub k: usize,
    /// Leading web-search documents always included.
    pub k_g: usize,
    /// Noise documents always included.
    pub k_n: usize,
    pub seed: u64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            k: 100,
            k_g: 10,
            k_n: 10,
            seed: 0,
        }
    }
}

/// Everything needed to pool one topic.
#[derive(Clone, Debug)]
pub struct PoolingInput<'a> {
    pub topic_id: String,
    pub runs: &'a [RankedRun],
    /// Web-search results for the topic, best first.
    pub google_top: Vec<String>,
    /// Candidate noise documents; `k_n` of them are sampled.
    pub noise_docs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pool {
    pub topic_id: String,
    pub config: PoolConfig,
    /// Minimal per-system depth at which the pool reached `k` documents, or
    /// the longest list length when exhausted.
    pub depth: usize,
    pub entries: BTreeMap<String, PoolEntry>,
    /// Seeded shuffle of the entries, the order assessors see them in.
    pub presentation_order: Vec<String>,
    pub exhausted: bool,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.entries.contains_key(doc_id)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn with_provenance(&self, provenance: Provenance) -> impl Iterator<Item = &str> {
        self.entries
            .values()
            .filter(move |e| e.provenance == provenance)
            .map(|e| e.doc_id.as_str())
    }
}

/// Builds the size-k pool for one topic.
pub fn build_pool(input: &PoolingInput<'_>, config: &PoolConfig) -> Result<Pool> {
    let topic = input.topic_id.as_str();
    let lists: Vec<Vec<&str>> = input.runs.iter().map(|r| r.doc_ids(topic)).collect();
    if lists.iter().all(Vec::is_empty) {
        return Err(Error::validation(format!("no pooling run retrieved documents for topic {topic}")));
    }
    let google_all: HashSet<&str> = input.google_top.iter().map(String::as_str).collect();
    if let Some(d) = input.noise_docs.iter().find(|d| google_all.contains(d.as_str())) {
        return Err(Error::validation(format!(
            "topic {topic}: document {d} is both a web-search result and a noise document"
        )));
    }

    let mut entries: BTreeMap<String, PoolEntry> = BTreeMap::new();
    let add = |entries: &mut BTreeMap<String, PoolEntry>, doc: &str, provenance, first_depth| {
        if !entries.contains_key(doc) {
            entries.insert(
                doc.to_string(),
                PoolEntry {
                    doc_id: doc.to_string(),
                    provenance,
                    first_depth,
                },
            );
        }
    };

    for doc in dedup(&input.google_top).into_iter().take(config.k_g) {
        add(&mut entries, doc, Provenance::Google, None);
    }
    for doc in sample_noise(&input.noise_docs, config, topic) {
        add(&mut entries, doc, Provenance::Noise, None);
    }

    let max_len = lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut depth = 0;
    while entries.len() < config.k && depth < max_len {
        depth += 1;
        for list in &lists {
            if let Some(doc) = list.get(depth - 1) {
                add(&mut entries, doc, Provenance::Pooled, Some(depth));
            }
        }
    }
    let exhausted = entries.len() < config.k;

    let mut presentation_order: Vec<String> = entries.keys().cloned().collect();
    presentation_order.shuffle(&mut topic_rng(config.seed, topic, "presentation"));

    Ok(Pool {
        topic_id: topic.to_string(),
        config: *config,
        depth,
        entries,
        presentation_order,
        exhausted,
    })
}

/// Builds pools for many topics in parallel; output order follows `inputs`.
pub fn build_pools(inputs: &[PoolingInput<'_>], config: &PoolConfig) -> Result<Vec<Pool>> {
    inputs.par_iter().map(|input| build_pool(input, config)).collect()
}

fn dedup(docs: &[String]) -> Vec<&str> {
    let mut seen = HashSet::new();
    docs.iter()
        .map(String::as_str)
        .filter(|d| seen.insert(*d))
        .collect()
}

/// Uniform sample of `k_n` distinct noise documents, fixed by seed and topic.
fn sample_noise<'a>(noise_docs: &'a [String], config: &PoolConfig, topic: &str) -> Vec<&'a str> {
    let candidates = dedup(noise_docs);
    let mut rng = topic_rng(config.seed, topic, "noise");
    candidates
        .choose_multiple(&mut rng, config.k_n.min(candidates.len()))
        .copied()
        .collect()
}

fn topic_rng(seed: u64, topic: &str, purpose: &str) -> ChaCha8Rng {
    let digest: [u8; 32] = Sha256::new()
        .chain_update(seed.to_le_bytes())
        .chain_update(topic.as_bytes())
        .chain_update([0u8])
        .chain_update(purpose.as_bytes())
        .finalize()
        .into();
    ChaCha8Rng::from_seed(digest)
}

/// How many pools each document landed in.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// multiplicity -> number of documents appearing in exactly that many pools
    pub histogram: BTreeMap<usize, usize>,
    pub sum_of_pool_sizes: usize,
    pub unique_docs: usize,
}

impl OverlapReport {
    /// `sum_of_pool_sizes == unique_docs + Σ (m - 1) · count(m)`
    pub fn identity_holds(&self) -> bool {
        let extra: usize = self.histogram.iter().map(|(m, c)| (m - 1) * c).sum();
        self.sum_of_pool_sizes == self.unique_docs + extra
    }
}

pub fn overlap_report(pools: &[Pool]) -> OverlapReport {
    let mut multiplicity: BTreeMap<&str, usize> = BTreeMap::new();
    for pool in pools {
        for doc in pool.doc_ids() {
            *multiplicity.entry(doc).or_insert(0) += 1;
        }
    }
    let mut histogram = BTreeMap::new();
    for &m in multiplicity.values() {
        *histogram.entry(m).or_insert(0) += 1;
    }
    OverlapReport {
        histogram,
        sum_of_pool_sizes: pools.iter().map(Pool::len).sum(),
        unique_docs: multiplicity.len(),
    }
}

/// Documents downloaded only for noise topics, in manifest order. Every
/// real topic samples its noise documents from this one set.
pub fn noise_candidates(topics: &[Topic], manifest: &Manifest) -> Vec<String> {
    let noise: BTreeSet<&str> = topics.iter().filter(|t| t.is_noise).map(|t| t.id.as_str()).collect();
    manifest
        .entries()
        .iter()
        .filter(|e| !e.source_topics.is_empty() && e.source_topics.iter().all(|t| noise.contains(t.as_str())))
        .map(|e| e.doc_id.clone())
        .collect()
}

/// The biased collection: every document that entered some pool.
pub fn biased_collection(pools: &[Pool], manifest: &Manifest) -> Result<BTreeSet<String>> {
    let mut docs = BTreeSet::new();
    for pool in pools {
        for doc in pool.doc_ids() {
            if !manifest.contains(doc) {
                return Err(Error::DanglingReference {
                    topic_id: pool.topic_id.clone(),
                    doc_id: doc.to_string(),
                });
            }
            docs.insert(doc.to_string());
        }
    }
    Ok(docs)
}

/// Pool manifest: a `#` header line per pool followed by one
/// `topic<TAB>doc<TAB>provenance<TAB>first_depth|-` line per member, in
/// presentation order.
pub fn write_pools(pools: &[Pool]) -> String {
    let mut out = String::new();
    for p in pools {
        let c = &p.config;
        let _ = writeln!(
            out,
            "# topic={} k={} k_g={} k_n={} seed={} depth={} exhausted={}",
            p.topic_id, c.k, c.k_g, c.k_n, c.seed, p.depth, p.exhausted
        );
        for doc in &p.presentation_order {
            let e = &p.entries[doc];
            let depth = e.first_depth.map_or_else(|| "-".to_string(), |d| d.to_string());
            let _ = writeln!(out, "{}\t{}\t{}\t{}", p.topic_id, e.doc_id, e.provenance, depth);
        }
    }
    out
}

pub fn parse_pools(text: &str) -> Result<Vec<Pool>> {
    let mut pools: Vec<Pool> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            pools.push(parse_header(header).map_err(|m| Error::parse(lineno, m))?);
            continue;
        }
        let pool = pools
            .last_mut()
            .ok_or_else(|| Error::parse(lineno, "pool entry before any header"))?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [topic, doc, provenance, depth] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 4 tab-separated fields, found {}", fields.len())));
        };
        if topic != pool.topic_id {
            return Err(Error::parse(lineno, format!("entry for {topic} under header for {}", pool.topic_id)));
        }
        let provenance: Provenance = provenance.parse().map_err(|m: String| Error::parse(lineno, m))?;
        let first_depth = match depth {
            "-" => None,
            d => Some(d.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad depth `{d}`")))?),
        };
        if (provenance == Provenance::Pooled) != first_depth.is_some() {
            return Err(Error::parse(lineno, "first_depth must be present exactly for pooled documents"));
        }
        let entry = PoolEntry {
            doc_id: doc.to_string(),
            provenance,
            first_depth,
        };
        if pool.entries.insert(doc.to_string(), entry).is_some() {
            return Err(Error::parse(lineno, format!("document {doc} repeated in pool {topic}")));
        }
        pool.presentation_order.push(doc.to_string());
    }
    Ok(pools)
}

fn parse_header(header: &str) -> Result<Pool, String> {
    let mut kv = BTreeMap::new();
    for token in header.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| format!("malformed header token `{token}`"))?;
        kv.insert(k, v);
    }
    let get = |key: &str| kv.get(key).copied().ok_or_else(|| format!("header lacks `{key}`"));
    let num = |key: &str| -> Result<u64, String> {
        get(key)?.parse().map_err(|_| format!("header `{key}` is not a number"))
    };
    Ok(Pool {
        topic_id: get("topic")?.to_string(),
        config: PoolConfig {
            k: num("k")? as usize,
            k_g: num("k_g")? as usize,
            k_n: num("k_n")? as usize,
            seed: num("seed")?,
        },
        depth: num("depth")? as usize,
        entries: BTreeMap::new(),
        presentation_order: Vec::new(),
        exhausted: get("exhausted")?.parse().map_err(|_| "header `exhausted` is not a boolean".to_string())?,
    })
}
