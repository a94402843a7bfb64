use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use trelkit::model::{parse_manifest, parse_qrels, parse_run_with_warnings, parse_topics, Manifest, Qrels, RankedRun, Topic};
use trelkit::pooling::{noise_candidates, parse_pools, Pool, PoolingInput};

use crate::PoolingSources;

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn topics(path: &Path) -> Result<Vec<Topic>> {
    parse_topics(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn manifest(path: &Path) -> Result<Manifest> {
    parse_manifest(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn qrels(path: &Path) -> Result<Qrels> {
    parse_qrels(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn pools(path: &Path) -> Result<Vec<Pool>> {
    parse_pools(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn run(path: &Path) -> Result<RankedRun> {
    let (run, warnings) = parse_run_with_warnings(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    // The system id comes from the lines themselves, so an empty file has none.
    if run.system_id.is_empty() {
        bail!("{} holds no ranked documents", path.display());
    }
    Ok(run)
}

/// Files in the order given, directories expanded to their files sorted by
/// name.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            inner.retain(|f| f.is_file());
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Parses every run; system ids must be distinct.
pub fn runs(paths: &[PathBuf]) -> Result<Vec<RankedRun>> {
    let files = expand(paths)?;
    if files.is_empty() {
        bail!("no run files given");
    }
    let runs: Vec<RankedRun> = files.iter().map(|f| run(f)).collect::<Result<_>>()?;
    let mut seen = BTreeSet::new();
    for r in &runs {
        if !seen.insert(&r.system_id) {
            bail!("system {} appears in more than one run file", r.system_id);
        }
    }
    Ok(runs)
}

/// Everything pooling needs, loaded and cross-checked.
pub struct PoolingData {
    pub topics: Vec<Topic>,
    pub manifest: Manifest,
    pub runs: Vec<RankedRun>,
    pub google: RankedRun,
}

impl PoolingData {
    pub fn load(src: &PoolingSources) -> Result<Self> {
        Ok(PoolingData {
            topics: topics(&src.topics)?,
            manifest: manifest(&src.manifest)?,
            runs: runs(&src.runs)?,
            google: run(&src.google)?,
        })
    }

    /// One input per non-noise topic, in topic-file order.
    pub fn inputs(&self) -> Vec<PoolingInput<'_>> {
        let noise = noise_candidates(&self.topics, &self.manifest);
        self.topics
            .iter()
            .filter(|t| !t.is_noise)
            .map(|t| PoolingInput {
                topic_id: t.id.clone(),
                runs: &self.runs,
                google_top: self.google.doc_ids(&t.id).into_iter().map(String::from).collect(),
                noise_docs: noise.clone(),
            })
            .collect()
    }
}
