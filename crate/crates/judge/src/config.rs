//! Service configuration and assessor assignments, both TOML.
//!
//! ```toml
//! port = 8080
//! docs_root = "docs"
//! manifest = "manifest.tsv"
//! topics = "topics.xml"
//! pools = ["pools.tsv"]
//! assignments = "assignments.toml"
//! log = "judgments.jsonl"
//! ui_dir = "ui/dist"        # optional
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::{BTreeMap, BTreeSet};
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{JudgeError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_host")]
    pub host: IpAddr,
    #[serde(default = "default_port")]
    pub port: u16,
    pub docs_root: PathBuf,
    pub manifest: PathBuf,
    pub topics: PathBuf,
    #[serde(deserialize_with = "one_or_many")]
    pub pools: Vec<PathBuf>,
    pub assignments: PathBuf,
    pub log: PathBuf,
    #[serde(default)]
    pub ui_dir: Option<PathBuf>,
}

fn default_host() -> IpAddr {
    IpAddr::from([127, 0, 0, 1])
}

fn default_port() -> u16 {
    8080
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<PathBuf>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Paths {
        One(PathBuf),
        Many(Vec<PathBuf>),
    }
    Ok(match Paths::deserialize(d)? {
        Paths::One(p) => vec![p],
        Paths::Many(v) => v,
    })
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| JudgeError::config(path, e))?;
        let mut config: ServiceConfig = toml::from_str(&text).map_err(|e| JudgeError::config(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base);
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.docs_root);
        join(&mut self.manifest);
        join(&mut self.topics);
        self.pools.iter_mut().for_each(join);
        join(&mut self.assignments);
        join(&mut self.log);
        if let Some(ui) = self.ui_dir.as_mut() {
            join(ui);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assessor {
    pub id: String,
    /// Bearer token presented by this assessor's browser.
    pub token: String,
    pub topics: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignments {
    #[serde(default, rename = "assessor")]
    pub assessors: Vec<Assessor>,
}

impl Assignments {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| JudgeError::config(path, e))?;
        let a: Assignments = toml::from_str(&text).map_err(|e| JudgeError::config(path, e))?;
        a.check_unique().map_err(|m| JudgeError::config(path, m))?;
        Ok(a)
    }

    fn check_unique(&self) -> std::result::Result<(), String> {
        let mut ids = BTreeSet::new();
        let mut tokens = BTreeSet::new();
        for a in &self.assessors {
            if a.id.is_empty() || a.token.is_empty() {
                return Err("assessor id and token must be non-empty".into());
            }
            if !ids.insert(&a.id) {
                return Err(format!("assessor {} listed twice", a.id));
            }
            if !tokens.insert(&a.token) {
                return Err(format!("token of {} is shared with another assessor", a.id));
            }
        }
        Ok(())
    }

    /// Topics each assessor may judge.
    pub fn topics_by_assessor(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        self.assessors
            .iter()
            .map(|a| (a.id.as_str(), a.topics.iter().map(String::as_str).collect()))
            .collect()
    }

    /// Topics in `required` that nobody is assigned to.
    pub fn unassigned<'a>(&self, required: impl IntoIterator<Item = &'a str>) -> Vec<&'a str> {
        let assigned: BTreeSet<&str> = self.assessors.iter().flat_map(|a| a.topics.iter().map(String::as_str)).collect();
        required.into_iter().filter(|t| !assigned.contains(t)).collect()
    }
}
