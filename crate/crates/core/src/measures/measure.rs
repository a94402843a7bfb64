use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An effectiveness measure with its cutoff, written `ndcg@100`, `ap@100`,
/// `p@10`, `rr`, `r@100` or `c@10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Measure {
    Ndcg(usize),
    AveragePrecision(usize),
    Precision(usize),
    ReciprocalRank,
    Recall(usize),
    Crawl(usize),
}

impl Measure {
    /// The measure set used to rank systems: NDCG@100 first, then AP@100,
    /// P@10 and RR.
    pub const STANDARD: [Measure; 4] = [
        Measure::Ndcg(100),
        Measure::AveragePrecision(100),
        Measure::Precision(10),
        Measure::ReciprocalRank,
    ];

    const VALID: &'static str = "ndcg@K, ap@K, p@K, rr, r@K, c@K with K >= 1";

    /// Whether the measure reads graded judgments. All others see the
    /// binary conflation.
    pub fn is_graded(self) -> bool {
        matches!(self, Measure::Ndcg(_))
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Ndcg(k) => write!(f, "ndcg@{k}"),
            Measure::AveragePrecision(k) => write!(f, "ap@{k}"),
            Measure::Precision(k) => write!(f, "p@{k}"),
            Measure::ReciprocalRank => write!(f, "rr"),
            Measure::Recall(k) => write!(f, "r@{k}"),
            Measure::Crawl(k) => write!(f, "c@{k}"),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || Error::UnknownMeasure {
            given: s.to_string(),
            valid: Measure::VALID.to_string(),
        };
        let lower = s.trim().to_ascii_lowercase();
        if lower == "rr" {
            return Ok(Measure::ReciprocalRank);
        }
        let (name, cutoff) = lower.split_once('@').ok_or_else(unknown)?;
        let k: usize = cutoff.parse().ok().filter(|k| *k >= 1).ok_or_else(unknown)?;
        match name {
            "ndcg" => Ok(Measure::Ndcg(k)),
            "ap" => Ok(Measure::AveragePrecision(k)),
            "p" => Ok(Measure::Precision(k)),
            "r" => Ok(Measure::Recall(k)),
            "c" => Ok(Measure::Crawl(k)),
            _ => Err(unknown()),
        }
    }
}

impl From<Measure> for String {
    fn from(m: Measure) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Measure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Parses a comma-separated measure list such as `ndcg@100,ap@100,p@10,rr`.
pub fn parse_measures(spec: &str) -> Result<Vec<Measure>, Error> {
    let measures: Vec<Measure> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    if measures.is_empty() {
        return Err(Error::UnknownMeasure { given: spec.to_string(), valid: Measure::VALID.to_string() });
    }
    Ok(measures)
}
