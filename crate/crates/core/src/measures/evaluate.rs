use std::cmp::Ordering;

use serde::Serialize;

use super::*;
use crate::error::{Error, Result};
use crate::model::{Qrels, RankedRun};
use crate::scalar::mean_and_stdev;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicScore<F> {
    pub topic_id: String,
    pub measure: Measure,
    pub value: F,
}

/// A topic left out of a measure's mean, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub topic_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureResult<F> {
    pub measure: Measure,
    pub scores: Vec<TopicScore<F>>,
    pub mean: F,
    /// Sample standard deviation (n - 1) over the scored topics.
    pub stdev: F,
    pub excluded: Vec<Exclusion>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalResult<F> {
    pub system_id: String,
    pub measures: Vec<MeasureResult<F>>,
    /// Topics the run answered that have no judgments.
    pub unjudged_topics: Vec<String>,
}

impl<F: Scalar> EvalResult<F> {
    pub fn get(&self, measure: Measure) -> Option<&MeasureResult<F>> {
        self.measures.iter().find(|m| m.measure == measure)
    }

    pub fn mean(&self, measure: Measure) -> Option<F> {
        self.get(measure).map(|m| m.mean)
    }
}

#[derive(Clone, Copy, Default)]
pub struct EvalOptions<'a> {
    /// Score NDCG on the conflated binary scale too.
    pub binary_ndcg: bool,
    /// Crawl provenance, required for `c@k`.
    pub crawl: Option<&'a dyn CrawlSource>,
}

/// Scores one run on every judged topic. A judged topic the run did not
/// answer is scored as an empty ranking.
pub fn evaluate<F: Scalar>(
    run: &RankedRun,
    qrels: &Qrels,
    measures: &[Measure],
    options: &EvalOptions<'_>,
) -> Result<EvalResult<F>> {
    if options.crawl.is_none() {
        if let Some(m) = measures.iter().find(|m| matches!(m, Measure::Crawl(_))) {
            return Err(Error::validation(format!("{m} needs a document manifest")));
        }
    }
    let binary = qrels.conflate_binary();
    let unjudged_topics = run
        .topic_ids()
        .filter(|t| qrels.topic(t).is_none())
        .map(String::from)
        .collect();

    let measures = measures
        .iter()
        .map(|&measure| {
            let graded = measure.is_graded() && !options.binary_ndcg;
            let source = if graded { qrels } else { &binary };
            let mut scores = Vec::new();
            let mut excluded = Vec::new();
            for (topic_id, judgments) in source.topics() {
                let ranked = run.doc_ids(topic_id);
                let value: Option<F> = match measure {
                    Measure::Ndcg(k) => ndcg_at_k(&ranked, judgments, k),
                    Measure::AveragePrecision(k) => average_precision_at_k(&ranked, judgments, k),
                    Measure::Precision(k) => Some(precision_at_k(&ranked, judgments, k)),
                    Measure::ReciprocalRank => Some(reciprocal_rank(&ranked, judgments)),
                    Measure::Recall(k) => recall_at_k(&ranked, judgments, k),
                    Measure::Crawl(k) => {
                        let crawl = options.crawl.expect("checked above");
                        Some(crawl_ratio_at_k(&ranked, crawl, topic_id, k))
                    }
                };
                match value {
                    Some(value) => scores.push(TopicScore {
                        topic_id: topic_id.to_string(),
                        measure,
                        value,
                    }),
                    None => excluded.push(Exclusion {
                        topic_id: topic_id.to_string(),
                        reason: "no relevant documents judged".into(),
                    }),
                }
            }
            let values: Vec<F> = scores.iter().map(|s| s.value).collect();
            let (mean, stdev) = mean_and_stdev(&values);
            MeasureResult {
                measure,
                scores,
                mean,
                stdev,
                excluded,
            }
        })
        .collect();

    Ok(EvalResult {
        system_id: run.system_id.clone(),
        measures,
        unjudged_topics,
    })
}

/// Orders systems by mean NDCG@100, then mean AP@100, then system id.
pub fn leaderboard<F: Scalar>(results: &[EvalResult<F>]) -> Vec<&EvalResult<F>> {
    leaderboard_by(results, Measure::Ndcg(100), Measure::AveragePrecision(100))
}

/// Orders systems by descending `primary` mean, breaking ties on the
/// `secondary` mean and then the system id. Systems lacking a measure sort
/// after those that have it.
pub fn leaderboard_by<F: Scalar>(
    results: &[EvalResult<F>],
    primary: Measure,
    secondary: Measure,
) -> Vec<&EvalResult<F>> {
    let desc = |a: Option<F>, b: Option<F>| match (a, b) {
        (Some(a), Some(b)) => b.partial_cmp(&a).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    let mut ordered: Vec<&EvalResult<F>> = results.iter().collect();
    ordered.sort_by(|a, b| {
        desc(a.mean(primary), b.mean(primary))
            .then_with(|| desc(a.mean(secondary), b.mean(secondary)))
            .then_with(|| a.system_id.cmp(&b.system_id))
    });
    ordered
}
