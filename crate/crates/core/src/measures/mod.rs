//! Rank-based effectiveness measures.
//!
//! Every function takes the ranked document ids of one topic (best first)
//! and that topic's judgments. Binary measures count a document as relevant
//! when its grade is at least 1; unjudged and unjudgeable documents are
//! nonrelevant. Measures that need at least one relevant document return
//! `None` when the topic has none, so callers can exclude the topic.

mod evaluate;
mod measure;

pub use evaluate::{evaluate, leaderboard, leaderboard_by, EvalOptions, EvalResult, Exclusion, MeasureResult, TopicScore};
pub use measure::{parse_measures, Measure};

use crate::model::{CrawlSource, Grade, Judgments};
use crate::scalar::Scalar;

fn grade_of(judgments: &Judgments, doc: &str) -> Grade {
    judgments.get(doc).copied().unwrap_or(Grade::NotRelevant)
}

fn is_relevant(judgments: &Judgments, doc: &str) -> bool {
    grade_of(judgments, doc).is_relevant()
}

fn relevant_total(judgments: &Judgments) -> usize {
    judgments.values().filter(|g| g.is_relevant()).count()
}

fn hits_at<S: AsRef<str>>(ranked: &[S], judgments: &Judgments, k: usize) -> usize {
    ranked
        .iter()
        .take(k)
        .filter(|d| is_relevant(judgments, d.as_ref()))
        .count()
}

/// Relevant documents in the top `k` divided by `k`. Missing ranks count as
/// nonrelevant.
pub fn precision_at_k<F: Scalar, S: AsRef<str>>(ranked: &[S], judgments: &Judgments, k: usize) -> F {
    assert!(k >= 1, "precision cutoff must be positive");
    F::from_usize_lossy(hits_at(ranked, judgments, k)) / F::from_usize_lossy(k)
}

/// Fraction of the topic's relevant documents found in the top `k`.
pub fn recall_at_k<F: Scalar, S: AsRef<str>>(ranked: &[S], judgments: &Judgments, k: usize) -> Option<F> {
    let total = relevant_total(judgments);
    (total > 0).then(|| F::from_usize_lossy(hits_at(ranked, judgments, k)) / F::from_usize_lossy(total))
}

/// Sum of precision at each relevant rank within the cutoff, divided by the
/// topic's total relevant count (not truncated at `k`).
pub fn average_precision_at_k<F: Scalar, S: AsRef<str>>(
    ranked: &[S],
    judgments: &Judgments,
    k: usize,
) -> Option<F> {
    let total = relevant_total(judgments);
    if total == 0 {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = F::zero();
    for (i, doc) in ranked.iter().take(k).enumerate() {
        if is_relevant(judgments, doc.as_ref()) {
            hits += 1;
            sum = sum + F::from_usize_lossy(hits) / F::from_usize_lossy(i + 1);
        }
    }
    Some(sum / F::from_usize_lossy(total))
}

/// `1 / rank` of the first relevant document over the whole list, or 0.
pub fn reciprocal_rank<F: Scalar, S: AsRef<str>>(ranked: &[S], judgments: &Judgments) -> F {
    ranked
        .iter()
        .position(|d| is_relevant(judgments, d.as_ref()))
        .map_or_else(F::zero, |i| F::one() / F::from_usize_lossy(i + 1))
}

fn gain<F: Scalar>(grade: Grade) -> F {
    F::from_u32(2u32.pow(grade.level()) - 1).expect("small integer")
}

fn discount<F: Scalar>(rank: usize) -> F {
    F::from_usize_lossy(rank + 1).log2()
}

/// Discounted cumulative gain at `k` with gains `2^g - 1` and discount
/// `log2(rank + 1)`.
pub fn dcg_at_k<F: Scalar, S: AsRef<str>>(ranked: &[S], judgments: &Judgments, k: usize) -> F {
    ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| gain::<F>(grade_of(judgments, d.as_ref())) / discount::<F>(i + 1))
        .fold(F::zero(), |a, b| a + b)
}

/// DCG of the best possible ranking of the judged documents.
pub fn ideal_dcg_at_k<F: Scalar>(judgments: &Judgments, k: usize) -> F {
    let mut grades: Vec<Grade> = judgments.values().copied().collect();
    grades.sort_unstable_by(|a, b| b.cmp(a));
    grades
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| gain::<F>(g) / discount::<F>(i + 1))
        .fold(F::zero(), |a, b| a + b)
}

/// DCG normalised by the ideal DCG; `None` when nothing is relevant.
pub fn ndcg_at_k<F: Scalar, S: AsRef<str>>(ranked: &[S], judgments: &Judgments, k: usize) -> Option<F> {
    let ideal = ideal_dcg_at_k::<F>(judgments, k);
    (ideal > F::zero()).then(|| dcg_at_k::<F, S>(ranked, judgments, k) / ideal)
}

/// Fraction of the top `min(k, n)` retrieved documents that were crawled for
/// `topic_id`; 0 for an empty list.
pub fn crawl_ratio_at_k<F: Scalar, S: AsRef<str>>(
    ranked: &[S],
    crawl: &(impl CrawlSource + ?Sized),
    topic_id: &str,
    k: usize,
) -> F {
    assert!(k >= 1, "crawl cutoff must be positive");
    let n = k.min(ranked.len());
    if n == 0 {
        return F::zero();
    }
    let crawled = ranked[..n]
        .iter()
        .filter(|d| crawl.crawled_for(d.as_ref(), topic_id))
        .count();
    F::from_usize_lossy(crawled) / F::from_usize_lossy(n)
}
