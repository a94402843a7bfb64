//! Pool-incompleteness analysis.
//!
//! Pools of growing size are built over the same inputs and seed, so each
//! is contained in the next. Every system is evaluated with the judgments
//! restricted to each pool, and the relative change in its mean score
//! between consecutive sizes measures how much the smaller pool's missing
//! judgments distorted it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{evaluate, EvalOptions, Measure};
use crate::model::{Qrels, RankedRun};
use crate::pooling::{build_pool, Pool, PoolConfig, PoolingInput};
use crate::scalar::Scalar;

/// Which pool's score divides the absolute change.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    #[default]
    Smaller,
    Larger,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityConfig {
    pub min_size: usize,
    pub max_size: usize,
    pub step: usize,
    pub k_g: usize,
    pub k_n: usize,
    pub seed: u64,
    pub measures: Vec<Measure>,
    pub denominator: Denominator,
    pub binary_ndcg: bool,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig {
            min_size: 20,
            max_size: 100,
            step: 5,
            k_g: 10,
            k_n: 10,
            seed: 0,
            measures: Measure::STANDARD.to_vec(),
            denominator: Denominator::Smaller,
            binary_ndcg: false,
        }
    }
}

impl ReliabilityConfig {
    pub fn sizes(&self) -> Result<Vec<usize>> {
        pool_sizes(self.min_size, self.max_size, self.step)
    }
}

/// `min, min + step, ..., max`. The step must divide the range exactly.
pub fn pool_sizes(min: usize, max: usize, step: usize) -> Result<Vec<usize>> {
    if step == 0 {
        return Err(Error::validation("pool size step must be positive"));
    }
    if min > max {
        return Err(Error::validation(format!("minimum pool size {min} exceeds maximum {max}")));
    }
    if !(max - min).is_multiple_of(step) {
        return Err(Error::validation(format!("step {step} does not divide the range {min}..{max}")));
    }
    Ok((min..=max).step_by(step).collect())
}

/// One pool per size for a topic, all sharing the seed so each is nested
/// in the next.
pub fn nested_pools(
    input: &PoolingInput<'_>,
    sizes: &[usize],
    k_g: usize,
    k_n: usize,
    seed: u64,
) -> Result<Vec<Pool>> {
    check_sizes(sizes, k_g, k_n)?;
    sizes
        .iter()
        .map(|&k| build_pool(input, &PoolConfig { k, k_g, k_n, seed }))
        .collect()
}

fn check_sizes(sizes: &[usize], k_g: usize, k_n: usize) -> Result<()> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("pool sizes must be strictly increasing"));
    }
    if let Some(&s) = sizes.first().filter(|&&s| s < k_g + k_n) {
        return Err(Error::validation(format!(
            "pool size {s} is below the base of {k_g} web-search + {k_n} noise documents"
        )));
    }
    Ok(())
}

/// Keeps only the judgments for documents in `pool`, for its topic.
pub fn restrict_qrels(qrels: &Qrels, pool: &Pool) -> Qrels {
    let mut out = Qrels::new();
    if let Some(judgments) = qrels.topic(&pool.topic_id) {
        let kept = judgments
            .iter()
            .filter(|(d, _)| pool.contains(d))
            .map(|(d, g)| (d.clone(), *g))
            .collect();
        out.set_topic(&pool.topic_id, kept);
    }
    out
}

/// Restriction of `qrels` to the union of per-topic pools.
pub fn restrict_qrels_to_pools(qrels: &Qrels, pools: &[Pool]) -> Qrels {
    let mut out = Qrels::new();
    for pool in pools {
        if let Some(judgments) = restrict_qrels(qrels, pool).topic(&pool.topic_id) {
            out.set_topic(&pool.topic_id, judgments.clone());
        }
    }
    out
}

/// Mean and maximum percentage change over systems for one measure. `None`
/// marks an undefined cell: every system had a zero denominator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementCell<F> {
    pub measure: Measure,
    pub mean_pct: Option<F>,
    pub max_pct: Option<F>,
    /// Systems left out because their denominator score was zero.
    pub excluded_systems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementRow<F> {
    pub from_size: usize,
    pub to_size: usize,
    /// One cell per configured measure, in configuration order.
    pub cells: Vec<IncrementCell<F>>,
}

impl<F: Scalar> IncrementRow<F> {
    pub fn cell(&self, measure: Measure) -> Option<&IncrementCell<F>> {
        self.cells.iter().find(|c| c.measure == measure)
    }
}

/// A single system's change between two pool sizes, for plotting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemIncrement<F> {
    pub from_size: usize,
    pub to_size: usize,
    pub measure: Measure,
    pub system_id: String,
    pub from_score: F,
    pub to_score: F,
    pub pct: Option<F>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementTable<F> {
    pub config: ReliabilityConfig,
    pub sizes: Vec<usize>,
    pub rows: Vec<IncrementRow<F>>,
    pub long: Vec<SystemIncrement<F>>,
}

/// Percentage change of `to` relative to `from` under `denominator`;
/// `None` when the denominator score is zero.
pub fn percent_change<F: Scalar>(from: F, to: F, denominator: Denominator) -> Option<F> {
    let base = match denominator {
        Denominator::Smaller => from,
        Denominator::Larger => to,
    };
    (base != F::zero()).then(|| (to - from).abs() / base * F::hundred())
}

/// Builds the nested pools for every topic, evaluates every system against
/// each restriction, and tabulates the increments between adjacent sizes.
pub fn increment_analysis<F: Scalar>(
    systems: &[RankedRun],
    qrels: &Qrels,
    inputs: &[PoolingInput<'_>],
    config: &ReliabilityConfig,
) -> Result<IncrementTable<F>> {
    if systems.is_empty() {
        return Err(Error::validation("increment analysis needs at least one system"));
    }
    let sizes = config.sizes()?;
    check_sizes(&sizes, config.k_g, config.k_n)?;

    let per_topic: Vec<Vec<Pool>> = inputs
        .par_iter()
        .map(|input| nested_pools(input, &sizes, config.k_g, config.k_n, config.seed))
        .collect::<Result<_>>()?;

    let options = EvalOptions {
        binary_ndcg: config.binary_ndcg,
        crawl: None,
    };
    // means[size][system][measure]
    let means: Vec<Vec<Vec<F>>> = (0..sizes.len())
        .into_par_iter()
        .map(|i| {
            let pools: Vec<Pool> = per_topic.iter().map(|p| p[i].clone()).collect();
            let restricted = restrict_qrels_to_pools(qrels, &pools);
            systems
                .iter()
                .map(|run| {
                    let r = evaluate::<F>(run, &restricted, &config.measures, &options)?;
                    Ok(r.measures.iter().map(|m| m.mean).collect())
                })
                .collect::<Result<Vec<Vec<F>>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut long = Vec::new();
    for (i, pair) in sizes.windows(2).enumerate() {
        let (from_size, to_size) = (pair[0], pair[1]);
        let mut cells = Vec::new();
        for (m, &measure) in config.measures.iter().enumerate() {
            let mut pcts = Vec::new();
            let mut excluded_systems = Vec::new();
            for (s, run) in systems.iter().enumerate() {
                let (from_score, to_score) = (means[i][s][m], means[i + 1][s][m]);
                let pct = percent_change(from_score, to_score, config.denominator);
                match pct {
                    Some(p) => pcts.push(p),
                    None => excluded_systems.push(run.system_id.clone()),
                }
                long.push(SystemIncrement {
                    from_size,
                    to_size,
                    measure,
                    system_id: run.system_id.clone(),
                    from_score,
                    to_score,
                    pct,
                });
            }
            let (mean_pct, max_pct) = if pcts.is_empty() {
                (None, None)
            } else {
                let mean = pcts.iter().copied().sum::<F>() / F::from_usize_lossy(pcts.len());
                let max = pcts.iter().copied().fold(F::zero(), F::max);
                (Some(mean), Some(max))
            };
            cells.push(IncrementCell {
                measure,
                mean_pct,
                max_pct,
                excluded_systems,
            });
        }
        rows.push(IncrementRow {
            from_size,
            to_size,
            cells,
        });
    }

    Ok(IncrementTable {
        config: config.clone(),
        sizes,
        rows,
        long,
    })
}
