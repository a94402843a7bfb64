use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use trelkit::measures::{evaluate, leaderboard_by, parse_measures, EvalOptions, Measure};
use trelkit::model::CrawlSource;
use trelkit::EvalResult;

use crate::input;
use crate::output::{csv, emit, fixed, json};
use crate::{Format, Global};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub qrels: PathBuf,
    /// Run files to score. Directories contribute every file inside them.
    #[arg(long = "runs", num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    /// Comma-separated: ndcg@K, ap@K, p@K, rr, r@K, c@K.
    #[arg(long, default_value = "ndcg@100,ap@100,p@10,rr")]
    pub measures: String,
    /// Score NDCG on the binary scale as well.
    #[arg(long)]
    pub binary_ndcg: bool,
    /// Crawl manifest, needed for c@K.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Primary and secondary sort keys: NDCG@100 and AP@100 when measured,
/// else the first two requested measures.
pub fn ranking_keys(measures: &[Measure]) -> (Measure, Measure) {
    let pick = |preferred: Measure, fallback: usize| {
        if measures.contains(&preferred) {
            preferred
        } else {
            measures[fallback.min(measures.len() - 1)]
        }
    };
    (pick(Measure::Ndcg(100), 0), pick(Measure::AveragePrecision(100), 1))
}

#[derive(Debug, Serialize)]
struct Standing<'a> {
    rank: usize,
    system_id: &'a str,
    mean: f64,
}

#[derive(Debug, Serialize)]
struct EvaluateOut<'a> {
    ranked_by: [Measure; 2],
    leaderboard: Vec<Standing<'a>>,
    results: Vec<&'a EvalResult>,
}

pub fn run(args: &EvaluateArgs, g: &Global) -> Result<ExitCode> {
    let measures = parse_measures(&args.measures)?;
    let qrels = input::qrels(&args.qrels)?;
    let runs = input::runs(&args.runs)?;
    let manifest = args.manifest.as_deref().map(input::manifest).transpose()?;
    let options = EvalOptions {
        binary_ndcg: args.binary_ndcg,
        crawl: manifest.as_ref().map(|m| m as &dyn CrawlSource),
    };
    let results: Vec<EvalResult> = runs
        .par_iter()
        .map(|r| evaluate::<f64>(r, &qrels, &measures, &options))
        .collect::<trelkit::Result<_>>()?;

    for r in &results {
        if !r.unjudged_topics.is_empty() {
            eprintln!("note: {} answered unjudged topics {}", r.system_id, r.unjudged_topics.join(", "));
        }
    }
    if let Some(first) = results.first() {
        for m in &first.measures {
            for e in &m.excluded {
                eprintln!("note: {} excluded from {}: {}", e.topic_id, m.measure, e.reason);
            }
        }
    }

    let (primary, secondary) = ranking_keys(&measures);
    let ordered = leaderboard_by(&results, primary, secondary);
    let text = match g.format {
        Format::Json => json(&EvaluateOut {
            ranked_by: [primary, secondary],
            leaderboard: ordered
                .iter()
                .enumerate()
                .map(|(i, r)| Standing { rank: i + 1, system_id: &r.system_id, mean: r.mean(primary).unwrap_or(f64::NAN) })
                .collect(),
            results: ordered.clone(),
        }),
        Format::Csv => table(&ordered),
    };
    emit(g.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

/// One row per system and measure, systems in leaderboard order, one column
/// per evaluated topic.
fn table(ordered: &[&EvalResult]) -> String {
    let topics: BTreeSet<&str> = ordered
        .iter()
        .flat_map(|r| r.measures.iter().flat_map(|m| m.scores.iter().map(|s| s.topic_id.as_str())))
        .collect();
    let mut header: Vec<String> = ["rank", "system", "measure", "mean", "stdev"].map(String::from).to_vec();
    header.extend(topics.iter().map(|t| t.to_string()));
    let mut rows = Vec::new();
    for (i, r) in ordered.iter().enumerate() {
        for m in &r.measures {
            let mut row = vec![(i + 1).to_string(), r.system_id.clone(), m.measure.to_string(), fixed(m.mean), fixed(m.stdev)];
            for t in &topics {
                row.push(m.scores.iter().find(|s| s.topic_id == *t).map(|s| fixed(s.value)).unwrap_or_default());
            }
            rows.push(row);
        }
    }
    csv(&header, &rows)
}
