use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use serde::Serialize;
use trelkit::pooling::{biased_collection, build_pools, overlap_report, write_pools, OverlapReport, Pool, PoolConfig, Provenance};

use crate::input::PoolingData;
use crate::output::{csv, emit, fixed, json, write_file};
use crate::{Format, Global, PoolingSources};

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[command(flatten)]
    pub sources: PoolingSources,
    /// Minimum number of documents per pool.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
}

#[derive(Debug, Serialize)]
struct PoolSummary<'a> {
    topic_id: &'a str,
    depth: usize,
    size: usize,
    google: usize,
    noise: usize,
    pooled: usize,
    exhausted: bool,
}

fn summarize(pool: &Pool) -> PoolSummary<'_> {
    PoolSummary {
        topic_id: &pool.topic_id,
        depth: pool.depth,
        size: pool.len(),
        google: pool.with_provenance(Provenance::Google).count(),
        noise: pool.with_provenance(Provenance::Noise).count(),
        pooled: pool.with_provenance(Provenance::Pooled).count(),
        exhausted: pool.exhausted,
    }
}

#[derive(Debug, Serialize)]
struct OverlapOut<'a> {
    #[serde(flatten)]
    report: &'a OverlapReport,
    identity_holds: bool,
}

/// With `--out DIR` writes `pools.tsv`, `summary`, `overlap` and
/// `biased.txt` there; otherwise prints the pools to stdout.
pub fn run(args: &PoolArgs, g: &Global) -> Result<ExitCode> {
    let config = PoolConfig { k: args.k, k_g: args.sources.k_g, k_n: args.sources.k_n, seed: g.require_seed()? };
    let data = PoolingData::load(&args.sources)?;
    let inputs = data.inputs();
    let pools = build_pools(&inputs, &config)?;
    let overlap = overlap_report(&pools);
    let biased = biased_collection(&pools, &data.manifest)?;
    let summaries: Vec<PoolSummary> = pools.iter().map(summarize).collect();

    for p in pools.iter().filter(|p| p.exhausted) {
        eprintln!("warning: runs for {} ran out at {} documents (k = {})", p.topic_id, p.len(), args.k);
    }
    let n = pools.len().max(1) as f64;
    eprintln!(
        "{} pools, mean size {}, mean depth {}; {} pooled in total, {} unique",
        pools.len(),
        fixed(overlap.sum_of_pool_sizes as f64 / n),
        fixed(pools.iter().map(|p| p.depth).sum::<usize>() as f64 / n),
        overlap.sum_of_pool_sizes,
        overlap.unique_docs,
    );

    let Some(dir) = g.out else {
        emit(None, &write_pools(&pools))?;
        return Ok(ExitCode::SUCCESS);
    };
    write_file(&dir.join("pools.tsv"), &write_pools(&pools))?;
    write_file(&dir.join("biased.txt"), &biased.iter().map(|d| format!("{d}\n")).collect::<String>())?;
    let overlap_out = OverlapOut { report: &overlap, identity_holds: overlap.identity_holds() };
    match g.format {
        Format::Json => {
            write_file(&dir.join("summary.json"), &json(&summaries))?;
            write_file(&dir.join("overlap.json"), &json(&overlap_out))?;
        }
        Format::Csv => {
            let header: Vec<String> =
                ["topic", "depth", "size", "google", "noise", "pooled", "exhausted"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = summaries
                .iter()
                .map(|s| {
                    vec![
                        s.topic_id.to_string(),
                        s.depth.to_string(),
                        s.size.to_string(),
                        s.google.to_string(),
                        s.noise.to_string(),
                        s.pooled.to_string(),
                        s.exhausted.to_string(),
                    ]
                })
                .collect();
            write_file(&dir.join("summary.csv"), &csv(&header, &rows))?;
            let rows: Vec<Vec<String>> =
                overlap.histogram.iter().map(|(m, c)| vec![m.to_string(), c.to_string()]).collect();
            write_file(&dir.join("overlap.csv"), &csv(&["pools".into(), "documents".into()], &rows))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
