use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use serde::Serialize;
use trelkit::model::{collection_stats, CollectionStats};
use trelkit::pooling::biased_collection;

use crate::input;
use crate::output::{csv, emit, fixed, json};
use crate::{Format, Global};

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory the manifest paths are relative to. Defaults to the
    /// manifest's own directory.
    #[arg(long)]
    pub docs_root: Option<PathBuf>,
    /// Pool file; adds a row for the documents that entered some pool.
    #[arg(long)]
    pub pools: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row<'a> {
    set: &'a str,
    #[serde(flatten)]
    stats: CollectionStats,
    mean_downloads_per_topic: f64,
}

pub fn run(args: &StatsArgs, g: &Global) -> Result<ExitCode> {
    let manifest = input::manifest(&args.manifest)?;
    let root = args
        .docs_root
        .clone()
        .unwrap_or_else(|| args.manifest.parent().map(PathBuf::from).unwrap_or_default());
    let docs = manifest.load_documents(&root)?;
    let mut rows = vec![Row { set: "collection", stats: collection_stats(&docs), mean_downloads_per_topic: 0.0 }];
    if let Some(p) = &args.pools {
        let biased = biased_collection(&input::pools(p)?, &manifest)?;
        let subset: Vec<_> = docs.iter().filter(|d| biased.contains(&d.doc_id)).cloned().collect();
        rows.push(Row { set: "biased", stats: collection_stats(&subset), mean_downloads_per_topic: 0.0 });
    }
    for r in &mut rows {
        r.mean_downloads_per_topic = r.stats.mean_downloads_per_topic();
    }

    let text = match g.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let header: Vec<String> = [
                "set",
                "documents",
                "total_bytes",
                "mean_words",
                "median_words",
                "mean_bytes",
                "median_bytes",
                "topics",
                "mean_downloads_per_topic",
            ]
            .map(String::from)
            .to_vec();
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.set.to_string(),
                        r.stats.doc_count.to_string(),
                        r.stats.total_bytes.to_string(),
                        fixed(r.stats.words.mean),
                        r.stats.words.median.to_string(),
                        fixed(r.stats.bytes.mean),
                        r.stats.bytes.median.to_string(),
                        r.stats.downloads_per_topic.len().to_string(),
                        fixed(r.mean_downloads_per_topic),
                    ]
                })
                .collect();
            csv(&header, &table)
        }
    };
    emit(g.out, &text)?;
    Ok(ExitCode::SUCCESS)
}
