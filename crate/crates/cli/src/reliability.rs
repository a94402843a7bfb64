use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, ValueEnum};
use trelkit::measures::parse_measures;
use trelkit::reliability::{Denominator, ReliabilityConfig};
use trelkit::{increment_analysis, IncrementTable};

use crate::input::{self, PoolingData};
use crate::output::{csv, emit, fixed, fixed_or_na, json, write_file};
use crate::{Format, Global, PoolingSources};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DenominatorArg {
    Smaller,
    Larger,
}

#[derive(Debug, Args)]
pub struct ReliabilityArgs {
    #[command(flatten)]
    pub sources: PoolingSources,
    /// Judgments for the largest pool.
    #[arg(long)]
    pub qrels: PathBuf,
    /// Run files of the systems to score.
    #[arg(long = "systems", num_args = 1.., required = true)]
    pub systems: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub min: usize,
    #[arg(long, default_value_t = 100)]
    pub max: usize,
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    #[arg(long, default_value = "ndcg@100,ap@100,p@10,rr")]
    pub measures: String,
    /// Which of the two adjacent scores divides the change.
    #[arg(long, value_enum, default_value_t = DenominatorArg::Smaller)]
    pub denominator: DenominatorArg,
    #[arg(long)]
    pub binary_ndcg: bool,
    /// Also write every system's change per increment and measure here.
    #[arg(long)]
    pub long: Option<PathBuf>,
}

pub fn run(args: &ReliabilityArgs, g: &Global) -> Result<ExitCode> {
    let config = ReliabilityConfig {
        min_size: args.min,
        max_size: args.max,
        step: args.step,
        k_g: args.sources.k_g,
        k_n: args.sources.k_n,
        seed: g.require_seed()?,
        measures: parse_measures(&args.measures)?,
        denominator: match args.denominator {
            DenominatorArg::Smaller => Denominator::Smaller,
            DenominatorArg::Larger => Denominator::Larger,
        },
        binary_ndcg: args.binary_ndcg,
    };
    // fail on bad sizes before reading any input
    config.sizes()?;
    let data = PoolingData::load(&args.sources)?;
    let qrels = input::qrels(&args.qrels)?;
    let systems = input::runs(&args.systems)?;
    let table: IncrementTable = increment_analysis(&systems, &qrels, &data.inputs(), &config)?;

    eprintln!("{} pool sizes, {} increments, {} systems", table.sizes.len(), table.rows.len(), systems.len());
    for row in &table.rows {
        for cell in row.cells.iter().filter(|c| !c.excluded_systems.is_empty()) {
            eprintln!(
                "note: {}→{} {}: zero denominator for {}",
                row.from_size,
                row.to_size,
                cell.measure,
                cell.excluded_systems.join(", ")
            );
        }
    }

    let text = match g.format {
        Format::Json => json(&table),
        Format::Csv => wide(&table),
    };
    emit(g.out, &text)?;
    if let Some(path) = &args.long {
        let text = match g.format {
            Format::Json => json(&table.long),
            Format::Csv => long(&table),
        };
        write_file(path, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// One row per increment; mean and max percentage change per measure.
fn wide(table: &IncrementTable) -> String {
    let mut header: Vec<String> = ["increment", "from", "to"].map(String::from).to_vec();
    for m in &table.config.measures {
        header.push(format!("{m} mean%"));
        header.push(format!("{m} max%"));
    }
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![format!("{}→{}", r.from_size, r.to_size), r.from_size.to_string(), r.to_size.to_string()];
            for c in &r.cells {
                row.push(fixed_or_na(c.mean_pct));
                row.push(fixed_or_na(c.max_pct));
            }
            row
        })
        .collect();
    csv(&header, &rows)
}

fn long(table: &IncrementTable) -> String {
    let header: Vec<String> =
        ["from", "to", "measure", "system", "from_score", "to_score", "pct"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = table
        .long
        .iter()
        .map(|s| {
            vec![
                s.from_size.to_string(),
                s.to_size.to_string(),
                s.measure.to_string(),
                s.system_id.clone(),
                fixed(s.from_score),
                fixed(s.to_score),
                fixed_or_na(s.pct),
            ]
        })
        .collect();
    csv(&header, &rows)
}
