use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use trelkit::synthetic::{describe, generate, SyntheticSpec};

use crate::Global;

/// Sizes of the generated collection. `--seed` picks the collection.
#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 23)]
    pub topics: usize,
    #[arg(long, default_value_t = 2)]
    pub noise_topics: usize,
    #[arg(long, default_value_t = 300)]
    pub docs_per_topic: usize,
    #[arg(long, default_value_t = 50)]
    pub relevant_per_topic: usize,
    #[arg(long, default_value_t = 12)]
    pub pooling_systems: usize,
    #[arg(long, default_value_t = 15)]
    pub scored_systems: usize,
}

pub fn run(args: &SynthArgs, g: &Global) -> Result<ExitCode> {
    let Some(dir) = g.out else {
        bail!("synth needs --out DIR");
    };
    let defaults = SyntheticSpec::default();
    let spec = SyntheticSpec {
        topics: args.topics,
        noise_topics: args.noise_topics,
        docs_per_topic: args.docs_per_topic,
        relevant_per_topic: args.relevant_per_topic,
        pooling_systems: args.pooling_systems,
        scored_systems: args.scored_systems,
        seed: g.seed.unwrap_or(defaults.seed),
        ..defaults
    };
    if spec.relevant_per_topic > spec.docs_per_topic {
        bail!("{} relevant documents per topic exceed the {} crawled", spec.relevant_per_topic, spec.docs_per_topic);
    }
    let collection = generate(&spec);
    collection.write_to(dir)?;
    eprintln!("{}", describe(&collection).trim_end());
    Ok(ExitCode::SUCCESS)
}
