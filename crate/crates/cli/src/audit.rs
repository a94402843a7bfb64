use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use trelkit::audit::{noise_docs_by_topic, DEFAULT_FLAG_THRESHOLD};
use trelkit::model::{Grade, Qrels};
use trelkit::noise_audit;
use trelkit_judge::{export_qrels, read_log};

use crate::input;
use crate::output::{csv, emit, fixed, json};
use crate::{Format, Global};

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Pool file; its noise members are the documents audited.
    #[arg(long)]
    pub pools: PathBuf,
    /// Judgment log written by the judging service.
    #[arg(long, conflicts_with = "qrels")]
    pub log: Option<PathBuf>,
    /// Qrels of one assessor, as ASSESSOR=PATH. Repeatable.
    #[arg(long, value_parser = parse_assessor_qrels)]
    pub qrels: Vec<(String, PathBuf)>,
    /// Relevant rate above which an assessor's topic is flagged.
    #[arg(long, default_value_t = DEFAULT_FLAG_THRESHOLD)]
    pub threshold: f64,
}

fn parse_assessor_qrels(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((a, p)) if !a.is_empty() && !p.is_empty() => Ok((a.to_string(), PathBuf::from(p))),
        _ => Err(format!("expected ASSESSOR=PATH, got `{s}`")),
    }
}

pub fn run(args: &AuditArgs, g: &Global) -> Result<ExitCode> {
    if !(0.0..=1.0).contains(&args.threshold) {
        bail!("threshold {} is outside [0, 1]", args.threshold);
    }
    let pools = input::pools(&args.pools)?;
    let judgments: BTreeMap<String, Qrels> = match &args.log {
        Some(log) => export_qrels(&read_log(log).with_context(|| format!("reading {}", log.display()))?),
        None if args.qrels.is_empty() => bail!("give either --log or at least one --qrels ASSESSOR=PATH"),
        None => {
            let mut map = BTreeMap::new();
            for (a, p) in &args.qrels {
                if map.insert(a.clone(), input::qrels(p)?).is_some() {
                    bail!("assessor {a} given twice");
                }
            }
            map
        }
    };
    let report = noise_audit(&judgments, &noise_docs_by_topic(&pools), args.threshold);
    eprint!("{report}");

    let text = match g.format {
        Format::Json => json(&report),
        Format::Csv => {
            let header: Vec<String> = [
                "assessor", "topic", "judged", "unjudgeable", "not_relevant", "somewhat", "highly", "relevant_rate", "flagged",
            ]
            .map(String::from)
            .to_vec();
            let rows: Vec<Vec<String>> = report
                .groups
                .iter()
                .map(|gr| {
                    let flagged = report.flags.iter().any(|f| f.assessor_id == gr.assessor_id && f.topic_id == gr.topic_id);
                    let mut row = vec![gr.assessor_id.clone(), gr.topic_id.clone(), gr.judged.to_string()];
                    row.extend(Grade::ALL.iter().map(|g| gr.counts.get(&g.value()).copied().unwrap_or(0).to_string()));
                    row.push(fixed(gr.relevant_rate));
                    row.push(flagged.to_string());
                    row
                })
                .collect();
            csv(&header, &rows)
        }
    };
    emit(g.out, &text)?;
    Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
