use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use trelkit::model::write_qrels;
use trelkit_judge::{export_qrels, read_log, JudgeState, ServiceConfig};

use crate::output::write_file;
use crate::Global;

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Service configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured port; 0 picks a free one.
    #[arg(long)]
    pub port: Option<u16>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Judgment log written by the judging service.
    #[arg(long)]
    pub log: PathBuf,
}

pub fn serve(args: &ServeArgs, _g: &Global) -> Result<ExitCode> {
    let config = ServiceConfig::load(&args.config)?;
    let state = JudgeState::load(&config)?;
    let addr = SocketAddr::new(config.host, args.port.unwrap_or(config.port));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        let bound = listener.local_addr()?;
        let mut stdout = std::io::stdout().lock();
        writeln!(stdout, "listening on http://{bound}")?;
        stdout.flush()?;
        drop(stdout);
        trelkit_judge::serve(listener, state).await?;
        Ok(ExitCode::SUCCESS)
    })
}

/// Writes `<assessor>.qrels` per assessor into the `--out` directory.
pub fn export(args: &ExportArgs, g: &Global) -> Result<ExitCode> {
    let Some(dir) = g.out else {
        bail!("export needs --out DIR, one qrels file is written per assessor");
    };
    let events = read_log(&args.log).with_context(|| format!("reading {}", args.log.display()))?;
    let per_assessor = export_qrels(&events);
    for (assessor, qrels) in &per_assessor {
        let path = dir.join(format!("{assessor}.qrels"));
        write_file(&path, &write_qrels(qrels))?;
        eprintln!("{}: {} judgments", path.display(), qrels.len());
    }
    if per_assessor.is_empty() {
        eprintln!("no judgments in {}", args.log.display());
    }
    Ok(ExitCode::SUCCESS)
}
