use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use clebsch_cli::{run, Command, RunConfig, RunError};

/// Numerical experiments on the Clebsch top under Weber's condition.
#[derive(Debug, Parser)]
#[command(name = "clebsch", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `out_dir`, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent sweeps (default 1).
    #[arg(long)]
    workers: Option<usize>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn fail(e: &RunError) -> ExitCode {
    let body = serde_json::json!({ "error": e.kind(), "message": e.message(), "exit_code": e.exit_code() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).init();

    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => return fail(&RunError::Config(e.0)),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.workers == Some(0) {
        return fail(&RunError::Config("--workers must be at least 1".into()));
    }
    let out = cli.out.or_else(|| cfg.out_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    match run(cli.command, &cfg, &out, Some(cli.workers.unwrap_or(1))) {
        Ok(files) => {
            let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            println!("{}", serde_json::json!({ "artifacts": names }));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
