//! The `ewlab` command line.

pub mod config;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, GridSpec, Mode, RunConfig, Source};
pub use run::{build_trajectory, config_hash, exit_code, invariant_suite, run, PropertyCheck, RunContext, RunOutcome};

use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ewlab", version, about = "Constrained Willmore tori from Hopf differentials")]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`; default `.`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Thread cap for the scan from `EWLAB_THREADS`.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("EWLAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("EWLAB_THREADS must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Parses the config at `cli.config` and runs the requested mode.
pub fn execute(cli: &Cli) -> Result<RunOutcome> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("{}: {e}", cli.config.display())))?;
    let cfg = parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", cli.config.display())),
        other => other,
    })?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = RunContext { config_text: text, out_dir, threads: threads_from_env()? };
    run(&cfg, cli.mode, &ctx)
}

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            println!("{}", out.summary);
            for p in &out.artifacts {
                println!("  wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
