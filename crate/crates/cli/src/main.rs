use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;
use qbm_cli::{execute, TaskKind};

/// Collisional dynamics of a test particle in an ideal quantum gas.
#[derive(Parser)]
#[command(name = "qbm", version)]
struct Cli {
    /// sfactor, dpp, evolve-lindblad, evolve-kramers or check
    task: TaskKind,
    /// Configuration file of `section.key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Output table; overrides `output.path`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn log_level() -> LevelFilter {
    match std::env::var("QBM_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok("info") | Err(_) => LevelFilter::Info,
        Ok(other) => {
            eprintln!("warning: QBM_LOG=`{other}` not recognised (quiet, info or debug); using info");
            LevelFilter::Info
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = log_level();
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    match execute(cli.task, &cli.config, cli.out.as_deref()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            if level != LevelFilter::Off {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
