//! Configuration parsing, task dispatch and table I/O for the `qbm` command.

pub mod check;
pub mod config;
pub mod run;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{parse_config, parse_config_with, ConfigError, ConfigErrors, RunConfig, TaskKind};
pub use run::{run, Outcome, Sinks};
pub use table::{ReadError, SnapshotFile, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),

    #[error("cannot access `{path}`: {source}")]
    Path { path: PathBuf, source: io::Error },

    #[error("numerical error: {0}")]
    Numerical(#[from] qbm_core::Error),

    #[error("{0}")]
    Unsupported(String),

    #[error("write failed: {0}")]
    Output(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Config(_) | RunError::Path { .. } | RunError::Unsupported(_) | RunError::Output(_) => {
                EXIT_CONFIG
            }
        }
    }
}

/// Lowercase hex SHA-256 of the configuration bytes.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// `run.csv` -> `run.snapshots.csv`.
pub fn snapshot_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.snapshots.{}", ext.to_string_lossy()),
        None => format!("{stem}.snapshots"),
    };
    out.with_file_name(name)
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Path {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the config at `config_path`, runs `task` and writes to `out`
/// (falling back to `output.path`, then stdout). Returns the exit code.
pub fn execute(task: TaskKind, config_path: &Path, out: Option<&Path>) -> Result<i32, RunError> {
    let text = std::fs::read_to_string(config_path).map_err(|source| RunError::Path {
        path: config_path.to_path_buf(),
        source,
    })?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let cfg = parse_config_with(&text, base, Some(task))?;
    let hash = config_hash(&text);
    let target = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
    let evolving = matches!(task, TaskKind::EvolveLindblad | TaskKind::EvolveKramers);

    let outcome = match &target {
        Some(path) => {
            let mut main = create(path)?;
            let mut snaps = if evolving {
                let snap = snapshot_path(path);
                log::info!("snapshots go to {}", snap.display());
                Some(create(&snap)?)
            } else {
                None
            };
            let outcome = run(
                &cfg,
                &hash,
                Sinks {
                    main: &mut main,
                    snapshots: snaps.as_mut().map(|s| s as &mut dyn Write),
                },
            )?;
            main.flush().map_err(RunError::Output)?;
            if let Some(s) = snaps.as_mut() {
                s.flush().map_err(RunError::Output)?;
            }
            outcome
        }
        None => {
            if evolving {
                log::info!("no output path; snapshots are not written");
            }
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let outcome = run(
                &cfg,
                &hash,
                Sinks {
                    main: &mut lock,
                    snapshots: None,
                },
            )?;
            lock.flush().map_err(RunError::Output)?;
            outcome
        }
    };
    Ok(if outcome.failed_invariants > 0 { EXIT_INVARIANT } else { 0 })
}
