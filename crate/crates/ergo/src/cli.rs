//! The `ergo` command line.
//!
//! Exit codes: 0 success, 1 runtime failure (IO, server), 2 invalid input,
//! 3 table asset failing its invariants.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use ergo_core::filter::{filter_outliers, FilterError, FilterPolicy};
use ergo_core::reba::{score_dataset, ScoredDataset};

use crate::asset::{Asset, AssetError};
use crate::manifest::{load_dataset, LoadOptions};
use crate::report::{read_scored, score_rows, write_scored, Report, ScoredIoError, ScoredMeta, DEFAULT_WORST_K};
use crate::server::{serve, AppState};
use crate::synthetic::{write_synthetic, GenerateError, SyntheticSpec};
use crate::IngestError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ASSET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ergo", version, about = "REBA posture scoring and analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter and score a dataset, writing scores.csv and report.json
    Score {
        manifest: PathBuf,
        /// Table asset JSON (defaults to the bundled standard worksheet)
        #[arg(long)]
        asset: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        min_confidence: f64,
        #[arg(long, default_value_t = 7)]
        hampel_window: usize,
        #[arg(long, default_value_t = 5.0)]
        hampel_k: f64,
        /// Skip malformed rows instead of failing
        #[arg(long)]
        lenient: bool,
        /// Output directory (defaults to `<id>-scored` next to the manifest)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the report of a scored directory
    Report { scored: PathBuf },
    /// Generate a synthetic recording from a spec file
    Gen {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (defaults to the spec id next to the spec)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the datasets found in a directory over HTTP
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = ".")]
        data: PathBuf,
        #[arg(long)]
        asset: Option<PathBuf>,
        /// Persist sessions to this JSON file
        #[arg(long)]
        sessions: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Scored(#[from] ScoredIoError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Asset(AssetError::Invariants(_) | AssetError::Parse(_)) => EXIT_ASSET,
            CliError::Ingest(IngestError::Io { .. }) | CliError::Io(_) | CliError::Scored(ScoredIoError::Io { .. }) => {
                EXIT_FAILURE
            }
            CliError::Generate(GenerateError::Io { .. }) => EXIT_FAILURE,
            CliError::Asset(AssetError::Io { .. }) => EXIT_FAILURE,
            _ => EXIT_INVALID,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScoreArgs {
    pub manifest: PathBuf,
    pub asset: Option<PathBuf>,
    pub policy: FilterPolicy,
    pub lenient: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ScoreOutcome {
    pub scored: ScoredDataset,
    pub report: Report,
    pub out_dir: PathBuf,
    /// Rows skipped in lenient mode.
    pub skipped: Vec<IngestError>,
}

/// Load, filter, score and write one dataset.
pub fn score(args: &ScoreArgs) -> Result<ScoreOutcome, CliError> {
    let asset = Asset::load_or_standard(args.asset.as_deref())?;
    args.policy.validate()?;
    let started = Instant::now();
    let opts = LoadOptions::for_config(&asset.config).lenient(args.lenient);
    let loaded = load_dataset(&args.manifest, &opts)?;
    let filtered = filter_outliers(&loaded.dataset, &args.policy)?;
    let scored = score_dataset(filtered, &asset.config);
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;

    let out_dir = args.out.clone().unwrap_or_else(|| {
        let base = args.manifest.parent().unwrap_or(Path::new("."));
        base.join(format!("{}-scored", scored.dataset().id))
    });
    let meta = ScoredMeta::new(&scored, &asset.checksum, runtime_ms);
    let report = write_scored(&out_dir, &meta, &score_rows(&scored))?;
    Ok(ScoreOutcome { scored, report, out_dir, skipped: loaded.diagnostics })
}

pub fn report(scored: &Path) -> Result<Report, CliError> {
    let (meta, rows) = read_scored(scored)?;
    Ok(Report::from_rows(&meta, &rows, DEFAULT_WORST_K))
}

pub fn generate(spec_path: &Path, seed: u64, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec: SyntheticSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", spec_path.display())))?;
    let dir = out.map_or_else(|| spec_path.parent().unwrap_or(Path::new(".")).join(&spec.id), Path::to_path_buf);
    Ok(write_synthetic(&spec, seed, &dir)?)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Score { manifest, asset, min_confidence, hampel_window, hampel_k, lenient, out: out_dir } => {
            let args = ScoreArgs {
                manifest,
                asset,
                policy: FilterPolicy { min_confidence, hampel_window, hampel_k },
                lenient,
                out: out_dir,
            };
            score(&args).map(|o| {
                for d in &o.skipped {
                    let _ = writeln!(err, "skipped: {d}");
                }
                let _ = writeln!(err, "wrote {}", o.out_dir.display());
                let _ = writeln!(out, "{}", to_json(&o.report));
            })
        }
        Command::Report { scored } => report(&scored).map(|r| {
            let _ = writeln!(out, "{}", to_json(&r));
        }),
        Command::Gen { spec, seed, out: out_dir } => generate(&spec, seed, out_dir.as_deref()).map(|p| {
            let _ = writeln!(out, "{}", p.display());
        }),
        Command::Serve { port, data, asset, sessions } => run_server(port, &data, asset.as_deref(), sessions, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_server(
    port: u16,
    data: &Path,
    asset: Option<&Path>,
    sessions: Option<PathBuf>,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let asset = Asset::load_or_standard(asset)?;
    let (mut state, warnings) = AppState::load_dir(data, &asset, &FilterPolicy::default())?;
    for w in warnings {
        let _ = writeln!(err, "warning: skipped {w}");
    }
    if let Some(path) = sessions {
        state = state.with_snapshot(path)?;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(serve(SocketAddr::from(([0, 0, 0, 0], port)), state))?;
    Ok(())
}
