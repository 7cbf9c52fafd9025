//! `bandcert` — command-line front end for the band-gap certification engine.
//!
//! Subcommands:
//! * `spectra` — compute and export the limit spectra with an interlacing
//!   report.
//! * `certify` — emit gap/passband certificates (JSON, one per requested
//!   band index), plus dual-frame twins when `--dual` is set.
//! * `bands`   — brute-force Bloch band sweep with CSV/JSON data and an SVG
//!   band diagram; certified intervals are shaded when applicable.
//! * `verify`  — check every certificate against the brute-force oracle and
//!   the exact `1/k` reciprocity; exit 0 iff all applicable checks pass.
//! * `dual`    — like `certify`, emitting only the dual-frame certificates.
//!
//! Exit codes: 0 success (including vacuously passing, inapplicable
//! verifications), 1 validation error, 2 numerical failure, 3 a verification
//! check failed.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::DualEmission;
use config::LoadedConfig;

// ============================================================================
// Error type
// ============================================================================

/// Front-end error carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid config, geometry, or request (exit 1).
    Validation(String),
    /// Numerical failure: non-convergence, pole proximity, inconsistent
    /// spectra (exit 2).
    Numerical(String),
    /// An applicable verification check failed (exit 3).
    VerificationFailed(String),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }

    /// Human-readable message.
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::VerificationFailed(m) => m,
        }
    }

    /// Prefix the message with context (e.g. which certificate was being
    /// built).
    pub fn context(self, prefix: &str) -> CliError {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{prefix}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{prefix}: {m}")),
            CliError::VerificationFailed(m) => {
                CliError::VerificationFailed(format!("{prefix}: {m}"))
            }
        }
    }
}

impl From<bandcert::Error> for CliError {
    fn from(e: bandcert::Error) -> Self {
        use bandcert::Error as E;
        match &e {
            E::InvalidGeometry(_)
            | E::InvalidParameter(_)
            | E::InsufficientRange(_)
            | E::NotSimple { .. }
            | E::BelowThreshold { .. } => CliError::Validation(e.to_string()),
            E::PoleProximity { .. }
            | E::BracketFailure { .. }
            | E::Convergence(_)
            | E::Interlacing(_) => CliError::Numerical(e.to_string()),
        }
    }
}

// ============================================================================
// Argument parsing
// ============================================================================

#[derive(Parser)]
#[command(
    name = "bandcert",
    version,
    about = "Certified band gaps and passbands for high-contrast crystals"
)]
struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides [output] dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Radius variant (overrides [certify] variant): canonical | paper-literal.
    #[arg(long, global = true, value_name = "VARIANT")]
    variant: Option<String>,

    /// Work in the dual (1/k-scaled) frame.
    #[arg(long, global = true)]
    dual: bool,

    /// Oracle grid resolution (overrides [oracle] grid).
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,

    /// Comma-separated contrast list; overrides [oracle] k for bands/verify
    /// and [certify] k otherwise.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    k: Option<Vec<f64>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Compute and export the limit spectra.
    Spectra,
    /// Emit gap and passband certificates.
    Certify,
    /// Sweep Bloch bands and draw the band diagram.
    Bands,
    /// Check certificates against the brute-force oracle.
    Verify,
    /// Emit dual-frame certificates only.
    Dual,
}

// ============================================================================
// Dispatch
// ============================================================================

fn run(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Validation("--config PATH is required".into()))?;
    let mut loaded = LoadedConfig::load(&config_path)?;

    if let Some(out) = cli.out {
        loaded.run.output.dir = out;
    }
    if let Some(variant) = cli.variant {
        loaded.run.certify.variant = variant;
    }
    if cli.dual {
        loaded.run.oracle.dual = true;
    }
    if let Some(grid) = cli.grid {
        loaded.run.oracle.grid = grid;
    }
    if let Some(k) = cli.k {
        match cli.command {
            Command::Bands | Command::Verify => loaded.run.oracle.k = k,
            _ => loaded.run.certify.k = k,
        }
    }
    loaded.revalidate()?;

    match cli.command {
        Command::Spectra => commands::cmd_spectra(&loaded),
        Command::Certify => {
            let emission =
                if loaded.run.oracle.dual { DualEmission::Also } else { DualEmission::No };
            commands::cmd_certify(&loaded, emission)
        }
        Command::Bands => commands::cmd_bands(&loaded),
        Command::Verify => commands::cmd_verify(&loaded),
        Command::Dual => commands::cmd_certify(&loaded, DualEmission::Only),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
