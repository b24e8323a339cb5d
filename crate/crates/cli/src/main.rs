mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, FigureName};
use config::{Format, RunConfig};

/// SU(1,1) atom-light interferometer: visibility, phase SNR and gain optimization.
#[derive(Debug, Parser)]
#[command(name = "salhi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration; omitted sections take baseline defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for written files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,

    /// Grid points for sweeps and figures, random samples for verify.
    #[arg(long, global = true)]
    grid_size: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form and exact visibilities, and balance-condition residuals.
    Visibility,
    /// Phase SNR of intensity and homodyne detection, and of the Mach-Zehnder reference.
    Snr,
    /// Optimal second-stage gain for visibility and for SNR.
    Optimize,
    /// Parameter sweep described by the config's `sweep` section.
    Sweep,
    /// Figure data and plots.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
    /// Cross-check closed forms, exact moments and the Fock oracle.
    Verify {
        /// Flip the sign of the closed-form interference term.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let formats = if cli.format.is_empty() { cfg.output.formats.clone() } else { cli.format.clone() };
    if cli.grid_size == Some(0) {
        anyhow::bail!("--grid-size must be positive");
    }
    let ctx = Ctx {
        out: commands::out_dir(cli.out.as_deref(), &cfg),
        cfg,
        formats,
        grid_size: cli.grid_size,
    };
    match cli.command {
        Command::Visibility => commands::visibility(&ctx)?,
        Command::Snr => commands::snr(&ctx)?,
        Command::Optimize => commands::optimize(&ctx)?,
        Command::Sweep => commands::sweep(&ctx)?,
        Command::Figure { name } => commands::figure(&ctx, name)?,
        Command::Verify { inject_fault } => return commands::verify(&ctx, inject_fault),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
