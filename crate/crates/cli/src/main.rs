//! Scenario runner for the `fcs-entropy` library.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check,
//! 2 for any input problem (bad flags, unreadable or invalid config,
//! unwritable output).

mod commands;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use fcs_entropy::verify::Level;
use table::{sibling, write_text, Output};

#[derive(Parser)]
#[command(name = "fcs-entropy", version, about = "Entropy and counting statistics of a switched quantum point contact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Noise, entropy and effective temperature of a pulse train versus pulse width.
    Noise,
    /// Spectral density summary and rescaling factor versus transmission.
    Spectral,
    /// G-factor and variance of an explicit switching schedule.
    Schedule,
    /// Lattice simulation: entropy and cumulants versus time.
    Lattice,
    /// Entropy series from cumulants or from a model.
    Entropy,
    /// Run the acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<Option<T>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value = serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    Ok(Some(value))
}

fn require<T: DeserializeOwned>(path: Option<&Path>, command: &str) -> Result<T> {
    load(path)?.with_context(|| format!("`{command}` needs --config <path>"))
}

fn emit(out: &Output, path: Option<&Path>, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&commands::to_json(out))? + "\n";
            write_text(path, &text)
        }
        Format::Csv => {
            write_text(path, &out.main.to_csv()?)?;
            match path {
                Some(p) => {
                    for (suffix, table) in &out.extras {
                        write_text(Some(&sibling(p, suffix)), &table.to_csv()?)?;
                    }
                }
                None if !out.extras.is_empty() => {
                    eprintln!("note: side tables are only written with --out or --format json");
                }
                None => {}
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.config.as_deref();
    let out = cli.out.as_deref();
    let output = match &cli.command {
        Command::Noise => commands::noise(&load(cfg)?.unwrap_or_default())?,
        Command::Spectral => commands::spectral(&load(cfg)?.unwrap_or_default())?,
        Command::Schedule => commands::schedule(&require(cfg, "schedule")?)?,
        Command::Lattice => commands::lattice(&require(cfg, "lattice")?)?,
        Command::Entropy => commands::entropy(&require(cfg, "entropy")?)?,
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = commands::verify_report(level);
            print!("{}", report.render());
            if out.is_some() {
                emit(&commands::verify_table(&report), out, cli.format)?;
            }
            return Ok(report.all_passed());
        }
    };
    emit(&output, out, cli.format)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
