#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use crate::config::ConfigFile;

/// Bad flags, config or input values.
#[derive(Debug)]
pub struct UsageError(pub String);

/// Anything that ends the run with a non-zero status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Hypothesis(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Hypothesis(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Usage(_) => 64,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Hypothesis(s) | CliError::Numerical(s) => f.write_str(s),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<beam_nf::Error> for CliError {
    fn from(e: beam_nf::Error) -> Self {
        if e.is_hypothesis() {
            CliError::Hypothesis(e.to_string())
        } else if e.is_numerical() || matches!(e, beam_nf::Error::InsufficientTailDecay(_)) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(format!("unknown format `{s}` (csv, json, table)")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "beam-nf", version, about = "Normal-form stability analysis of the hinged stretched beam")]
struct Cli {
    /// Config file with `key = value` lines and `[section]` headers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv, json or table.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random initial states.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[command(rename_all = "lowercase")]
enum Command {
    /// Linear frequencies and the gap constants.
    #[command(allow_negative_numbers = true)]
    Freq(commands::FreqArgs),
    /// Certify the small-divisor lower bound over a finite index range.
    #[command(allow_negative_numbers = true)]
    Resonances(commands::ResonanceArgs),
    /// Build the normal form and report its constants and residuals.
    #[command(allow_negative_numbers = true)]
    Bnf(commands::BnfArgs),
    /// Integrate the truncated beam and write the trajectory.
    #[command(allow_negative_numbers = true)]
    Simulate(commands::SimulateArgs),
    /// Check a stability estimate on a simulated trajectory.
    #[command(allow_negative_numbers = true)]
    Verify(commands::VerifyArgs),
    /// Recompute the physical stability-time table.
    #[command(allow_negative_numbers = true)]
    Fig1(commands::Fig1Args),
}

/// Global options after merging flags with the unnamed config section.
pub struct Globals {
    pub format: Format,
    pub seed: u64,
    pub config: Option<ConfigFile>,
}

/// Text to emit plus an optional non-zero status decided after reporting.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let mut global = config.as_ref().map(|c| c.section("")).unwrap_or_else(|| ConfigFile::default().section(""));
    let format = global.take_or("format", cli.format, Format::Table)?;
    let out = global.take("out", cli.out.clone())?;
    let seed = global.take_or("seed", cli.seed, 0)?;
    let threads = global.take("threads", cli.threads)?;
    global.finish()?;
    if let Some(k) = threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let g = Globals { format, seed, config };
    let outcome = match cli.command {
        Command::Freq(a) => commands::freq(a, &g),
        Command::Resonances(a) => commands::resonances(a, &g),
        Command::Bnf(a) => commands::bnf(a, &g),
        Command::Simulate(a) => commands::simulate(a, &g),
        Command::Verify(a) => commands::verify(a, &g),
        Command::Fig1(a) => commands::fig1(a, &g),
    }?;
    match out {
        Some(path) => std::fs::write(&path, &outcome.text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome { failure: None, .. }) => ExitCode::SUCCESS,
        Ok(Outcome { failure: Some(e), .. }) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
