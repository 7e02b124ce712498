use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use unitary_periods::cache::{Cache, CACHE_ENV};
use unitary_periods_cli::{
    cache_admin, render_census_csv, render_checks_csv, render_json, render_text, run_scenario, write_outputs,
    CacheCommand, RunReport, ScenarioConfig, Selected,
};

#[derive(Parser)]
#[command(name = "periods", version, about = "Finite-field verification of unitary period identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the final comparison tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Directory for report.json, report.txt and census.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification jobs of a config.
    Verify(RunArgs),
    /// Run the multiplicity jobs of a config.
    Mult(RunArgs),
    /// Run the multiplicity jobs with a full packet census.
    Census(RunArgs),
    /// Inspect or clean the cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        /// Cache root (defaults to the environment variable).
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Only evict entries whose file name contains this string.
        #[arg(long)]
        pattern: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    List,
    Evict,
    Validate,
}

fn load(args: &RunArgs, census: bool) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = Some(t);
    }
    if census {
        for m in &mut cfg.mult {
            m.census = m.file.is_some();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &RunReport, args: &RunArgs, census: bool) -> Result<()> {
    if let Some(dir) = &args.out {
        write_outputs(report, dir)?;
    }
    let text = match args.format {
        Format::Json => render_json(report)?,
        Format::Text => render_text(report),
        Format::Csv if census => render_census_csv(report)?,
        Format::Csv => render_checks_csv(report)?,
    };
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify(args) => {
            let cfg = load(&args, false)?;
            let report = run_scenario(&cfg, Selected { verify: true, mult: false })?;
            emit(&report, &args, false)?;
            Ok(report.passed)
        }
        Command::Mult(args) => {
            let cfg = load(&args, false)?;
            let report = run_scenario(&cfg, Selected { verify: false, mult: true })?;
            emit(&report, &args, false)?;
            Ok(report.passed)
        }
        Command::Census(args) => {
            let cfg = load(&args, true)?;
            let report = run_scenario(&cfg, Selected { verify: false, mult: true })?;
            emit(&report, &args, true)?;
            Ok(report.passed)
        }
        Command::Cache { action, dir, pattern } => {
            let cache = match dir {
                Some(d) => Cache::open(d)?,
                None => Cache::from_env()?.with_context(|| format!("no cache directory: pass --dir or set {CACHE_ENV}"))?,
            };
            let cmd = match action {
                CacheAction::List => CacheCommand::List,
                CacheAction::Evict => CacheCommand::Evict,
                CacheAction::Validate => CacheCommand::Validate,
            };
            print!("{}", cache_admin(&cache, cmd, pattern.as_deref())?);
            Ok(true)
        }
    }
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
