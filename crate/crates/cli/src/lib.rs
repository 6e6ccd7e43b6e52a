//! Argument handling for the `wva` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use wva_core::experiment::{
    parse_kv, run_experiment, sweep, Grid, OutputFormat, RunConfig, SweepParameter,
};

pub const OUTPUT_DIR_ENV: &str = "WVA_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "wva", version, about = "Weak-value amplification experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol and write its record.
    Run(RunArgs),
    /// Evaluate a protocol across a parameter grid.
    Sweep(SweepArgs),
}

/// Every value is kept as raw text so the core parser reports field names.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// standard, pctc, boosted or retro
    pub protocol: String,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Unit axis for the retro protocol, as x,y,z
    #[arg(long = "n-hat", allow_hyphen_values = true)]
    pub n_hat: Option<String>,
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Accepted Bell outcomes for pctc, e.g. Φ+,Ψ+
    #[arg(long)]
    pub accept: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
    /// Flat key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// theta or gamma
    #[arg(long)]
    pub param: String,
    /// lo:hi:steps
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
}

impl CommonArgs {
    /// File pairs first, then flags, then the positional protocol.
    pub fn pairs(&self) -> Result<Vec<(String, String)>> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                parse_kv(&text)?
            }
            None => Vec::new(),
        };
        let flags = [
            ("theta", &self.theta),
            ("gamma", &self.gamma),
            ("n-hat", &self.n_hat),
            ("shots", &self.shots),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("accept", &self.accept),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.push((key.to_string(), v.clone()));
            }
        }
        if let Some(out) = &self.out {
            pairs.push(("out".into(), out.display().to_string()));
        }
        pairs.push(("protocol".into(), self.protocol.clone()));
        Ok(pairs)
    }
}

pub fn parse_run_config(args: &CommonArgs) -> Result<RunConfig> {
    Ok(RunConfig::from_pairs(&args.pairs()?)?)
}

fn output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_output(explicit: Option<&Path>, stem: &str, format: OutputFormat) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => output_dir().join(format!("{stem}.{}", format.extension())),
    }
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating output directory {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = parse_run_config(&args.common)?;
            let record = run_experiment(&cfg)?;
            let stem = format!("{}-seed{}", cfg.protocol, cfg.seed);
            let path = resolve_output(cfg.output_path.as_deref(), &stem, cfg.format);
            write_output(&path, &record.serialize(cfg.format)?)?;
            print!("{}", record.summary_table());
            println!("wrote {}", path.display());
        }
        Command::Sweep(args) => {
            let parameter: SweepParameter = args.param.parse()?;
            let grid: Grid = args.grid.parse()?;
            let mut pairs = args.common.pairs()?;
            if !pairs.iter().any(|(k, _)| k == parameter.key()) {
                pairs.insert(0, (parameter.key().to_string(), grid.lo.to_string()));
            }
            if args.common.shots.is_none() {
                pairs.push(("shots".into(), "0".into()));
            }
            let cfg = RunConfig::from_pairs(&pairs)?;
            let table = sweep(&cfg, parameter, grid)?;
            let stem = format!("sweep-{}-{}", cfg.protocol, parameter.key());
            let path = resolve_output(cfg.output_path.as_deref(), &stem, cfg.format);
            write_output(&path, &table.serialize(cfg.format)?)?;
            let flagged = table.rows.iter().filter(|r| r.degenerate).count();
            println!(
                "{} rows ({} degenerate), wrote {}",
                table.rows.len(),
                flagged,
                path.display()
            );
        }
    }
    Ok(())
}
