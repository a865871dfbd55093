//! `idealmdl` command-line interface.

mod classes;
mod commands;
mod config;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "idealmdl", version, about = "Two-part code model selection, structure functions and randomness tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a hypothesis from one or more model classes.
    Select(SelectArgs),
    /// Structure function and minimal sufficient set of a bit string.
    Structure(StructureArgs),
    /// Randomness test levels and deficiency of a bit string.
    Randtest(RandtestArgs),
    /// Mixture prediction experiments under a seeded source.
    Predict(PredictArgs),
    /// Encode and decode files with the self-delimiting codes or the compressor registry.
    Codes(CodesArgs),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Mdl,
    Map,
    Gkmss,
    Emdl,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "mdl")]
    rule: RuleArg,
    /// Class specification, e.g. `bernoulli:r=5`; repeatable.
    #[arg(long = "class")]
    classes: Vec<String>,
    #[arg(long)]
    budget: Option<f64>,
    /// Sufficiency tolerance in bits for `gkmss`.
    #[arg(long)]
    c: Option<f64>,
    /// `universal`, `uniform`, or a JSON file mapping `class#index` labels to weights.
    #[arg(long, default_value = "universal")]
    prior: String,
    #[arg(long)]
    threshold_data: Option<f64>,
    #[arg(long)]
    threshold_prior: Option<f64>,
}

#[derive(Args)]
struct StructureArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    /// Write the profile as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RandtestArgs {
    #[command(flatten)]
    common: Common,
    /// Test name or `universal`.
    #[arg(long, default_value = "universal")]
    test: String,
    /// `uniform` or `class:SPEC#INDEX`.
    #[arg(long, default_value = "uniform")]
    dist: String,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    /// Class whose hypotheses form the mixture.
    #[arg(long = "class")]
    class: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Component index of the true source; defaults to the middle component.
    #[arg(long)]
    truth: Option<usize>,
    /// Replace the true component by a coin of this bias at the same weight.
    #[arg(long)]
    truth_p: Option<f64>,
    /// Write the S_n curve as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeOp {
    EncodeStandard,
    DecodeStandard,
    EncodeDoubling,
    DecodeDoubling,
    Compress,
    Decompress,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// ASCII `0`/`1` characters.
    Bits,
    /// Raw bytes for plain data, length-prefixed packed bits for codewords.
    Bytes,
}

#[derive(Args)]
struct CodesArgs {
    #[arg(value_enum)]
    op: CodeOp,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "bits")]
    format: Format,
}

fn base_config(common: &Common) -> error::CliResult<RunConfig> {
    let file = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig { input: common.input.clone(), output: common.out.clone(), ..RunConfig::default() };
    Ok(file.overridden_by(flags))
}

fn run(cli: Cli) -> error::CliResult<()> {
    match cli.command {
        Command::Select(a) => {
            let flags = RunConfig {
                classes: a.classes,
                budget: a.budget,
                c: a.c,
                threshold_data: a.threshold_data,
                threshold_prior: a.threshold_prior,
                ..RunConfig::default()
            };
            let cfg = base_config(&a.common)?.overridden_by(flags);
            cfg.validate()?;
            commands::select(&cfg, a.rule, &a.prior)
        }
        Command::Structure(a) => {
            let flags = RunConfig { kmax: a.kmax, c: a.c, csv: a.csv, ..RunConfig::default() };
            let cfg = base_config(&a.common)?.overridden_by(flags);
            cfg.validate()?;
            commands::structure(&cfg)
        }
        Command::Randtest(a) => {
            let cfg = base_config(&a.common)?;
            cfg.validate()?;
            commands::randtest(&cfg, &a.test, &a.dist)
        }
        Command::Predict(a) => {
            let flags = RunConfig {
                classes: a.class.into_iter().collect(),
                seed: a.seed,
                trials: a.trials,
                n: a.n,
                horizon: a.horizon,
                csv: a.csv,
                ..RunConfig::default()
            };
            let cfg = base_config(&a.common)?.overridden_by(flags);
            cfg.validate()?;
            commands::predict(&cfg, a.truth, a.truth_p)
        }
        Command::Codes(a) => {
            let cfg = base_config(&a.common)?;
            commands::codes(&cfg, a.op, a.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("idealmdl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
