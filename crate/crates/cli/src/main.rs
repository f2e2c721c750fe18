//! `proxlaw`: batch front end for hub-persistence experiments.
//!
//! Exit status is 0 on success, 1 when the analysis itself fails or a check
//! comes back negative, and 2 for I/O and usage errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Io(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) | Failure::Usage(_) => 2,
        }
    }
}

pub fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "proxlaw", version, about = "Hub persistence analysis for multilayer graphs")]
struct Cli {
    /// Machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write a run manifest (arguments, input digests, version) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidateKind {
    Graph,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleArg {
    StrictGreater,
    GreaterOrEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionArg {
    LegacyDirectional,
    ThresholdedV2,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "graph")]
    pub kind: ValidateKind,
}

#[derive(Debug, Args, Serialize)]
pub struct HubsArgs {
    pub graph: PathBuf,
    /// Use edge weights on weighted layers.
    #[arg(long)]
    pub weights: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PersistArgs {
    pub graph: PathBuf,
    pub layer_a: String,
    pub layer_b: String,
    #[arg(long, default_value_t = proxlaw::stats::DEFAULT_PERMUTATIONS)]
    pub permutations: u64,
    #[arg(long, default_value_t = proxlaw::stats::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub weights: bool,
    #[arg(long, value_enum, default_value = "greater-or-equal")]
    pub counting_rule: RuleArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    pub graph: PathBuf,
    pub config: PathBuf,
    /// Where to write the report; nothing is written without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub permutations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub weights: bool,
    #[arg(long, value_enum)]
    pub counting_rule: Option<RuleArg>,
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreregCommand {
    /// Print the SHA-256 digest of a hypothesis document.
    Hash { doc: PathBuf },
    /// Append a document to the ledger (PROXLAW_LEDGER or ./prereg-ledger.jsonl).
    Register {
        doc: PathBuf,
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Check a document against a claimed digest.
    Verify {
        doc: PathBuf,
        digest: String,
        /// Accept a 16-character truncated digest, checked by prefix.
        #[arg(long)]
        legacy: bool,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractCommon {
    /// Module map JSON; without it every file is its own module.
    #[arg(long)]
    pub module_map: Option<PathBuf>,
    /// Replace or add the layer in this graph instead of emitting a new one.
    #[arg(long)]
    pub merge_into: Option<PathBuf>,
    /// Name of the emitted graph when not merging.
    #[arg(long, default_value = "extracted")]
    pub name: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractCommand {
    /// Co-change layer from `git log --name-only --pretty=format:%H%x09%ct`.
    Cochange {
        log: PathBuf,
        #[arg(long, default_value_t = proxlaw::extract::DEFAULT_BULK_THRESHOLD)]
        bulk_threshold: usize,
        #[command(flatten)]
        #[serde(flatten)]
        common: ExtractCommon,
    },
    /// Import layer from the source files under a directory.
    Imports {
        root: PathBuf,
        /// Pattern set JSON; defaults to the built-in Python patterns.
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Only scan files with these extensions (repeatable).
        #[arg(long = "ext")]
        extensions: Vec<String>,
        #[command(flatten)]
        #[serde(flatten)]
        common: ExtractCommon,
    },
    /// Structural coupling layer derived from a graph's import layer.
    Coupling {
        graph: PathBuf,
        #[arg(long, default_value = "imports")]
        layer: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ControlArgs {
    pub n_nodes: usize,
    pub n_layers: usize,
    #[arg(default_value_t = proxlaw::graph::DEFAULT_EDGE_PROB)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = proxlaw::stats::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RolesArgs {
    pub graph_a: PathBuf,
    pub graph_b: PathBuf,
    /// Alignment JSON; defaults to same-named layers and modules of graph A.
    #[arg(long)]
    pub alignment: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Check a graph (or, with --kind report, an experiment report).
    Validate(ValidateArgs),
    /// Per-layer hub scores.
    Hubs(HubsArgs),
    /// Correlate the hub vectors of two layers.
    Persist(PersistArgs),
    /// Run a similar-vs-dissimilar experiment from a config file.
    Experiment(ExperimentArgs),
    #[command(subcommand)]
    Prereg(PreregCommand),
    #[command(subcommand)]
    Extract(ExtractCommand),
    /// Seeded random multilayer control graph.
    Control(ControlArgs),
    /// Exact upper binomial tail P(X >= k), X ~ Bin(n, 1/2).
    Binom { k: u64, n: u64 },
    /// Compare structural roles across two graphs.
    Roles(RolesArgs),
    /// Replay the twelve-row reference table under the legacy rule.
    ReplayTable,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Hubs(_) => "hubs",
            Command::Persist(_) => "persist",
            Command::Experiment(_) => "experiment",
            Command::Prereg(PreregCommand::Hash { .. }) => "prereg hash",
            Command::Prereg(PreregCommand::Register { .. }) => "prereg register",
            Command::Prereg(PreregCommand::Verify { .. }) => "prereg verify",
            Command::Extract(ExtractCommand::Cochange { .. }) => "extract cochange",
            Command::Extract(ExtractCommand::Imports { .. }) => "extract imports",
            Command::Extract(ExtractCommand::Coupling { .. }) => "extract coupling",
            Command::Control(_) => "control",
            Command::Binom { .. } => "binom",
            Command::Roles(_) => "roles",
            Command::ReplayTable => "replay-table",
        }
    }
}

pub struct Ctx {
    pub json: bool,
    pub manifest: manifest::RunManifest,
    pub clock: Box<dyn proxlaw::prereg::Clock>,
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let arguments = serde_json::to_value(&cli.command).expect("arguments serialize");
    // Externally tagged enum: unwrap the single variant key.
    let arguments = match arguments {
        serde_json::Value::Object(m) if m.len() == 1 => m.into_iter().next().unwrap().1,
        other => other,
    };
    let mut ctx = Ctx {
        json: cli.json,
        manifest: manifest::RunManifest::new(cli.command.name(), arguments),
        clock: manifest::clock()?,
    };
    let code = match &cli.command {
        Command::Validate(a) => commands::validate(&mut ctx, a)?,
        Command::Hubs(a) => commands::hubs(&mut ctx, a)?,
        Command::Persist(a) => commands::persist(&mut ctx, a)?,
        Command::Experiment(a) => commands::experiment(&mut ctx, a)?,
        Command::Prereg(c) => commands::prereg(&mut ctx, c)?,
        Command::Extract(c) => commands::extract(&mut ctx, c)?,
        Command::Control(a) => commands::control(&mut ctx, a)?,
        Command::Binom { k, n } => commands::binom(&mut ctx, *k, *n)?,
        Command::Roles(a) => commands::roles(&mut ctx, a)?,
        Command::ReplayTable => commands::replay_table(&mut ctx)?,
    };
    if let Some(path) = &cli.manifest {
        ctx.manifest.write(path, ctx.clock.as_ref())?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Domain(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("io error: {m}"),
                Failure::Usage(m) => eprintln!("usage error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
