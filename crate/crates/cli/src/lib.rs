//! Batch front end: simulate populations, parse transaction logs into panels
//! and render each analysis as a text table with a CSV twin.

pub mod commands;
pub mod manifest;
pub mod report;
pub mod tables;

use std::path::PathBuf;

use betlearn::econlab::{Covariance, EstimationError};
use betlearn::econlab::feedback::FeedbackMode;
use betlearn::panel::PanelError;
use betlearn::simulator::SimulationError;
use betlearn::txlog::TxlogError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        CliError::Data(format!("config: {e}"))
    }
}

impl From<PanelError> for CliError {
    fn from(e: PanelError) -> Self {
        CliError::Data(format!("panel: {e}"))
    }
}

impl From<TxlogError> for CliError {
    fn from(e: TxlogError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Collinear { .. }
            | EstimationError::InsufficientData { .. }
            | EstimationError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            EstimationError::Specification(_) => CliError::Usage(e.to_string()),
            EstimationError::Dimension(_) | EstimationError::Panel(_) => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "betlearn", version, about = "Simulate jackpot gamblers and estimate how they learn")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario; write the panel, transaction logs and ground truth.
    Simulate(SimulateArgs),
    /// Aggregate a bets log and a ledger into a panel.
    Parse(ParseArgs),
    /// Run analyses on a panel and write text tables with CSV twins.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the panel and ground truth only, without transaction logs.
    #[arg(long)]
    pub panel_only: bool,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Tab-separated bet messages: individual id, timestamp, message.
    #[arg(long)]
    pub bets: PathBuf,
    /// Mobile-money ledger CSV.
    #[arg(long)]
    pub ledger: PathBuf,
    /// Week calendar with realised results (JSON).
    #[arg(long)]
    pub calendar: PathBuf,
    /// Counterparty to category map (JSON); defaults to the built-in table.
    #[arg(long)]
    pub companies: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum TableKind {
    #[value(name = "table2")]
    Table2,
    #[value(name = "table3")]
    Table3,
    #[value(name = "table4")]
    Table4,
    #[value(name = "tableA1")]
    TableA1,
    #[value(name = "tableA2")]
    TableA2,
    #[value(name = "tableA3")]
    TableA3,
    #[value(name = "tableA4")]
    TableA4,
    #[value(name = "tableA5")]
    TableA5,
    #[value(name = "figure1")]
    Figure1,
    #[value(name = "all")]
    All,
}

impl TableKind {
    pub const EACH: [TableKind; 9] = [
        TableKind::Table2,
        TableKind::Table3,
        TableKind::Table4,
        TableKind::TableA1,
        TableKind::TableA2,
        TableKind::TableA3,
        TableKind::TableA4,
        TableKind::TableA5,
        TableKind::Figure1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Table2 => "table2",
            TableKind::Table3 => "table3",
            TableKind::Table4 => "table4",
            TableKind::TableA1 => "tableA1",
            TableKind::TableA2 => "tableA2",
            TableKind::TableA3 => "tableA3",
            TableKind::TableA4 => "tableA4",
            TableKind::TableA5 => "tableA5",
            TableKind::Figure1 => "figure1",
            TableKind::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum CovarianceArg {
    #[default]
    Hc1,
    Cluster,
}

impl From<CovarianceArg> for Covariance {
    fn from(c: CovarianceArg) -> Self {
        match c {
            CovarianceArg::Hc1 => Covariance::Hc1,
            CovarianceArg::Cluster => Covariance::ClusterIndividual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ModeArg {
    #[default]
    Relative,
    Absolute,
}

impl From<ModeArg> for FeedbackMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Relative => FeedbackMode::Relative,
            ModeArg::Absolute => FeedbackMode::Absolute,
        }
    }
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Panel CSV.
    #[arg(long)]
    pub panel: PathBuf,
    /// Analyses to run; repeat the flag or pass `all`.
    #[arg(long = "table", required = true, num_args = 1..)]
    pub tables: Vec<TableKind>,
    #[arg(long)]
    pub out: PathBuf,
    /// Feedback threshold for table3 and tableA5.
    #[arg(long, default_value_t = 0.10)]
    pub cutoff: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Relative)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = CovarianceArg::Hc1)]
    pub covariance: CovarianceArg,
    /// Minimum predictions for a gambler to enter figure1.
    #[arg(long, default_value_t = 500)]
    pub min_matches: u64,
}

impl TablesArgs {
    /// Requested tables in canonical order, `all` expanded.
    pub fn selected(&self) -> Vec<TableKind> {
        if self.tables.contains(&TableKind::All) {
            return TableKind::EACH.to_vec();
        }
        let mut t = self.tables.clone();
        t.sort();
        t.dedup();
        t
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // a pool may already exist when called more than once in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a, &argv),
        Command::Parse(a) => commands::parse(&a, &argv).map(|_| ()),
        Command::Tables(a) => commands::tables(&a, &argv),
    }
}
