//! Command-line front end for `mevdro`.
//!
//! Every subcommand reads an optional JSON config file (`--config`) whose
//! keys mirror the long flags with underscores; flags given on the command
//! line take precedence. Everything is validated before any computation.

mod args;
mod commands;

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;

pub use args::{
    Cli, Command, Functional, GenArgs, GenFormat, GenModel, IngestArgs, RobustArgs, SweepArgs,
    SyntheticDataset, TrainArgs,
};

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Results were written but a solver flagged non-convergence.
    SolverFlag,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::SolverFlag => 2,
        }
    }
}

/// Field-wise "flags win" merge of a command's arguments with its config file.
pub trait Merge: Sized {
    fn merge(self, file: Self) -> Self;
}

pub(crate) fn resolve<T>(args: T, config: Option<&Path>) -> Result<T>
where
    T: Merge + DeserializeOwned,
{
    match config {
        None => Ok(args),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: T = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            Ok(args.merge(file))
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    if cli.threads > 0 {
        // A pool can only be installed once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Robust(a) => commands::robust(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Train(a) => commands::train(a),
    }
}
