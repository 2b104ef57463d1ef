//! Tournament regimes over EFR variants, result files and the `efr`
//! command-line tool.
//!
//! Everything is deterministic: learners use expected updates, payoffs are
//! exact expectations, and parallel pairings are merged back in a fixed
//! order. Wall-clock time is the one exception and is only recorded on
//! request.

mod config;
mod counterexample;
mod output;
mod regime;

use std::path::PathBuf;

use efr::audit::AuditError;
use efr::game::GameError;
use efr::learner::LearnerError;
use thiserror::Error;

pub use counterexample::{counterexample, CounterexampleReport};
pub use config::{parse_key_values, ConfigValues, ExperimentConfig, Regime};
pub use output::{read_csv, summarize, write_csv, write_plots, write_summary, SummaryRow, CSV_HEADER};
pub use regime::{run, run_fixed_regime, run_simultaneous_regime, ResultRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("{game}, {variant}, round {round}: {source}")]
    Learner {
        game: String,
        variant: String,
        round: usize,
        #[source]
        source: LearnerError,
    },
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("plot: {0}")]
    Plot(String),
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
