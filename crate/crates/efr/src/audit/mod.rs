//! Brute-force oracles for small games: full regret by pure-strategy
//! enumeration and by recursion, its decomposition over memory states, the
//! observable sequential rationality gap, deviation incentives under the
//! empirical distribution of play, and best responses.
//!
//! Everything here enumerates pure strategies or memory strings, so it is
//! meant for Kuhn poker and three-card goofspiel, not the benchmark games.

mod best_response;
mod memory;
mod oracle;
mod play;
mod random;
mod suite;

use thiserror::Error;

use crate::deviation::DeviationError;
use crate::game::GameError;
use crate::learner::LearnerError;

pub use best_response::{best_response_gap, best_response_value, exploitability};
pub use memory::{
    check_decomposition, enumerate_memory_regrets, memory_states, DecompositionResiduals, MemoryAnalysis,
    SuccessorRule,
};
pub use oracle::{FullRegretOracle, TerminalIndex};
pub use play::{deviation_incentive, osr_gap, EmpiricalPlay, Incentive, OsrGap, INCENTIVE_TOLERANCE};
pub use random::{random_behavioral_deviation, random_profile, random_strategy};
pub use suite::{
    regret_bound_audit, run_audit, self_play, AuditCheck, AuditOptions, BoundReport, Status, BOUND_TYPES,
};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error(transparent)]
    Deviation(#[from] DeviationError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error("{0}")]
    Unsupported(String),
    #[error("inconsistent oracle paths: {0}")]
    Inconsistent(String),
    #[error("empty play: at least one round is needed")]
    EmptyPlay,
}
