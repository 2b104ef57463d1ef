//! Explicit extensive-form games: trees, information sets, strategies and
//! their evaluation.

mod eval;
mod strategy;
pub mod text;
mod tree;

pub use eval::{
    all_agents, counterfactual_value, counterfactual_value_recursive, expected_utility,
    immediate_cf_regret, opponents_of, reach_between, reach_prob, Agent, Evaluation,
};
pub use strategy::{normalize, BehavioralStrategy, StrategyProfile};
pub use tree::{
    validate_perfect_recall, Game, GameBuilder, InfoSet, InfosetId, Node, NodeId, NodeKind, Player,
    RecallReport,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("malformed game: {0}")]
    Structure(String),
    #[error("imperfect recall: {}", .0.join("; "))]
    ImperfectRecall(Vec<String>),
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("unknown history {0}")]
    UnknownHistory(NodeId),
    #[error("unknown infoset {0}")]
    UnknownInfoset(InfosetId),
    #[error("action {action} is not legal at infoset {infoset}")]
    IllegalAction { infoset: InfosetId, action: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
