//! Benchmark game generators.

mod goofspiel;
mod kuhn;
mod leduc;
mod sheriff;

use std::fmt;
use std::str::FromStr;

pub use goofspiel::{build_goofspiel, utilities as goofspiel_utilities, PointOrder};
pub use kuhn::build_kuhn;
pub use leduc::{build_leduc, MBB_PER_CHIP};
pub use sheriff::{build_sheriff, build_sheriff_with, SheriffConfig, SHERIFF, SMUGGLER};

use crate::game::{Game, GameError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameKind {
    Kuhn,
    Leduc,
    Goofspiel,
    Sheriff,
}

impl FromStr for GameKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kuhn" => Ok(Self::Kuhn),
            "leduc" => Ok(Self::Leduc),
            "goofspiel" => Ok(Self::Goofspiel),
            "sheriff" => Ok(Self::Sheriff),
            other => Err(GameError::Structure(format!(
                "unknown game {other:?} (kuhn|leduc|goofspiel|sheriff)"
            ))),
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Kuhn => "kuhn",
            Self::Leduc => "leduc",
            Self::Goofspiel => "goofspiel",
            Self::Sheriff => "sheriff",
        })
    }
}

/// A buildable benchmark game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameSpec {
    Kuhn,
    Leduc,
    Goofspiel { ranks: usize, order: PointOrder, players: usize },
    Sheriff,
}

impl GameSpec {
    /// Assembles a spec from a kind plus optional goofspiel parameters
    /// (defaults: 5 ranks, ascending, 2 players).
    pub fn from_parts(
        kind: GameKind,
        ranks: Option<usize>,
        order: Option<PointOrder>,
        players: Option<usize>,
    ) -> Result<Self, GameError> {
        match kind {
            GameKind::Goofspiel => {
                let spec = Self::Goofspiel {
                    ranks: ranks.unwrap_or(5),
                    order: order.unwrap_or(PointOrder::Ascending),
                    players: players.unwrap_or(2),
                };
                spec.validate()?;
                Ok(spec)
            }
            _ if ranks.is_some() || order.is_some() => Err(GameError::Structure(format!(
                "ranks/order only apply to goofspiel, not {kind}"
            ))),
            _ if players.is_some_and(|p| p != 2) => {
                Err(GameError::Structure(format!("{kind} is a two-player game")))
            }
            GameKind::Kuhn => Ok(Self::Kuhn),
            GameKind::Leduc => Ok(Self::Leduc),
            GameKind::Sheriff => Ok(Self::Sheriff),
        }
    }

    pub fn kind(&self) -> GameKind {
        match self {
            Self::Kuhn => GameKind::Kuhn,
            Self::Leduc => GameKind::Leduc,
            Self::Goofspiel { .. } => GameKind::Goofspiel,
            Self::Sheriff => GameKind::Sheriff,
        }
    }

    fn validate(&self) -> Result<(), GameError> {
        if let Self::Goofspiel { ranks, players, .. } = *self {
            if ranks < 2 {
                return Err(GameError::Structure("goofspiel needs at least two ranks".into()));
            }
            if !(2..=3).contains(&players) {
                return Err(GameError::Structure("goofspiel supports two or three players".into()));
            }
        }
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        match self {
            Self::Goofspiel { players, .. } => *players,
            _ => 2,
        }
    }

    pub fn build(&self) -> Result<Game, GameError> {
        match *self {
            Self::Kuhn => Ok(build_kuhn()),
            Self::Leduc => Ok(build_leduc()),
            Self::Goofspiel { ranks, order, players } => build_goofspiel(ranks, order, players),
            Self::Sheriff => Ok(build_sheriff()),
        }
    }

    /// Whether this is one of the configurations the benchmark tables report.
    pub fn is_benchmark_configuration(&self) -> bool {
        use PointOrder::*;
        match *self {
            Self::Kuhn => false,
            Self::Leduc | Self::Sheriff => true,
            Self::Goofspiel { ranks, order, players } => matches!(
                (ranks, order, players),
                (5, Ascending, 2) | (5, Descending, 2) | (4, Random, 2) | (4, Ascending, 3) | (4, Descending, 3)
            ),
        }
    }

    /// Sum of all players' payoffs at every terminal.
    pub fn payoff_sum(&self) -> f64 {
        match self {
            Self::Goofspiel { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// Multiplier and unit for reporting payoffs.
    pub fn report_unit(&self) -> (f64, &'static str) {
        match self {
            Self::Leduc => (MBB_PER_CHIP, "mbb"),
            Self::Goofspiel { .. } => (1.0, "win-rate"),
            _ => (1.0, "chips"),
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Goofspiel { ranks, order, players } => write!(f, "goofspiel({ranks},{order},{players})"),
            other => write!(f, "{}", other.kind()),
        }
    }
}
