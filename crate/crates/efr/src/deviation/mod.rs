//! Deviation types, their per-infoset transformation sets and time-selection
//! keys, concrete deviations as pure-strategy maps, and brute-force
//! enumeration for small games.

mod enumerate;
mod keys;
mod rules;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::game::{Game, GameError, InfosetId, Player};
pub use crate::transform::ActionTransformation;

pub use enumerate::{
    FamilyBounds,
    all_pure_strategies, count_deviations, distinct_maps, enumerate_family, mixed_from_behavioral,
    pure_strategy_count, pushforward, realizable_memories, DeviationFamily, DistinctMap, DEFAULT_BUDGET,
};
pub use keys::{key_weight, max_keys, own_reach, time_selection_keys, TimeSelectionKey};
pub use rules::{apply_deviation, memory_probability, trace, BehavioralDeviation, Deviation, DeviationTrace, Observation, Reduced};

#[derive(Debug, Error)]
pub enum DeviationError {
    #[error("enumeration needs {needed} evaluations, over the budget of {budget}")]
    Budget { needed: f64, budget: f64 },
    #[error("memory state {memory} does not fit infoset {infoset}")]
    Memory { infoset: InfosetId, memory: String },
    #[error("transformation {phi} is not in the {kind} set at infoset {infoset}")]
    NotInSet { kind: DeviationType, infoset: InfosetId, phi: ActionTransformation },
    #[error("invalid deviation parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// The deviation types EFR can be instantiated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeviationType {
    /// All behavioral deviations.
    Behavioral,
    /// Twice informed partial sequence.
    Tips,
    /// Causal partial sequence.
    Csps,
    /// Counterfactual partial sequence.
    Cfps,
    /// Blind partial sequence.
    Bps,
    InformedAction,
    BlindAction,
    InformedCf,
    /// Blind counterfactual; EFR with it is CFR.
    BlindCf,
    CfExIn,
    CfpsExIn,
    TipsExIn,
}

/// Which action transformations a type uses at every infoset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformationSet {
    External,
    Internal,
    Union,
}

/// The constants of the EFR regret bound for one type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    /// Maximum number of time-selection keys attached to one transformation.
    pub max_keys: f64,
    pub d: f64,
    pub n_in: u32,
}

impl DeviationType {
    pub const ALL: [Self; 12] = [
        Self::Behavioral,
        Self::Tips,
        Self::Csps,
        Self::Cfps,
        Self::Bps,
        Self::InformedAction,
        Self::BlindAction,
        Self::InformedCf,
        Self::BlindCf,
        Self::CfExIn,
        Self::CfpsExIn,
        Self::TipsExIn,
    ];

    /// The benchmark roster, weakest first.
    pub const TABLE: [Self; 8] = [
        Self::InformedAction,
        Self::BlindCf,
        Self::InformedCf,
        Self::Bps,
        Self::Cfps,
        Self::Csps,
        Self::Tips,
        Self::Behavioral,
    ];

    pub const EX_IN: [Self; 3] = [Self::CfExIn, Self::CfpsExIn, Self::TipsExIn];

    pub fn token(self) -> &'static str {
        match self {
            Self::Behavioral => "bhv",
            Self::Tips => "tips",
            Self::Csps => "csps",
            Self::Cfps => "cfps",
            Self::Bps => "bps",
            Self::InformedAction => "act_in",
            Self::BlindAction => "act_blind",
            Self::InformedCf => "cf_in",
            Self::BlindCf => "cf",
            Self::CfExIn => "cf_exin",
            Self::CfpsExIn => "cfps_exin",
            Self::TipsExIn => "tips_exin",
        }
    }

    pub fn transformation_set(self) -> TransformationSet {
        match self {
            Self::Bps | Self::BlindAction | Self::BlindCf => TransformationSet::External,
            Self::Tips | Self::Cfps | Self::InformedAction | Self::InformedCf | Self::Behavioral => {
                TransformationSet::Internal
            }
            Self::Csps | Self::CfExIn | Self::CfpsExIn | Self::TipsExIn => TransformationSet::Union,
        }
    }

    /// The deviation family whose single-target deviations this type's EFR
    /// instance is hindsight rational for. The EX+IN variants have none.
    pub fn family(self) -> Option<DeviationFamily> {
        Some(match self {
            Self::Behavioral => DeviationFamily::SingleTargetBehavioral,
            Self::Tips => DeviationFamily::Tips,
            Self::Csps => DeviationFamily::Csps,
            Self::Cfps => DeviationFamily::Cfps,
            Self::Bps => DeviationFamily::Bps,
            Self::InformedAction => DeviationFamily::InformedAction,
            Self::BlindAction => DeviationFamily::BlindAction,
            Self::InformedCf => DeviationFamily::InformedCf,
            Self::BlindCf => DeviationFamily::BlindCf,
            Self::CfExIn | Self::CfpsExIn | Self::TipsExIn => return None,
        })
    }

    /// Closed-form constants at depth `d_star` and branching `n_a`.
    pub fn constants(self, d_star: usize, n_a: usize) -> BoundConstants {
        let (d, n) = (d_star as f64, n_a as f64);
        let internal = n * n - n;
        let (max_keys, n_in) = match self {
            Self::Behavioral => (n.powi(d_star as i32), d_star as u32),
            Self::Tips => (d * n + 1.0, 1),
            Self::Csps => (d * n, 1),
            Self::Cfps | Self::Bps => (d + 1.0, 0),
            Self::InformedAction | Self::BlindAction | Self::InformedCf | Self::BlindCf => (1.0, 0),
            Self::CfExIn => (1.0, 0),
            Self::CfpsExIn => (d + 1.0, 0),
            Self::TipsExIn => (d * n + 1.0, 1),
        };
        let d_const = match self.transformation_set() {
            TransformationSet::External => max_keys * (n - 1.0),
            TransformationSet::Internal => max_keys * internal,
            TransformationSet::Union => max_keys * (n * n - 2.0),
        };
        BoundConstants { max_keys, d: d_const, n_in }
    }

    /// Constants evaluated at the game's deepest infoset and widest action
    /// set over all players.
    pub fn game_constants(self, game: &Game) -> BoundConstants {
        let d = (0..game.num_players()).map(|p| game.max_depth(p)).max().unwrap_or(0);
        let n = (0..game.num_players()).map(|p| game.max_actions(p)).max().unwrap_or(0);
        self.constants(d, n)
    }

    /// 2^{n_IN+1} U |I_i| sqrt(D T).
    pub fn regret_bound(self, game: &Game, player: Player, rounds: usize) -> f64 {
        let c = self.game_constants(game);
        let n_infosets = game.player_infosets(player).len() as f64;
        2f64.powi(c.n_in as i32 + 1) * game.utility_bound() * n_infosets * (c.d * rounds as f64).sqrt()
    }
}

impl fmt::Display for DeviationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for DeviationType {
    type Err = DeviationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|t| t.token() == s).ok_or_else(|| {
            let tokens: Vec<_> = Self::ALL.iter().map(|t| t.token()).collect();
            DeviationError::Parameters(format!("unknown deviation type {s:?} ({})", tokens.join("|")))
        })
    }
}

/// Φ_I for `kind` at `infoset`: externals, non-identity internals, or both.
pub fn transformations_at(game: &Game, infoset: InfosetId, kind: DeviationType) -> Vec<ActionTransformation> {
    let n = game.infoset(infoset).num_actions();
    match kind.transformation_set() {
        TransformationSet::External => ActionTransformation::externals(n).collect(),
        TransformationSet::Internal => ActionTransformation::internals(n).collect(),
        TransformationSet::Union => {
            ActionTransformation::externals(n).chain(ActionTransformation::internals(n)).collect()
        }
    }
}
