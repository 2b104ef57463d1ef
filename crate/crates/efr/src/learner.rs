//! The EFR learner: per-infoset time-selection regret matching over one
//! deviation type, with a top-down construction of the next strategy.

use thiserror::Error;

use crate::deviation::{
    key_weight, own_reach, time_selection_keys, transformations_at, DeviationError, DeviationType, TimeSelectionKey,
};
use crate::game::{BehavioralStrategy, Evaluation, Game, InfosetId, Player, StrategyProfile};
use crate::regret::{LocalLearner, RegretError};
use crate::transform::ActionTransformation;

pub use crate::regret::RmVariant;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error(transparent)]
    Deviation(#[from] DeviationError),
    #[error("infoset {infoset} after round {round}: {source}")]
    FixedPoint {
        infoset: InfosetId,
        round: usize,
        #[source]
        source: RegretError,
    },
    #[error("profile strategy for player {0} differs from the learner's current strategy")]
    StaleProfile(Player),
}

#[derive(Clone, Debug)]
struct InfosetState {
    infoset: InfosetId,
    /// Distinct keys at this infoset; links refer to them by position.
    keys: Vec<TimeSelectionKey>,
    learner: LocalLearner,
}

/// One player's EFR instance.
#[derive(Clone, Debug)]
pub struct EfrLearner<'g> {
    game: &'g Game,
    player: Player,
    kind: DeviationType,
    variant: RmVariant,
    states: Vec<InfosetState>,
    strategy: BehavioralStrategy,
    round: usize,
    /// Per local infoset: Σ_t P(h(I); π^t_i) π^t_i(I), and the reach sum.
    average_num: Vec<Vec<f64>>,
    average_den: Vec<f64>,
}

impl<'g> EfrLearner<'g> {
    pub fn new(game: &'g Game, player: Player, kind: DeviationType, variant: RmVariant) -> Result<Self, LearnerError> {
        let mut states = Vec::with_capacity(game.player_infosets(player).len());
        for &i in game.player_infosets(player) {
            let phis = transformations_at(game, i, kind);
            let mut keys: Vec<TimeSelectionKey> = Vec::new();
            let mut links = Vec::new();
            for (k, &phi) in phis.iter().enumerate() {
                for key in time_selection_keys(game, i, phi, kind)? {
                    let slot = keys.iter().position(|x| *x == key).unwrap_or_else(|| {
                        keys.push(key);
                        keys.len() - 1
                    });
                    links.push((k, slot));
                }
            }
            states.push(InfosetState { infoset: i, keys, learner: LocalLearner::new(variant, phis, links) });
        }
        let average_num = game.player_infosets(player).iter().map(|&i| vec![0.0; game.infoset(i).num_actions()]).collect();
        Ok(Self {
            game,
            player,
            kind,
            variant,
            average_den: vec![0.0; states.len()],
            states,
            strategy: BehavioralStrategy::uniform(game, player),
            round: 0,
            average_num,
        })
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn kind(&self) -> DeviationType {
        self.kind
    }

    pub fn variant(&self) -> RmVariant {
        self.variant
    }

    /// Rounds observed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    /// π^{t+1}_i after `t` observed rounds; uniform before the first.
    pub fn strategy(&self) -> &BehavioralStrategy {
        &self.strategy
    }

    /// Number of (I, φ_I, w) entries in the regret table.
    pub fn table_size(&self) -> usize {
        self.states.iter().map(|s| s.learner.links().len()).sum()
    }

    /// Every table entry as (infoset, transformation, key, cumulative value).
    pub fn table(&self) -> impl Iterator<Item = (InfosetId, ActionTransformation, &TimeSelectionKey, f64)> + '_ {
        self.states.iter().flat_map(|s| {
            let phis = s.learner.transformations();
            s.learner
                .links()
                .iter()
                .zip(s.learner.cumulative())
                .map(move |(&(phi, slot), &x)| (s.infoset, phis[phi], &s.keys[slot], x))
        })
    }

    /// Runs one round against `profile`, whose entry for this player must be
    /// the learner's current strategy, and returns the next strategy.
    pub fn observe_and_update(&mut self, profile: &StrategyProfile) -> Result<&BehavioralStrategy, LearnerError> {
        if profile.strategy(self.player) != &self.strategy {
            return Err(LearnerError::StaleProfile(self.player));
        }
        let eval = Evaluation::compute(self.game, profile);
        self.observe(&eval)
    }

    /// Same as [`Self::observe_and_update`] with the profile already
    /// evaluated; the caller vouches that it used the current strategy.
    pub fn observe(&mut self, eval: &Evaluation) -> Result<&BehavioralStrategy, LearnerError> {
        let game = self.game;
        let reach = own_reach(game, &self.strategy);
        let mut weights = Vec::new();
        let mut regrets = Vec::new();
        for (l, state) in self.states.iter_mut().enumerate() {
            let i = state.infoset;
            let sigma = self.strategy.dist(i);
            let values = eval.action_values(i);
            weights.clear();
            weights.extend(state.keys.iter().map(|k| key_weight(k, &reach, &self.strategy)));
            regrets.clear();
            regrets.extend(state.learner.transformations().iter().map(|phi| phi.value_gain(sigma, values)));
            state.learner.update(&regrets, &weights);

            for (acc, p) in self.average_num[l].iter_mut().zip(sigma) {
                *acc += reach[i] * p;
            }
            self.average_den[l] += reach[i];
        }
        self.round += 1;

        // Keys only look at strict predecessors, which are final by the time
        // an infoset is reached in this parent-first pass.
        let mut next = BehavioralStrategy::uniform(game, self.player);
        let mut reach = vec![0.0; game.infosets().len()];
        for state in &self.states {
            let i = state.infoset;
            reach[i] = match game.infoset(i).parent {
                None => 1.0,
                Some((p, a)) => reach[p] * next.prob(p, a),
            };
            weights.clear();
            weights.extend(state.keys.iter().map(|k| key_weight(k, &reach, &next)));
            let sigma = state
                .learner
                .strategy(game.infoset(i).num_actions(), &weights)
                .map_err(|source| LearnerError::FixedPoint { infoset: i, round: self.round, source })?;
            next.set_unchecked(i, &sigma);
        }
        self.strategy = next;
        Ok(&self.strategy)
    }

    /// 2^{n_IN+1} U |I_i| sqrt(D T) for this learner's type.
    pub fn regret_bound(&self, rounds: usize) -> f64 {
        self.kind.regret_bound(self.game, self.player, rounds)
    }

    /// Reach-weighted average of the strategies played so far; uniform where
    /// the player never reached an infoset.
    pub fn average_strategy(&self) -> BehavioralStrategy {
        let mut avg = BehavioralStrategy::uniform(self.game, self.player);
        for (l, state) in self.states.iter().enumerate() {
            let den = self.average_den[l];
            if den > 0.0 {
                let dist: Vec<f64> = self.average_num[l].iter().map(|x| x / den).collect();
                avg.set_unchecked(state.infoset, &dist);
            }
        }
        avg
    }
}
