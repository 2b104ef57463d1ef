use rand::seq::SliceRandom;
use rand::Rng;

use super::memory::memory_states;
use crate::deviation::{BehavioralDeviation, Deviation};
use crate::game::{BehavioralStrategy, Game, Player, StrategyProfile};
use crate::transform::ActionTransformation;

/// A strategy with every action probability bounded away from zero.
pub fn random_strategy(game: &Game, player: Player, rng: &mut impl Rng) -> BehavioralStrategy {
    BehavioralStrategy::from_fn(game, player, |i| {
        let raw: Vec<f64> = (0..game.infoset(i).num_actions()).map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    })
    .expect("normalized by construction")
}

pub fn random_profile(game: &Game, rng: &mut impl Rng) -> StrategyProfile {
    let strategies = (0..game.num_players()).map(|p| random_strategy(game, p, rng)).collect();
    StrategyProfile::new(game, strategies).expect("one strategy per seat")
}

/// A behavioral deviation drawing a uniformly random transformation (identity,
/// external or internal) for every (infoset, memory) pair of `player`.
pub fn random_behavioral_deviation(game: &Game, player: Player, rng: &mut impl Rng) -> Deviation {
    let mut table = BehavioralDeviation::new();
    for &i in game.player_infosets(player) {
        let n = game.infoset(i).num_actions();
        let choices: Vec<ActionTransformation> = std::iter::once(ActionTransformation::Identity)
            .chain(ActionTransformation::externals(n))
            .chain(ActionTransformation::internals(n))
            .collect();
        for g in memory_states(game, i) {
            table.set(i, g, *choices.choose(rng).expect("at least the identity"));
        }
    }
    Deviation::Behavioral(table)
}
