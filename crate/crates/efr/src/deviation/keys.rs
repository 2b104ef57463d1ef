use std::collections::BTreeSet;

use super::{transformations_at, DeviationError, DeviationType};
use crate::game::{BehavioralStrategy, Game, InfosetId};
use crate::transform::ActionTransformation;

/// A time-selection function, evaluated on the learner's own strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeSelectionKey {
    Constant1,
    /// The player's own reach probability of the infoset.
    ReachAt(InfosetId),
    /// Own reach of the infoset times the probability of the action there.
    ReachAndAction(InfosetId, usize),
    /// Product of the listed (infoset, action) probabilities; the pairs run
    /// contiguously down the owner's forest from a root.
    MemoryPrefix(Vec<(InfosetId, usize)>),
}

impl TimeSelectionKey {
    /// Rewrites keys that are the same function of the strategy into one form:
    /// reach of a forest root is 1, an action at a one-action infoset has
    /// probability 1, and the empty product is 1.
    pub fn canonical(self, game: &Game) -> Self {
        match self {
            Self::ReachAt(i) if game.infoset(i).parent.is_none() => Self::Constant1,
            Self::ReachAndAction(i, _) if game.infoset(i).num_actions() == 1 => Self::ReachAt(i).canonical(game),
            Self::MemoryPrefix(p) if p.is_empty() => Self::Constant1,
            k => k,
        }
    }
}

/// P(h(I); π_i) for every infoset of the strategy's player (0 elsewhere).
pub fn own_reach(game: &Game, strategy: &BehavioralStrategy) -> Vec<f64> {
    let mut reach = vec![0.0; game.infosets().len()];
    for &i in game.player_infosets(strategy.player()) {
        reach[i] = match game.infoset(i).parent {
            None => 1.0,
            Some((p, a)) => reach[p] * strategy.prob(p, a),
        };
    }
    reach
}

/// Weight of `key` under `strategy`, given that strategy's own reach vector.
pub fn key_weight(key: &TimeSelectionKey, reach: &[f64], strategy: &BehavioralStrategy) -> f64 {
    match key {
        TimeSelectionKey::Constant1 => 1.0,
        TimeSelectionKey::ReachAt(i) => reach[*i],
        TimeSelectionKey::ReachAndAction(i, a) => reach[*i] * strategy.prob(*i, *a),
        TimeSelectionKey::MemoryPrefix(pairs) => pairs.iter().map(|&(i, a)| strategy.prob(i, a)).product(),
    }
}

/// W_I(φ_I) for `kind`: the time-selection keys regret for `phi` at
/// `infoset` is weighted by, with equivalent keys merged.
pub fn time_selection_keys(
    game: &Game,
    infoset: InfosetId,
    phi: ActionTransformation,
    kind: DeviationType,
) -> Result<Vec<TimeSelectionKey>, DeviationError> {
    if !transformations_at(game, infoset, kind).contains(&phi) {
        return Err(DeviationError::NotInSet { kind, infoset, phi });
    }
    use TimeSelectionKey::*;
    let chain = game.chain(infoset);
    let reach_of_chain = || {
        std::iter::once(Constant1)
            .chain(chain.iter().map(|&(i, _)| ReachAt(i)))
            .chain([ReachAt(infoset)])
            .collect::<Vec<_>>()
    };
    let chain_actions = || {
        chain
            .iter()
            .flat_map(|&(i, _)| (0..game.infoset(i).num_actions()).map(move |a| ReachAndAction(i, a)))
            .collect::<Vec<_>>()
    };
    let keys: Vec<TimeSelectionKey> = match kind {
        DeviationType::BlindCf | DeviationType::InformedCf | DeviationType::CfExIn => vec![Constant1],
        DeviationType::BlindAction | DeviationType::InformedAction => vec![ReachAt(infoset)],
        DeviationType::Bps | DeviationType::Cfps | DeviationType::CfpsExIn => reach_of_chain(),
        DeviationType::Tips | DeviationType::TipsExIn => {
            let mut k = vec![Constant1];
            k.extend(chain_actions());
            k
        }
        // A causal deviation only switches to an external transformation after
        // its trigger fired at a strict predecessor.
        DeviationType::Csps => match phi {
            ActionTransformation::External { .. } => chain_actions(),
            _ => vec![ReachAt(infoset)],
        },
        DeviationType::Behavioral => memory_products(game, &chain),
    };
    let mut seen = BTreeSet::new();
    Ok(keys
        .into_iter()
        .map(|k| k.canonical(game))
        .filter(|k| seen.insert(k.clone()))
        .collect())
}

/// One product key per assignment of actions to the strict predecessors.
fn memory_products(game: &Game, chain: &[(InfosetId, usize)]) -> Vec<TimeSelectionKey> {
    let mut prefixes: Vec<Vec<(InfosetId, usize)>> = vec![Vec::new()];
    for &(i, _) in chain {
        let n = game.infoset(i).num_actions();
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |a| {
                    let mut q = p.clone();
                    q.push((i, a));
                    q
                })
            })
            .collect();
    }
    prefixes.into_iter().map(TimeSelectionKey::MemoryPrefix).collect()
}

/// Largest |W_I(φ_I)| over the player's infosets and the type's transformations.
pub fn max_keys(game: &Game, player: usize, kind: DeviationType) -> usize {
    game.player_infosets(player)
        .iter()
        .flat_map(|&i| {
            transformations_at(game, i, kind)
                .into_iter()
                .map(move |phi| time_selection_keys(game, i, phi, kind).map(|k| k.len()).unwrap_or(0))
        })
        .max()
        .unwrap_or(0)
}
