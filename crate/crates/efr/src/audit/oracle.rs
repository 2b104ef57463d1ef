use std::collections::HashMap;

use super::AuditError;
use crate::deviation::{all_pure_strategies, apply_deviation, Deviation, Reduced};
use crate::game::{Evaluation, Game, NodeId, NodeKind, Player, StrategyProfile};

/// One player's view of the terminals: which own choices lead to each
/// infoset and to each terminal below it.
#[derive(Clone, Debug)]
pub struct TerminalIndex {
    player: Player,
    /// Per local infoset: own (local infoset, action) choices strictly above it.
    above: Vec<Vec<(usize, usize)>>,
    /// Per local infoset: the terminals below it, each with the own choices
    /// from the infoset down.
    below: Vec<Vec<(NodeId, Vec<(usize, usize)>)>>,
}

impl TerminalIndex {
    pub fn new(game: &Game, player: Player) -> Self {
        let n = game.player_infosets(player).len();
        let mut below = vec![Vec::new(); n];
        for &z in game.terminals() {
            let choices: Vec<(usize, usize)> = game
                .path(z)
                .into_iter()
                .filter_map(|(h, a)| match game.node(h).kind {
                    NodeKind::Decision { player: p, infoset } if p == player => Some((game.local_index(infoset), a)),
                    _ => None,
                })
                .collect();
            for k in 0..choices.len() {
                below[choices[k].0].push((z, choices[k..].to_vec()));
            }
        }
        let above = game
            .player_infosets(player)
            .iter()
            .map(|&i| game.chain(i).into_iter().map(|(p, a)| (game.local_index(p), a)).collect())
            .collect();
        Self { player, above, below }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// P(z; π_{-i}) u_i(z) per node (0 off the terminals).
    pub fn cf_utilities(&self, game: &Game, eval: &Evaluation) -> Vec<f64> {
        let mut out = vec![0.0; game.num_nodes()];
        for &z in game.terminals() {
            out[z] = eval.reach_except(z, self.player) * game.payoffs(z).expect("terminal")[self.player];
        }
        out
    }

    /// Whether `x` plays to the `local`-th infoset.
    pub fn reaches(&self, x: &[Option<usize>], local: usize) -> bool {
        self.above[local].iter().all(|&(l, a)| x[l] == Some(a))
    }

    /// Counterfactual value of `x` from the `local`-th infoset on, ignoring
    /// whether `x` reaches it.
    pub fn value_below(&self, x: &[Option<usize>], local: usize, cfu: &[f64]) -> f64 {
        self.below[local]
            .iter()
            .filter(|(_, req)| req.iter().all(|&(l, a)| x[l] == Some(a)))
            .map(|(z, _)| cfu[*z])
            .sum()
    }

    /// Reach-weighted counterfactual value of `x` at the `local`-th infoset.
    pub fn value(&self, x: &[Option<usize>], local: usize, cfu: &[f64]) -> f64 {
        if self.reaches(x, local) {
            self.value_below(x, local, cfu)
        } else {
            0.0
        }
    }
}

/// Full regret of a fixed list of deviations at every infoset of one player,
/// by enumerating that player's pure strategies.
///
/// ρ_I(φ; π) = Σ_s π_i(s) [V(φ(s), I) − V(φ_{≺I}(s), I)], where V is the
/// reach-weighted counterfactual value and φ_{≺I} applies φ only above I.
#[derive(Clone, Debug)]
pub struct FullRegretOracle<'g> {
    game: &'g Game,
    index: TerminalIndex,
    strategies: Vec<Vec<usize>>,
    reduced: Vec<Reduced>,
    /// [deviation][strategy]: index of φ(s) in `reduced`.
    images: Vec<Vec<usize>>,
    /// [deviation][local infoset][strategy]: index of φ_{≺I}(s).
    truncated: Vec<Vec<Vec<usize>>>,
}

impl<'g> FullRegretOracle<'g> {
    pub fn new(game: &'g Game, player: Player, deviations: &[Deviation], budget: f64) -> Result<Self, AuditError> {
        let strategies = all_pure_strategies(game, player, budget)?;
        let infosets = game.player_infosets(player);
        let needed = (deviations.len() * strategies.len() * (infosets.len() + 1)) as f64;
        if needed > budget {
            return Err(crate::deviation::DeviationError::Budget { needed, budget }.into());
        }
        let mut ids: HashMap<Reduced, usize> = HashMap::new();
        let mut reduced = Vec::new();
        let mut intern = |x: Reduced| {
            *ids.entry(x.clone()).or_insert_with(|| {
                reduced.push(x);
                reduced.len() - 1
            })
        };
        let mut images = Vec::with_capacity(deviations.len());
        let mut truncated = Vec::with_capacity(deviations.len());
        for d in deviations {
            let mut img = Vec::with_capacity(strategies.len());
            for s in &strategies {
                img.push(intern(apply_deviation(game, player, d, s)?));
            }
            images.push(img);
            let mut per_infoset = Vec::with_capacity(infosets.len());
            for &i in infosets {
                let above = Deviation::Truncated { inner: Box::new(d.clone()), target: i, inclusive: false };
                let mut t = Vec::with_capacity(strategies.len());
                for s in &strategies {
                    t.push(intern(apply_deviation(game, player, &above, s)?));
                }
                per_infoset.push(t);
            }
            truncated.push(per_infoset);
        }
        Ok(Self { game, index: TerminalIndex::new(game, player), strategies, reduced, images, truncated })
    }

    pub fn num_deviations(&self) -> usize {
        self.images.len()
    }

    /// ρ_I(φ; π) as `[deviation][local infoset]`.
    pub fn regrets(&self, profile: &StrategyProfile) -> Vec<Vec<f64>> {
        self.regrets_with(profile, &Evaluation::compute(self.game, profile))
    }

    pub fn regrets_with(&self, profile: &StrategyProfile, eval: &Evaluation) -> Vec<Vec<f64>> {
        let game = self.game;
        let player = self.index.player();
        let cfu = self.index.cf_utilities(game, eval);
        let infosets = game.player_infosets(player);
        let own = profile.strategy(player);
        let weights: Vec<f64> = self
            .strategies
            .iter()
            .map(|s| infosets.iter().zip(s).map(|(&i, &a)| own.prob(i, a)).product())
            .collect();
        let values: Vec<Vec<f64>> = self
            .reduced
            .iter()
            .map(|x| (0..infosets.len()).map(|l| self.index.value(x, l, &cfu)).collect())
            .collect();
        self.images
            .iter()
            .zip(&self.truncated)
            .map(|(img, trunc)| {
                (0..infosets.len())
                    .map(|l| {
                        weights
                            .iter()
                            .enumerate()
                            .filter(|(_, &w)| w != 0.0)
                            .map(|(s, w)| w * (values[img[s]][l] - values[trunc[l][s]][l]))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}
