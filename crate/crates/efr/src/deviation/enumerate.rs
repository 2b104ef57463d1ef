use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::rules::{trace, Deviation, Observation, Reduced};
use super::DeviationError;
use crate::game::{BehavioralStrategy, Game, InfosetId, Player};

/// Default cap on (deviation, pure strategy) evaluations for enumeration.
pub const DEFAULT_BUDGET: f64 = 1e7;

/// Families of deviations that can be enumerated on small games, one per
/// row of the deviation-count accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeviationFamily {
    /// Every behavioral deviation built from internal transformations.
    Internal,
    SingleTargetBehavioral,
    Tips,
    Csps,
    Cfps,
    Bps,
    InformedCausal,
    InformedAction,
    InformedCf,
    BlindCausal,
    BlindAction,
    BlindCf,
    External,
}

/// Dominant-term sizes for one family: realizable memory states and action
/// transformations per infoset, and total deviations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyBounds {
    pub memories: Option<f64>,
    pub transformations: Option<f64>,
    pub deviations: f64,
}

impl DeviationFamily {
    pub const ALL: [Self; 13] = [
        Self::Internal,
        Self::SingleTargetBehavioral,
        Self::Tips,
        Self::Csps,
        Self::Cfps,
        Self::Bps,
        Self::InformedCausal,
        Self::InformedAction,
        Self::InformedCf,
        Self::BlindCausal,
        Self::BlindAction,
        Self::BlindCf,
        Self::External,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Internal => "internal",
            Self::SingleTargetBehavioral => "single-target behavioral",
            Self::Tips => "TIPS",
            Self::Csps => "CSPS",
            Self::Cfps => "CFPS",
            Self::Bps => "BPS",
            Self::InformedCausal => "informed causal",
            Self::InformedAction => "informed action",
            Self::InformedCf => "informed CF",
            Self::BlindCausal => "blind causal",
            Self::BlindAction => "blind action",
            Self::BlindCf => "blind CF",
            Self::External => "external",
        }
    }

    /// Dominant terms at depth `d`, branching `n` and `infosets` infosets.
    pub fn bounds(self, d: usize, n: usize, infosets: usize) -> FamilyBounds {
        let (d, n, k) = (d as f64, n as f64, infosets as f64);
        let b = |m: Option<f64>, t: Option<f64>, c: f64| FamilyBounds { memories: m, transformations: t, deviations: c };
        match self {
            Self::Internal => b(None, None, n.powf(2.0 * k)),
            Self::SingleTargetBehavioral => b(Some(n.powf(d)), Some(n * n), n.powf(d + 2.0) * k),
            Self::Tips => b(Some(d * n), Some(n * n), d * n.powi(3) * k),
            Self::Csps => b(Some(d * n), Some(n), d * n * n * k),
            Self::Cfps => b(Some(d), Some(n * n), d * n * n * k),
            Self::Bps => b(Some(d), Some(n), d * n * k),
            Self::InformedCausal => b(Some(d), None, n.powf(k + 1.0) * k),
            Self::InformedAction | Self::InformedCf => b(Some(1.0), Some(n * n), n * n * k),
            Self::BlindCausal => b(Some(d), None, n.powf(k) * k),
            Self::BlindAction | Self::BlindCf => b(Some(1.0), Some(n), n * k),
            Self::External => b(None, None, n.powf(k)),
        }
    }

    /// Bounds at `player`'s own depth, branching and infoset count.
    pub fn bounds_for(self, game: &Game, player: Player) -> FamilyBounds {
        self.bounds(game.max_depth(player), game.max_actions(player), game.player_infosets(player).len())
    }
}

impl fmt::Display for DeviationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn pure_strategy_count(game: &Game, player: Player) -> f64 {
    game.player_infosets(player).iter().map(|&i| game.infoset(i).num_actions() as f64).product()
}

fn check_budget(needed: f64, budget: f64) -> Result<(), DeviationError> {
    if needed > budget {
        Err(DeviationError::Budget { needed, budget })
    } else {
        Ok(())
    }
}

/// Every pure strategy of `player`, in mixed-radix order with the last
/// infoset varying fastest.
pub fn all_pure_strategies(game: &Game, player: Player, budget: f64) -> Result<Vec<Vec<usize>>, DeviationError> {
    check_budget(pure_strategy_count(game, player), budget)?;
    let radix: Vec<usize> = game.player_infosets(player).iter().map(|&i| game.infoset(i).num_actions()).collect();
    Ok(radix_product(&radix))
}

fn radix_product(radix: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(radix.len())];
    for &n in radix {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// The mixed strategy a behavioral strategy induces: every pure strategy
/// with the product of its action probabilities.
pub fn mixed_from_behavioral(
    game: &Game,
    strategy: &BehavioralStrategy,
    budget: f64,
) -> Result<Vec<(Vec<usize>, f64)>, DeviationError> {
    let infosets = game.player_infosets(strategy.player());
    Ok(all_pure_strategies(game, strategy.player(), budget)?
        .into_iter()
        .map(|s| {
            let p = infosets.iter().zip(&s).map(|(&i, &a)| strategy.prob(i, a)).product();
            (s, p)
        })
        .collect())
}

/// [φπ](s') = Σ_{s ∈ φ⁻¹(s')} π(s), over reduced strategies.
pub fn pushforward(
    game: &Game,
    player: Player,
    deviation: &Deviation,
    mixed: &[(Vec<usize>, f64)],
) -> Result<BTreeMap<Reduced, f64>, DeviationError> {
    deviation.validate(game, player)?;
    let mut out = BTreeMap::new();
    for (s, p) in mixed {
        *out.entry(trace(game, player, deviation, s).strategy).or_insert(0.0) += p;
    }
    Ok(out)
}

/// Number of parameterizations `enumerate_family` would produce.
fn family_size(game: &Game, player: Player, family: DeviationFamily) -> f64 {
    let infosets = game.player_infosets(player);
    let n = |i: InfosetId| game.infoset(i).num_actions() as f64;
    let chain = |t: InfosetId| game.chain(t).into_iter().map(|(i, _)| i).chain([t]).collect::<Vec<_>>();
    let strategies = pure_strategy_count(game, player);
    let sum = |f: &dyn Fn(InfosetId) -> f64| infosets.iter().map(|&i| f(i)).sum::<f64>();
    match family {
        DeviationFamily::External => strategies,
        DeviationFamily::BlindAction | DeviationFamily::BlindCf => sum(&|i| n(i)),
        DeviationFamily::InformedAction | DeviationFamily::InformedCf => sum(&|i| n(i) * n(i)),
        DeviationFamily::Bps => sum(&|t| chain(t).len() as f64 * n(t)),
        DeviationFamily::Cfps => sum(&|t| chain(t).len() as f64 * n(t) * n(t)),
        DeviationFamily::Csps => sum(&|t| chain(t).iter().map(|&g| n(g)).sum::<f64>() * n(t)),
        DeviationFamily::Tips => sum(&|t| chain(t).iter().map(|&g| n(g)).sum::<f64>() * n(t) * n(t)),
        DeviationFamily::BlindCausal => infosets.len() as f64 * strategies,
        DeviationFamily::InformedCausal => sum(&|i| n(i)) * strategies,
        DeviationFamily::SingleTargetBehavioral => sum(&|t| chain(t).iter().map(|&g| n(g)).product::<f64>() * n(t)),
        DeviationFamily::Internal => infosets.iter().map(|&i| n(i) * n(i)).product(),
    }
}

/// Every parameterization of `family` for `player`. The result may contain
/// deviations that induce the same map; see [`distinct_maps`].
pub fn enumerate_family(
    game: &Game,
    player: Player,
    family: DeviationFamily,
    budget: f64,
) -> Result<Vec<Deviation>, DeviationError> {
    check_budget(family_size(game, player, family) * pure_strategy_count(game, player), budget)?;
    let infosets = game.player_infosets(player);
    let n = |i: InfosetId| game.infoset(i).num_actions();
    let chain = |t: InfosetId| game.chain(t).into_iter().map(|(i, _)| i).chain([t]).collect::<Vec<_>>();
    let plans = || all_pure_strategies(game, player, budget);
    let mut out = Vec::new();
    match family {
        DeviationFamily::External => out.extend(plans()?.into_iter().map(|plan| Deviation::External { plan })),
        DeviationFamily::BlindAction => {
            for &at in infosets {
                out.extend((0..n(at)).map(|to| Deviation::BlindAction { at, to }));
            }
        }
        DeviationFamily::InformedAction => {
            for &at in infosets {
                for from in 0..n(at) {
                    out.extend((0..n(at)).map(|to| Deviation::InformedAction { at, from, to }));
                }
            }
        }
        DeviationFamily::BlindCf => {
            for &target in infosets {
                out.extend((0..n(target)).map(|to| Deviation::BlindCf { target, to }));
            }
        }
        DeviationFamily::InformedCf => {
            for &target in infosets {
                for from in 0..n(target) {
                    out.extend((0..n(target)).map(|to| Deviation::InformedCf { target, from, to }));
                }
            }
        }
        DeviationFamily::Bps => {
            for &target in infosets {
                for trigger in chain(target) {
                    out.extend((0..n(target)).map(|to| Deviation::Bps { trigger, target, to }));
                }
            }
        }
        DeviationFamily::Cfps => {
            for &target in infosets {
                for trigger in chain(target) {
                    for from in 0..n(target) {
                        out.extend((0..n(target)).map(|to| Deviation::Cfps { trigger, target, from, to }));
                    }
                }
            }
        }
        DeviationFamily::Csps => {
            for &target in infosets {
                for trigger in chain(target) {
                    for trigger_action in 0..n(trigger) {
                        out.extend(
                            (0..n(target)).map(|to| Deviation::Csps { trigger, trigger_action, target, to }),
                        );
                    }
                }
            }
        }
        DeviationFamily::Tips => {
            for &target in infosets {
                for trigger in chain(target) {
                    for trigger_action in 0..n(trigger) {
                        for from in 0..n(target) {
                            out.extend((0..n(target)).map(|to| Deviation::Tips {
                                trigger,
                                trigger_action,
                                target,
                                from,
                                to,
                            }));
                        }
                    }
                }
            }
        }
        DeviationFamily::BlindCausal => {
            let plans = plans()?;
            for &trigger in infosets {
                out.extend(plans.iter().map(|plan| Deviation::BlindCausal { trigger, plan: plan.clone() }));
            }
        }
        DeviationFamily::InformedCausal => {
            let plans = plans()?;
            for &trigger in infosets {
                for trigger_action in 0..n(trigger) {
                    out.extend(plans.iter().map(|plan| Deviation::InformedCausal {
                        trigger,
                        trigger_action,
                        plan: plan.clone(),
                    }));
                }
            }
        }
        DeviationFamily::SingleTargetBehavioral => {
            for &target in infosets {
                let radix: Vec<usize> = chain(target).into_iter().map(n).collect();
                for triggers in radix_product(&radix) {
                    out.extend((0..n(target)).map(|to| Deviation::SingleTarget { target, triggers: triggers.clone(), to }));
                }
            }
        }
        DeviationFamily::Internal => {
            let radix: Vec<usize> = infosets.iter().map(|&i| n(i) * n(i)).collect();
            for code in radix_product(&radix) {
                let triggers = infosets.iter().zip(&code).map(|(&i, &c)| c / n(i)).collect();
                let targets = infosets.iter().zip(&code).map(|(&i, &c)| c % n(i)).collect();
                out.push(Deviation::Internal { triggers, targets });
            }
        }
    }
    Ok(out)
}

/// A deviation together with its image of every pure strategy.
#[derive(Clone, Debug)]
pub struct DistinctMap {
    pub deviation: Deviation,
    pub image: Vec<Reduced>,
}

/// Keeps one deviation per distinct pure-strategy map (compared on reduced
/// strategies) and drops those equivalent to the identity.
pub fn distinct_maps(
    game: &Game,
    player: Player,
    deviations: Vec<Deviation>,
    budget: f64,
) -> Result<Vec<DistinctMap>, DeviationError> {
    check_budget(deviations.len() as f64 * pure_strategy_count(game, player), budget)?;
    let strategies = all_pure_strategies(game, player, budget)?;
    let identity: Vec<Reduced> =
        strategies.iter().map(|s| trace(game, player, &Deviation::Identity, s).strategy).collect();
    let mut seen: HashSet<Vec<Reduced>> = HashSet::new();
    seen.insert(identity);
    let mut out = Vec::new();
    for deviation in deviations {
        deviation.validate(game, player)?;
        let image: Vec<Reduced> = strategies.iter().map(|s| trace(game, player, &deviation, s).strategy).collect();
        if seen.insert(image.clone()) {
            out.push(DistinctMap { deviation, image });
        }
    }
    Ok(out)
}

/// Number of distinct non-identity pure-strategy maps in `family`.
pub fn count_deviations(
    game: &Game,
    player: Player,
    family: DeviationFamily,
    budget: f64,
) -> Result<usize, DeviationError> {
    let devs = enumerate_family(game, player, family, budget)?;
    Ok(distinct_maps(game, player, devs, budget)?.len())
}

/// G_i(I, Φ): memory states some deviation in `deviations` holds at
/// `infoset` under some pure recommendation.
pub fn realizable_memories(
    game: &Game,
    player: Player,
    deviations: &[Deviation],
    infoset: InfosetId,
    budget: f64,
) -> Result<BTreeSet<Vec<Observation>>, DeviationError> {
    check_budget(deviations.len() as f64 * pure_strategy_count(game, player), budget)?;
    let strategies = all_pure_strategies(game, player, budget)?;
    let l = game.local_index(infoset);
    let mut out = BTreeSet::new();
    for d in deviations {
        for s in &strategies {
            if let Some(g) = trace(game, player, d, s).memory[l].take() {
                out.insert(g);
            }
        }
    }
    Ok(out)
}
