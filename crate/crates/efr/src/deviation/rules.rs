use std::collections::BTreeMap;
use std::fmt;

use super::DeviationError;
use crate::game::{BehavioralStrategy, Game, InfosetId, Player};
use crate::transform::ActionTransformation;

/// What the deviation player records at an infoset: the recommended action,
/// or nothing when an external transformation hid it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observation {
    Hidden,
    Action(usize),
}

impl Observation {
    pub fn of(phi: ActionTransformation, recommended: usize) -> Self {
        if phi.observes() {
            Self::Action(recommended)
        } else {
            Self::Hidden
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hidden => f.write_str("*"),
            Self::Action(a) => write!(f, "{a}"),
        }
    }
}

pub(super) fn memory_string(g: &[Observation]) -> String {
    if g.is_empty() {
        return "∅".into();
    }
    g.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(".")
}

/// A pure strategy with `None` at the player's infosets it cannot reach,
/// indexed like [`Game::player_infosets`].
pub type Reduced = Vec<Option<usize>>;

/// An explicit table of transformations keyed by (infoset, memory state);
/// missing entries are the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BehavioralDeviation {
    rules: BTreeMap<(InfosetId, Vec<Observation>), ActionTransformation>,
}

impl BehavioralDeviation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, infoset: InfosetId, memory: Vec<Observation>, phi: ActionTransformation) {
        if phi.is_identity() {
            self.rules.remove(&(infoset, memory));
        } else {
            self.rules.insert((infoset, memory), phi);
        }
    }

    pub fn get(&self, infoset: InfosetId, memory: &[Observation]) -> ActionTransformation {
        self.rules.get(&(infoset, memory.to_vec())).copied().unwrap_or(ActionTransformation::Identity)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// A deviation of one player, described by the parameters of its type.
/// Infoset parameters are global ids; plans are pure strategies indexed like
/// [`Game::player_infosets`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deviation {
    Identity,
    /// Plays `plan` everywhere.
    External { plan: Vec<usize> },
    BlindAction { at: InfosetId, to: usize },
    InformedAction { at: InfosetId, from: usize, to: usize },
    BlindCf { target: InfosetId, to: usize },
    InformedCf { target: InfosetId, from: usize, to: usize },
    /// From `trigger` on, heads for `target` and plays `to` there.
    Bps { trigger: InfosetId, target: InfosetId, to: usize },
    Cfps { trigger: InfosetId, target: InfosetId, from: usize, to: usize },
    /// Once `trigger_action` is recommended at `trigger`, heads for `target`
    /// and plays `to` there.
    Csps { trigger: InfosetId, trigger_action: usize, target: InfosetId, to: usize },
    Tips { trigger: InfosetId, trigger_action: usize, target: InfosetId, from: usize, to: usize },
    BlindCausal { trigger: InfosetId, plan: Vec<usize> },
    InformedCausal { trigger: InfosetId, trigger_action: usize, plan: Vec<usize> },
    /// Heads for `target` while every recommendation on the way matched
    /// `triggers` (one per infoset from the forest root to `target`), then
    /// plays `to` if the last one matched too.
    SingleTarget { target: InfosetId, triggers: Vec<usize>, to: usize },
    /// At each infoset, swaps `triggers` for `targets` while every earlier
    /// trigger on the path fired.
    Internal { triggers: Vec<usize>, targets: Vec<usize> },
    Behavioral(BehavioralDeviation),
    /// `inner` restricted to the predecessors of `target` (and `target`
    /// itself when `inclusive`); identity elsewhere.
    Truncated { inner: Box<Deviation>, target: InfosetId, inclusive: bool },
}

impl Deviation {
    /// φ_{I,g}: the transformation applied at `infoset` with memory `memory`.
    pub fn transformation(&self, game: &Game, infoset: InfosetId, memory: &[Observation]) -> ActionTransformation {
        use ActionTransformation::{External, Identity};
        let pre = |a: InfosetId, b: InfosetId| game.precedes_or_eq(a, b);
        let strict = |a: InfosetId, b: InfosetId| a != b && game.precedes_or_eq(a, b);
        let toward = |target: InfosetId| External { to: game.action_toward(infoset, target).expect("on path") };
        let fired = |trigger: InfosetId, action: usize| {
            memory.get(game.infoset(trigger).depth) == Some(&Observation::Action(action))
        };
        let i = infoset;
        match self {
            Self::Identity => Identity,
            Self::External { plan } => External { to: plan[game.local_index(i)] },
            Self::BlindAction { at, to } if *at == i => External { to: *to },
            Self::InformedAction { at, from, to } if *at == i => ActionTransformation::internal(*from, *to),
            Self::BlindCf { target, to } => {
                if *target == i {
                    External { to: *to }
                } else if strict(i, *target) {
                    toward(*target)
                } else {
                    Identity
                }
            }
            Self::InformedCf { target, from, to } => {
                if *target == i {
                    ActionTransformation::internal(*from, *to)
                } else if strict(i, *target) {
                    toward(*target)
                } else {
                    Identity
                }
            }
            Self::Bps { trigger, target, to } => {
                if *target == i {
                    External { to: *to }
                } else if pre(*trigger, i) && strict(i, *target) {
                    toward(*target)
                } else {
                    Identity
                }
            }
            Self::Cfps { trigger, target, from, to } => {
                if *target == i {
                    ActionTransformation::internal(*from, *to)
                } else if pre(*trigger, i) && strict(i, *target) {
                    toward(*target)
                } else {
                    Identity
                }
            }
            Self::Csps { trigger, trigger_action, target, to } => {
                if trigger == target {
                    if i == *target {
                        ActionTransformation::internal(*trigger_action, *to)
                    } else {
                        Identity
                    }
                } else if i == *trigger {
                    let next = game.action_toward(i, *target).expect("trigger precedes target");
                    ActionTransformation::internal(*trigger_action, next)
                } else if strict(*trigger, i) && pre(i, *target) && fired(*trigger, *trigger_action) {
                    if i == *target {
                        External { to: *to }
                    } else {
                        toward(*target)
                    }
                } else {
                    Identity
                }
            }
            Self::Tips { trigger, trigger_action, target, from, to } => {
                if trigger == target {
                    if i == *target && trigger_action == from {
                        ActionTransformation::internal(*from, *to)
                    } else {
                        Identity
                    }
                } else if i == *trigger {
                    let next = game.action_toward(i, *target).expect("trigger precedes target");
                    ActionTransformation::internal(*trigger_action, next)
                } else if strict(*trigger, i) && pre(i, *target) && fired(*trigger, *trigger_action) {
                    if i == *target {
                        ActionTransformation::internal(*from, *to)
                    } else {
                        toward(*target)
                    }
                } else {
                    Identity
                }
            }
            Self::BlindCausal { trigger, plan } if pre(*trigger, i) => External { to: plan[game.local_index(i)] },
            Self::InformedCausal { trigger, trigger_action, plan } => {
                if i == *trigger {
                    ActionTransformation::internal(*trigger_action, plan[game.local_index(i)])
                } else if strict(*trigger, i) && fired(*trigger, *trigger_action) {
                    External { to: plan[game.local_index(i)] }
                } else {
                    Identity
                }
            }
            Self::SingleTarget { target, triggers, to } => {
                if !pre(i, *target) {
                    return Identity;
                }
                let k = game.infoset(i).depth;
                if (0..k).any(|j| memory.get(j) != Some(&Observation::Action(triggers[j]))) {
                    return Identity;
                }
                let next = if i == *target { *to } else { game.action_toward(i, *target).expect("on path") };
                ActionTransformation::internal(triggers[k], next)
            }
            Self::Internal { triggers, targets } => {
                let chain = game.chain(i);
                let all_fired = chain
                    .iter()
                    .enumerate()
                    .all(|(j, &(p, _))| memory.get(j) == Some(&Observation::Action(triggers[game.local_index(p)])));
                if all_fired {
                    let l = game.local_index(i);
                    ActionTransformation::internal(triggers[l], targets[l])
                } else {
                    Identity
                }
            }
            Self::Behavioral(table) => table.get(i, memory),
            Self::Truncated { inner, target, inclusive } => {
                if (*inclusive || i != *target) && pre(i, *target) {
                    inner.transformation(game, i, memory)
                } else {
                    Identity
                }
            }
            _ => Identity,
        }
    }

    /// Checks that the parameters describe a deviation of the declared type
    /// for `player`.
    pub fn validate(&self, game: &Game, player: Player) -> Result<(), DeviationError> {
        let own = |i: InfosetId| i < game.infosets().len() && game.infoset(i).player == player;
        let action = |i: InfosetId, a: usize| own(i) && a < game.infoset(i).num_actions();
        let plan_ok = |plan: &[usize]| {
            let infosets = game.player_infosets(player);
            plan.len() == infosets.len() && infosets.iter().zip(plan).all(|(&i, &a)| action(i, a))
        };
        let chain_ok = |t: InfosetId, g: InfosetId| own(t) && own(g) && game.precedes_or_eq(t, g);
        let ok = match self {
            Self::Identity => true,
            Self::External { plan } => plan_ok(plan),
            Self::BlindAction { at, to } => action(*at, *to),
            Self::InformedAction { at, from, to } => action(*at, *from) && action(*at, *to),
            Self::BlindCf { target, to } => action(*target, *to),
            Self::InformedCf { target, from, to } => action(*target, *from) && action(*target, *to),
            Self::Bps { trigger, target, to } => chain_ok(*trigger, *target) && action(*target, *to),
            Self::Cfps { trigger, target, from, to } => {
                chain_ok(*trigger, *target) && action(*target, *from) && action(*target, *to)
            }
            Self::Csps { trigger, trigger_action, target, to } => {
                chain_ok(*trigger, *target) && action(*trigger, *trigger_action) && action(*target, *to)
            }
            Self::Tips { trigger, trigger_action, target, from, to } => {
                chain_ok(*trigger, *target)
                    && action(*trigger, *trigger_action)
                    && action(*target, *from)
                    && action(*target, *to)
            }
            Self::BlindCausal { trigger, plan } => own(*trigger) && plan_ok(plan),
            Self::InformedCausal { trigger, trigger_action, plan } => action(*trigger, *trigger_action) && plan_ok(plan),
            Self::SingleTarget { target, triggers, to } => {
                own(*target)
                    && action(*target, *to)
                    && triggers.len() == game.infoset(*target).depth + 1
                    && game
                        .chain(*target)
                        .iter()
                        .map(|&(i, _)| i)
                        .chain([*target])
                        .zip(triggers)
                        .all(|(i, &a)| action(i, a))
            }
            Self::Internal { triggers, targets } => plan_ok(triggers) && plan_ok(targets),
            Self::Behavioral(table) => table.rules.iter().all(|((i, g), phi)| {
                own(*i) && g.len() == game.infoset(*i).depth && phi.is_valid_for(game.infoset(*i).num_actions())
            }),
            Self::Truncated { inner, target, .. } => own(*target) && inner.validate(game, player).is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(DeviationError::Parameters(format!("{self:?} is not a valid deviation for player {player}")))
        }
    }
}

/// The deviated strategy together with the memory state the deviation
/// player holds at each infoset the deviated play reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationTrace {
    pub strategy: Reduced,
    pub memory: Vec<Option<Vec<Observation>>>,
    /// The transformation applied at each reached infoset.
    pub applied: Vec<Option<ActionTransformation>>,
}

/// Runs the deviation against recommendation `s` without validating it.
pub fn trace(game: &Game, player: Player, deviation: &Deviation, s: &[usize]) -> DeviationTrace {
    let infosets = game.player_infosets(player);
    let mut strategy: Reduced = vec![None; infosets.len()];
    let mut memory: Vec<Option<Vec<Observation>>> = vec![None; infosets.len()];
    let mut applied = vec![None; infosets.len()];
    let mut observed = vec![Observation::Hidden; infosets.len()];
    for (l, &i) in infosets.iter().enumerate() {
        let g = match game.infoset(i).parent {
            None => Vec::new(),
            Some((p, a)) => {
                let lp = game.local_index(p);
                match (&memory[lp], strategy[lp]) {
                    (Some(g), Some(played)) if played == a => {
                        let mut g = g.clone();
                        g.push(observed[lp]);
                        g
                    }
                    _ => continue,
                }
            }
        };
        let phi = deviation.transformation(game, i, &g);
        strategy[l] = Some(phi.apply(s[l]));
        observed[l] = Observation::of(phi, s[l]);
        applied[l] = Some(phi);
        memory[l] = Some(g);
    }
    DeviationTrace { strategy, memory, applied }
}

/// φ(s) as a reduced strategy.
pub fn apply_deviation(
    game: &Game,
    player: Player,
    deviation: &Deviation,
    s: &[usize],
) -> Result<Reduced, DeviationError> {
    deviation.validate(game, player)?;
    let infosets = game.player_infosets(player);
    if s.len() != infosets.len() || infosets.iter().zip(s).any(|(&i, &a)| a >= game.infoset(i).num_actions()) {
        return Err(DeviationError::Parameters(format!("{s:?} is not a pure strategy of player {player}")));
    }
    Ok(trace(game, player, deviation, s).strategy)
}

/// w_φ(I, g; π_i): probability that the deviation player, fed recommendations
/// from `strategy`, arrives at `infoset` holding memory `memory`.
pub fn memory_probability(
    game: &Game,
    deviation: &Deviation,
    infoset: InfosetId,
    memory: &[Observation],
    strategy: &BehavioralStrategy,
) -> Result<f64, DeviationError> {
    let chain = game.chain(infoset);
    let bad = || DeviationError::Memory { infoset, memory: memory_string(memory) };
    if memory.len() != chain.len() {
        return Err(bad());
    }
    let mut w = 1.0;
    for (k, &(i, toward)) in chain.iter().enumerate() {
        let n = game.infoset(i).num_actions();
        if let Observation::Action(a) = memory[k] {
            if a >= n {
                return Err(bad());
            }
        }
        let phi = deviation.transformation(game, i, &memory[..k]);
        let step: f64 = (0..n)
            .filter(|&a| phi.apply(a) == toward && Observation::of(phi, a) == memory[k])
            .map(|a| strategy.prob(i, a))
            .sum();
        w *= step;
        if w == 0.0 {
            break;
        }
    }
    Ok(w)
}

impl Deviation {
    /// The same deviation as an explicit (infoset, memory) table, covering
    /// every memory state of the right length at each of `player`'s infosets.
    pub fn materialize(&self, game: &Game, player: Player) -> BehavioralDeviation {
        let mut table = BehavioralDeviation::new();
        for &i in game.player_infosets(player) {
            let mut memories: Vec<Vec<Observation>> = vec![Vec::new()];
            for (p, _) in game.chain(i) {
                let n = game.infoset(p).num_actions();
                memories = memories
                    .into_iter()
                    .flat_map(|g| {
                        std::iter::once(Observation::Hidden).chain((0..n).map(Observation::Action)).map(move |o| {
                            let mut h = g.clone();
                            h.push(o);
                            h
                        })
                    })
                    .collect();
            }
            for g in memories {
                let phi = self.transformation(game, i, &g);
                table.set(i, g, phi);
            }
        }
        table
    }
}
