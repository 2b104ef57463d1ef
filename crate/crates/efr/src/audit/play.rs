use super::oracle::FullRegretOracle;
use super::AuditError;
use crate::deviation::{all_pure_strategies, apply_deviation, mixed_from_behavioral, Deviation, Reduced};
use crate::game::{expected_utility, BehavioralStrategy, Game, Player, StrategyProfile};

/// The sequence of profiles played so far.
#[derive(Clone, Debug)]
pub struct EmpiricalPlay<'g> {
    game: &'g Game,
    profiles: Vec<StrategyProfile>,
}

impl<'g> EmpiricalPlay<'g> {
    pub fn new(game: &'g Game) -> Self {
        Self { game, profiles: Vec::new() }
    }

    pub fn from_profiles(game: &'g Game, profiles: Vec<StrategyProfile>) -> Self {
        Self { game, profiles }
    }

    pub fn push(&mut self, profile: StrategyProfile) {
        self.profiles.push(profile);
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn rounds(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[StrategyProfile] {
        &self.profiles
    }

    /// μ^T(s) = (1/T) Σ_t π^t(s) over joint pure profiles, in enumeration
    /// order, zero-probability profiles dropped.
    pub fn distribution(&self, budget: f64) -> Result<Vec<(Vec<Vec<usize>>, f64)>, AuditError> {
        if self.profiles.is_empty() {
            return Err(AuditError::EmptyPlay);
        }
        let game = self.game;
        let per_player: Vec<Vec<Vec<usize>>> = (0..game.num_players())
            .map(|p| all_pure_strategies(game, p, budget))
            .collect::<Result<_, _>>()?;
        let joint: f64 = per_player.iter().map(|s| s.len() as f64).product();
        if joint * self.profiles.len() as f64 > budget {
            return Err(crate::deviation::DeviationError::Budget { needed: joint, budget }.into());
        }
        let mut out: Vec<(Vec<Vec<usize>>, f64)> = vec![(Vec::new(), 1.0)];
        for strategies in &per_player {
            out = out
                .into_iter()
                .flat_map(|(prefix, _)| {
                    strategies.iter().map(move |s| {
                        let mut q = prefix.clone();
                        q.push(s.clone());
                        (q, 0.0)
                    })
                })
                .collect();
        }
        let t = self.profiles.len() as f64;
        for (joint, mass) in &mut out {
            *mass = self
                .profiles
                .iter()
                .map(|profile| {
                    joint
                        .iter()
                        .enumerate()
                        .map(|(p, s)| pure_probability(game, profile.strategy(p), s))
                        .product::<f64>()
                })
                .sum::<f64>()
                / t;
        }
        out.retain(|(_, m)| *m > 0.0);
        Ok(out)
    }

    /// Per player, the reach-weighted average of its strategies, which plays
    /// like the uniform mixture of the rounds' strategies.
    pub fn average_profile(&self) -> Result<StrategyProfile, AuditError> {
        if self.profiles.is_empty() {
            return Err(AuditError::EmptyPlay);
        }
        let game = self.game;
        let strategies = (0..game.num_players())
            .map(|p| {
                let reach: Vec<Vec<f64>> =
                    self.profiles.iter().map(|x| crate::deviation::own_reach(game, x.strategy(p))).collect();
                BehavioralStrategy::from_fn(game, p, |i| {
                    let n = game.infoset(i).num_actions();
                    let den: f64 = reach.iter().map(|r| r[i]).sum();
                    if den == 0.0 {
                        return vec![1.0 / n as f64; n];
                    }
                    (0..n)
                        .map(|a| {
                            self.profiles.iter().zip(&reach).map(|(x, r)| r[i] * x.strategy(p).prob(i, a)).sum::<f64>()
                                / den
                        })
                        .collect()
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StrategyProfile::new(game, strategies)?)
    }
}

fn pure_probability(game: &Game, strategy: &BehavioralStrategy, s: &[usize]) -> f64 {
    game.player_infosets(strategy.player()).iter().zip(s).map(|(&i, &a)| strategy.prob(i, a)).product()
}

/// A pure or reduced strategy as a behavioral one; unreachable infosets get
/// their first action, which cannot matter.
pub(super) fn reduced_to_behavioral(game: &Game, player: Player, x: &Reduced) -> BehavioralStrategy {
    let plan: Vec<usize> = x.iter().map(|a| a.unwrap_or(0)).collect();
    BehavioralStrategy::pure(game, player, &plan)
}

/// The observable sequential rationality gap of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct OsrGap {
    /// Per local infoset: max over Φ of the positive part of the average full regret.
    pub per_infoset: Vec<f64>,
    pub max: f64,
}

/// max over φ ∈ Φ and infosets I of ((1/T) Σ_t ρ_I(φ; π^t))^+.
pub fn osr_gap(
    play: &EmpiricalPlay<'_>,
    player: Player,
    deviations: &[Deviation],
    budget: f64,
) -> Result<OsrGap, AuditError> {
    if play.rounds() == 0 {
        return Err(AuditError::EmptyPlay);
    }
    let game = play.game();
    let n = game.player_infosets(player).len();
    let oracle = FullRegretOracle::new(game, player, deviations, budget)?;
    let mut sums = vec![vec![0.0; n]; deviations.len()];
    for profile in play.profiles() {
        for (acc, r) in sums.iter_mut().zip(oracle.regrets(profile)) {
            for (a, x) in acc.iter_mut().zip(r) {
                *a += x;
            }
        }
    }
    let t = play.rounds() as f64;
    let per_infoset: Vec<f64> =
        (0..n).map(|l| sums.iter().map(|row| (row[l] / t).max(0.0)).fold(0.0, f64::max)).collect();
    let max = per_infoset.iter().copied().fold(0.0, f64::max);
    Ok(OsrGap { per_infoset, max })
}

/// Average regret of one deviation, computed both as E_{s∼μ^T}[ρ(φ; s)] and
/// as (1/T) Σ_t ρ(φ; π^t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Incentive {
    pub via_distribution: f64,
    pub via_rounds: f64,
}

impl Incentive {
    pub fn value(&self) -> f64 {
        self.via_rounds
    }

    pub fn discrepancy(&self) -> f64 {
        (self.via_distribution - self.via_rounds).abs()
    }
}

/// Tolerance, relative to the payoff bound, for the two computations to agree.
pub const INCENTIVE_TOLERANCE: f64 = 1e-9;

pub fn deviation_incentive(
    play: &EmpiricalPlay<'_>,
    player: Player,
    deviation: &Deviation,
    budget: f64,
) -> Result<Incentive, AuditError> {
    let game = play.game();
    deviation.validate(game, player)?;
    let utility = |profile: &StrategyProfile, x: &Reduced| {
        let mut deviated = profile.clone();
        deviated.replace(reduced_to_behavioral(game, player, x));
        expected_utility(game, &deviated)[player]
    };

    let mut via_rounds = 0.0;
    for profile in play.profiles() {
        let base = expected_utility(game, profile)[player];
        for (s, p) in mixed_from_behavioral(game, profile.strategy(player), budget)? {
            if p != 0.0 {
                via_rounds += p * (utility(profile, &apply_deviation(game, player, deviation, &s)?) - base);
            }
        }
    }
    via_rounds /= play.rounds() as f64;

    let mut via_distribution = 0.0;
    for (joint, mass) in play.distribution(budget)? {
        let strategies: Vec<BehavioralStrategy> =
            joint.iter().enumerate().map(|(p, s)| BehavioralStrategy::pure(game, p, s)).collect();
        let pure = StrategyProfile::new(game, strategies)?;
        let image = apply_deviation(game, player, deviation, &joint[player])?;
        via_distribution += mass * (utility(&pure, &image) - expected_utility(game, &pure)[player]);
    }

    let out = Incentive { via_distribution, via_rounds };
    if out.discrepancy() > INCENTIVE_TOLERANCE * game.utility_bound().max(1.0) {
        return Err(AuditError::Inconsistent(format!(
            "average regret {via_rounds} per round but {via_distribution} under the empirical distribution"
        )));
    }
    Ok(out)
}
