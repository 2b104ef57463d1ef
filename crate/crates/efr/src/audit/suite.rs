use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::memory::check_decomposition;
use super::play::{deviation_incentive, osr_gap, EmpiricalPlay};
use super::random::{random_behavioral_deviation, random_profile};
use super::{AuditError, FullRegretOracle};
use crate::deviation::{
    count_deviations, distinct_maps, enumerate_family, max_keys, DeviationFamily, DeviationType, DEFAULT_BUDGET,
};
use crate::game::{Evaluation, Game, StrategyProfile};
use crate::learner::{EfrLearner, RmVariant};

/// The deviation types whose bound the audit measures.
pub const BOUND_TYPES: [DeviationType; 9] = [
    DeviationType::BlindCf,
    DeviationType::InformedCf,
    DeviationType::BlindAction,
    DeviationType::InformedAction,
    DeviationType::Bps,
    DeviationType::Cfps,
    DeviationType::Csps,
    DeviationType::Tips,
    DeviationType::Behavioral,
];

#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub seed: u64,
    /// Random (deviation, profile) pairs for the decomposition check.
    pub pairs: usize,
    /// Self-play rounds for the regret-bound check.
    pub rounds: usize,
    pub budget: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { seed: 7, pairs: 50, rounds: 1000, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Could not be measured within the enumeration budget.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug)]
pub struct AuditCheck {
    pub property: String,
    pub status: Status,
    pub detail: String,
}

impl AuditCheck {
    fn new(property: impl Into<String>, passed: bool, detail: String) -> Self {
        let status = if passed { Status::Pass } else { Status::Fail };
        Self { property: property.into(), status, detail }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Plays `rounds` rounds of EFR self-play with every seat using `kind`,
/// handing each round's profile to `visit` before the learners update.
pub fn self_play(
    game: &Game,
    kind: DeviationType,
    variant: RmVariant,
    rounds: usize,
    mut visit: impl FnMut(usize, &StrategyProfile, &Evaluation),
) -> Result<Vec<EfrLearner<'_>>, AuditError> {
    let mut learners: Vec<EfrLearner<'_>> = (0..game.num_players())
        .map(|p| EfrLearner::new(game, p, kind, variant))
        .collect::<Result<_, _>>()?;
    let mut eval = Evaluation::default();
    for t in 0..rounds {
        let profile = StrategyProfile::new(game, learners.iter().map(|l| l.strategy().clone()).collect())?;
        eval.recompute(game, &profile);
        visit(t, &profile, &eval);
        for l in &mut learners {
            l.observe(&eval)?;
        }
    }
    Ok(learners)
}

/// Cumulative full regret of a type's EFR self-play against the type's own
/// deviation family, for one player.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub kind: DeviationType,
    pub player: usize,
    pub deviations: usize,
    /// max over φ and I of the cumulative full regret after all rounds.
    pub max_cumulative: f64,
    pub bound: f64,
    /// max over φ and I of the positive average full regret after `early_round` rounds.
    pub early_gap: f64,
    pub early_round: usize,
    pub final_gap: f64,
}

impl BoundReport {
    pub fn within_bound(&self) -> bool {
        self.max_cumulative <= self.bound
    }

    /// The final gap is at most a quarter of the early one.
    pub fn decays(&self) -> bool {
        self.final_gap <= 0.25 * self.early_gap
    }
}

/// Runs self-play with `kind` and measures every player's full regret
/// against the type's family with the enumeration oracle.
pub fn regret_bound_audit(
    game: &Game,
    kind: DeviationType,
    rounds: usize,
    early_round: usize,
    budget: f64,
) -> Result<Vec<BoundReport>, AuditError> {
    let family = kind.family().ok_or_else(|| AuditError::Unsupported(format!("{kind} has no deviation family")))?;
    let oracles: Vec<FullRegretOracle<'_>> = (0..game.num_players())
        .map(|p| {
            let devs = enumerate_family(game, p, family, budget)?;
            let devs: Vec<_> = distinct_maps(game, p, devs, budget)?.into_iter().map(|m| m.deviation).collect();
            FullRegretOracle::new(game, p, &devs, budget)
        })
        .collect::<Result<_, AuditError>>()?;
    let mut sums: Vec<Vec<Vec<f64>>> = oracles
        .iter()
        .enumerate()
        .map(|(p, o)| vec![vec![0.0; game.player_infosets(p).len()]; o.num_deviations()])
        .collect();
    let gap = |sums: &Vec<Vec<f64>>, t: usize| {
        sums.iter().flatten().fold(0.0_f64, |m, &x| m.max(x)).max(0.0) / t as f64
    };
    let mut early = vec![0.0; oracles.len()];
    self_play(game, kind, RmVariant::Rm, rounds, |t, profile, eval| {
        for (p, oracle) in oracles.iter().enumerate() {
            for (acc, r) in sums[p].iter_mut().zip(oracle.regrets_with(profile, eval)) {
                for (a, x) in acc.iter_mut().zip(r) {
                    *a += x;
                }
            }
            if t + 1 == early_round {
                early[p] = gap(&sums[p], early_round);
            }
        }
    })?;
    Ok(oracles
        .iter()
        .enumerate()
        .map(|(p, o)| {
            let max_cumulative = sums[p].iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            BoundReport {
                kind,
                player: p,
                deviations: o.num_deviations(),
                max_cumulative,
                bound: kind.regret_bound(game, p, rounds),
                early_gap: early[p],
                early_round,
                final_gap: gap(&sums[p], rounds),
            }
        })
        .collect())
}

/// Runs every audit property that fits the enumeration budget on `game`.
pub fn run_audit(game: &Game, options: &AuditOptions) -> Result<Vec<AuditCheck>, AuditError> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let u = game.utility_bound().max(1.0);

    let mut worst = 0.0_f64;
    for k in 0..options.pairs {
        let player = k % game.num_players();
        let deviation = random_behavioral_deviation(game, player, &mut rng);
        let profile = random_profile(game, &mut rng);
        worst = worst.max(check_decomposition(game, player, &profile, &deviation, options.budget)?.max());
    }
    out.push(AuditCheck::new(
        "memory-state decomposition",
        worst <= 1e-10 * u,
        format!("{} pairs, max residual {worst:.3e}", options.pairs),
    ));

    let play = EmpiricalPlay::from_profiles(game, (0..10).map(|_| random_profile(game, &mut rng)).collect());
    let mass: f64 = play.distribution(options.budget)?.iter().map(|x| x.1).sum();
    let deviation = random_behavioral_deviation(game, 0, &mut rng);
    let incentive = deviation_incentive(&play, 0, &deviation, options.budget);
    let ok = (mass - 1.0).abs() <= 1e-9 && incentive.is_ok();
    let detail = match &incentive {
        Ok(x) => format!("mass {mass:.12}, paths differ by {:.3e}", x.discrepancy()),
        Err(e) => format!("mass {mass:.12}, {e}"),
    };
    out.push(AuditCheck::new("empirical distribution of play", ok, detail));

    for p in 0..game.num_players() {
        for family in DeviationFamily::ALL {
            let name = format!("deviation count bound: {family}, player {p}");
            match count_deviations(game, p, family, options.budget) {
                Ok(n) => {
                    let bound = family.bounds_for(game, p).deviations;
                    out.push(AuditCheck::new(name, n as f64 <= bound, format!("{n} deviations, bound {bound}")));
                }
                Err(e) => out.push(AuditCheck { property: name, status: Status::Skipped, detail: e.to_string() }),
            }
        }
    }
    for kind in DeviationType::ALL {
        let measured = (0..game.num_players()).map(|p| max_keys(game, p, kind)).max().unwrap_or(0);
        let table = kind.game_constants(game).max_keys;
        out.push(AuditCheck::new(
            format!("time-selection key maximum: {kind}"),
            measured as f64 == table,
            format!("{measured} keys, table {table}"),
        ));
    }

    for kind in BOUND_TYPES {
        let name = format!("regret bound: {kind}");
        match regret_bound_audit(game, kind, options.rounds, 10.min(options.rounds), options.budget) {
            Ok(reports) => {
                let ok = reports.iter().all(|r| r.within_bound() && r.decays());
                let detail = reports
                    .iter()
                    .map(|r| {
                        format!(
                            "p{}: {:.3} <= {:.1}, gap {:.4} -> {:.4}",
                            r.player, r.max_cumulative, r.bound, r.early_gap, r.final_gap
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("; ");
                out.push(AuditCheck::new(name, ok, detail));
            }
            Err(e) => out.push(AuditCheck { property: name, status: Status::Skipped, detail: e.to_string() }),
        }
    }

    // Elevation: EFR(BPS) self-play against every blind causal deviation.
    let mut play = EmpiricalPlay::new(game);
    let rounds = options.rounds.max(1);
    self_play(game, DeviationType::Bps, RmVariant::Rm, rounds, |_, profile, _| play.push(profile.clone()))?;
    for p in 0..game.num_players() {
        let name = format!("single-target elevation: bps vs blind causal, player {p}");
        let devs = enumerate_family(game, p, DeviationFamily::BlindCausal, options.budget)
            .and_then(|d| distinct_maps(game, p, d, options.budget));
        match devs {
            Ok(devs) => {
                let devs: Vec<_> = devs.into_iter().map(|m| m.deviation).collect();
                let gap = osr_gap(&play, p, &devs, options.budget)?.max;
                let elevated =
                    game.player_infosets(p).len() as f64 * DeviationType::Bps.regret_bound(game, p, rounds) / rounds as f64;
                out.push(AuditCheck::new(name, gap <= elevated, format!("gap {gap:.4}, bound {elevated:.3}")));
            }
            Err(e) => out.push(AuditCheck { property: name, status: Status::Skipped, detail: e.to_string() }),
        }
    }
    Ok(out)
}
