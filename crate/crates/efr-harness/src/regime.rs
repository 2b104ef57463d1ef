use std::time::Instant;

use efr::deviation::DeviationType;
use efr::game::{Evaluation, Game, StrategyProfile};
use efr::{EfrLearner, RmVariant};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Regime};
use crate::HarnessError;

/// One round of one pairing, for the evaluated seat.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub game: String,
    pub regime: Regime,
    pub variant: DeviationType,
    pub opponent: DeviationType,
    pub seat: usize,
    /// 1-based.
    pub round: usize,
    /// Exact expected payoff of the round's profile.
    pub payoff: f64,
    pub cum_avg_payoff: f64,
    /// Wall-clock time since the pairing started, if recorded.
    pub elapsed_ns: Option<u128>,
}

#[derive(Clone, Copy, Debug)]
struct Pairing {
    variant: DeviationType,
    opponent: DeviationType,
    seat: usize,
}

fn pairings(cfg: &ExperimentConfig) -> Vec<Pairing> {
    let seats = cfg.game.num_players();
    cfg.variants
        .iter()
        .flat_map(|&variant| {
            cfg.opponents
                .iter()
                .flat_map(move |&opponent| (0..seats).map(move |seat| Pairing { variant, opponent, seat }))
        })
        .collect()
}

fn learners(game: &Game, kind: DeviationType, rm: RmVariant) -> Result<Vec<EfrLearner<'_>>, HarnessError> {
    (0..game.num_players())
        .map(|p| {
            EfrLearner::new(game, p, kind, rm).map_err(|source| HarnessError::Learner {
                game: game.name().to_string(),
                variant: kind.token().to_string(),
                round: 0,
                source,
            })
        })
        .collect()
}

fn learner_error(game: &Game, kind: DeviationType, round: usize) -> impl FnOnce(efr::learner::LearnerError) -> HarnessError + '_ {
    move |source| HarnessError::Learner { game: game.name().to_string(), variant: kind.token().to_string(), round, source }
}

/// Runs `body` over every pairing, in parallel when allowed, and returns the
/// rows in pairing order.
fn for_pairings(
    cfg: &ExperimentConfig,
    body: impl Fn(Pairing) -> Result<Vec<ResultRow>, HarnessError> + Sync,
) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.validate()?;
    let all = pairings(cfg);
    let work = || all.par_iter().map(|&p| body(p)).collect::<Result<Vec<_>, _>>();
    let chunks = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    Ok(chunks.into_iter().flatten().collect())
}

struct Recorder<'c> {
    cfg: &'c ExperimentConfig,
    pairing: Pairing,
    started: Instant,
    total: f64,
    rows: Vec<ResultRow>,
}

impl<'c> Recorder<'c> {
    fn new(cfg: &'c ExperimentConfig, pairing: Pairing) -> Self {
        Self { cfg, pairing, started: Instant::now(), total: 0.0, rows: Vec::with_capacity(cfg.rounds) }
    }

    fn record(&mut self, round: usize, payoff: f64) {
        self.total += payoff;
        self.rows.push(ResultRow {
            game: self.cfg.game.to_string(),
            regime: self.cfg.regime,
            variant: self.pairing.variant,
            opponent: self.pairing.opponent,
            seat: self.pairing.seat,
            round,
            payoff,
            cum_avg_payoff: self.total / round as f64,
            elapsed_ns: self.cfg.record_time.then(|| self.started.elapsed().as_nanos()),
        });
    }
}

/// The evaluated variant in one seat plays its part against the opponent
/// variant's self-play sequence, which is fixed in advance and does not
/// react to it.
pub fn run_fixed_regime(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let game = cfg.game.build()?;
    let game = &game;
    for_pairings(cfg, |pairing| {
        // The opponent sequence is deterministic, so it is replayed in lockstep
        // instead of being stored: T profiles of a large game do not fit in memory.
        let mut others = learners(game, pairing.opponent, cfg.rm)?;
        let mut me = EfrLearner::new(game, pairing.seat, pairing.variant, cfg.rm)
            .map_err(learner_error(game, pairing.variant, 0))?;
        let mut rec = Recorder::new(cfg, pairing);
        let mut eval = Evaluation::default();
        for t in 1..=cfg.rounds {
            let frozen = StrategyProfile::new(game, others.iter().map(|l| l.strategy().clone()).collect())?;
            let mut played = frozen.clone();
            played.replace(me.strategy().clone());
            eval.recompute(game, &played);
            rec.record(t, eval.utilities()[pairing.seat]);
            me.observe(&eval).map_err(learner_error(game, pairing.variant, t))?;
            eval.recompute(game, &frozen);
            for l in &mut others {
                l.observe(&eval).map_err(learner_error(game, pairing.opponent, t))?;
            }
        }
        Ok(rec.rows)
    })
}

/// Every seat learns at once: the evaluated variant in one seat, the
/// opponent variant in all others. Only the evaluated seat is recorded.
pub fn run_simultaneous_regime(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let game = cfg.game.build()?;
    let game = &game;
    for_pairings(cfg, |pairing| {
        let mut seats = learners(game, pairing.opponent, cfg.rm)?;
        seats[pairing.seat] = EfrLearner::new(game, pairing.seat, pairing.variant, cfg.rm)
            .map_err(learner_error(game, pairing.variant, 0))?;
        let mut rec = Recorder::new(cfg, pairing);
        let mut eval = Evaluation::default();
        for t in 1..=cfg.rounds {
            let profile = StrategyProfile::new(game, seats.iter().map(|l| l.strategy().clone()).collect())?;
            eval.recompute(game, &profile);
            rec.record(t, eval.utilities()[pairing.seat]);
            for l in &mut seats {
                let kind = l.kind();
                l.observe(&eval).map_err(learner_error(game, kind, t))?;
            }
        }
        Ok(rec.rows)
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    match cfg.regime {
        Regime::Fixed => run_fixed_regime(cfg),
        Regime::Simultaneous => run_simultaneous_regime(cfg),
    }
}
