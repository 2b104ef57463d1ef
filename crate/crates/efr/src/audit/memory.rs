use std::collections::HashMap;

use super::oracle::TerminalIndex;
use super::AuditError;
use crate::deviation::{all_pure_strategies, memory_probability, trace, Deviation, Observation};
use crate::game::{Evaluation, Game, InfosetId, Player, StrategyProfile};
use crate::transform::ActionTransformation;

/// How the re-correlation regret after (I, g) is split over successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuccessorRule {
    /// Every child infoset under every memory extension g·b, b ∈ {*} ∪ A(I).
    Generic,
    /// Only the memory extensions φ_{I,g} can produce, by transformation kind.
    Cases,
}

/// Memory-state values and regrets of one behavioral deviation against one
/// profile, for the player owning the deviation.
#[derive(Clone, Copy, Debug)]
pub struct MemoryAnalysis<'a> {
    game: &'a Game,
    player: Player,
    profile: &'a StrategyProfile,
    eval: &'a Evaluation,
    deviation: &'a Deviation,
}

impl<'a> MemoryAnalysis<'a> {
    pub fn new(
        game: &'a Game,
        player: Player,
        profile: &'a StrategyProfile,
        eval: &'a Evaluation,
        deviation: &'a Deviation,
    ) -> Result<Self, AuditError> {
        deviation.validate(game, player)?;
        Ok(Self { game, player, profile, eval, deviation })
    }

    fn cfu(&self, z: usize) -> f64 {
        self.eval.reach_except(z, self.player) * self.game.payoffs(z).expect("terminal")[self.player]
    }

    /// v̂_{I,g}(φ; π): counterfactual value at I of following φ from memory g
    /// onward, recommendations drawn from π_i.
    pub fn deviation_value(&self, infoset: InfosetId, memory: &[Observation]) -> f64 {
        let info = self.game.infoset(infoset);
        let phi = self.deviation.transformation(self.game, infoset, memory);
        let sigma = self.profile.strategy(self.player).dist(infoset);
        let mut next = memory.to_vec();
        next.push(Observation::Hidden);
        let mut total = 0.0;
        for (b, &p) in sigma.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let played = phi.apply(b);
            *next.last_mut().unwrap() = Observation::of(phi, b);
            let here: f64 = info.terminals[played].iter().map(|&z| self.cfu(z)).sum();
            let below: f64 = info.children[played].iter().map(|&c| self.deviation_value(c, &next)).sum();
            total += p * (here + below);
        }
        total
    }

    pub fn memory_probability(&self, infoset: InfosetId, memory: &[Observation]) -> Result<f64, AuditError> {
        Ok(memory_probability(self.game, self.deviation, infoset, memory, self.profile.strategy(self.player))?)
    }

    fn own_value(&self, infoset: InfosetId) -> f64 {
        self.eval.cf_value(infoset, self.profile.strategy(self.player).dist(infoset))
    }

    /// ρ_{I,g}(φ; π) = w_φ(I, g) (v̂_{I,g} − v_I(π)).
    pub fn full_regret(&self, infoset: InfosetId, memory: &[Observation]) -> Result<f64, AuditError> {
        let w = self.memory_probability(infoset, memory)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * (self.deviation_value(infoset, memory) - self.own_value(infoset)))
    }

    /// w_φ(I, g) ρ^CF_I(φ_{I,g}; π): the part of the full regret earned at I.
    pub fn immediate_regret(&self, infoset: InfosetId, memory: &[Observation]) -> Result<f64, AuditError> {
        let w = self.memory_probability(infoset, memory)?;
        let phi = self.deviation.transformation(self.game, infoset, memory);
        let sigma = self.profile.strategy(self.player).dist(infoset);
        Ok(w * phi.value_gain(sigma, self.eval.action_values(infoset)))
    }

    /// w_φ(I, g) (v̂_{I,g}(φ) − v̂_{I,g}(φ_{⪯I,⊑g})): what following φ after I
    /// adds over returning to π_i right after I.
    pub fn recorrelation_regret(&self, infoset: InfosetId, memory: &[Observation]) -> Result<f64, AuditError> {
        let w = self.memory_probability(infoset, memory)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        let phi = self.deviation.transformation(self.game, infoset, memory);
        let sigma = self.profile.strategy(self.player).dist(infoset);
        let stop_after = self.eval.cf_value(infoset, &phi.apply_dist(sigma));
        Ok(w * (self.deviation_value(infoset, memory) - stop_after))
    }

    /// The successor full regrets the re-correlation regret splits into.
    pub fn successor_terms(
        &self,
        infoset: InfosetId,
        memory: &[Observation],
        rule: SuccessorRule,
    ) -> Result<Vec<(InfosetId, Vec<Observation>, f64)>, AuditError> {
        let info = self.game.infoset(infoset);
        let n = info.num_actions();
        let mut pairs: Vec<(InfosetId, Observation)> = Vec::new();
        match rule {
            SuccessorRule::Generic => {
                for a in 0..n {
                    for &c in &info.children[a] {
                        pairs.push((c, Observation::Hidden));
                        pairs.extend((0..n).map(|b| (c, Observation::Action(b))));
                    }
                }
            }
            SuccessorRule::Cases => match self.deviation.transformation(self.game, infoset, memory) {
                ActionTransformation::Identity => {
                    for a in 0..n {
                        pairs.extend(info.children[a].iter().map(|&c| (c, Observation::Action(a))));
                    }
                }
                ActionTransformation::External { to } => {
                    pairs.extend(info.children[to].iter().map(|&c| (c, Observation::Hidden)));
                }
                ActionTransformation::Internal { from, to } => {
                    pairs.extend(info.children[to].iter().map(|&c| (c, Observation::Action(from))));
                    for a in (0..n).filter(|&a| a != from) {
                        pairs.extend(info.children[a].iter().map(|&c| (c, Observation::Action(a))));
                    }
                }
            },
        }
        pairs
            .into_iter()
            .map(|(c, b)| {
                let mut g = memory.to_vec();
                g.push(b);
                let r = self.full_regret(c, &g)?;
                Ok((c, g, r))
            })
            .collect()
    }
}

/// Largest absolute residual of each identity over every infoset of the
/// player and every memory string of the right length.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DecompositionResiduals {
    /// ρ_{I,g} against immediate regret plus the generic successor sum.
    pub lemma: f64,
    /// The case split against the generic successor sum.
    pub corollary: f64,
    /// The recursive ρ_{I,g} against pure-strategy enumeration.
    pub enumeration: f64,
    /// Σ_g ρ_{I,g} against the reach-weighted full regret ρ_I(φ).
    pub definition: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        self.lemma.max(self.corollary).max(self.enumeration).max(self.definition)
    }
}

/// Every memory string that fits `infoset`: one symbol from {*} ∪ A(I') per
/// own predecessor I'.
pub fn memory_states(game: &Game, infoset: InfosetId) -> Vec<Vec<Observation>> {
    let mut out: Vec<Vec<Observation>> = vec![Vec::new()];
    for (p, _) in game.chain(infoset) {
        let n = game.infoset(p).num_actions();
        out = out
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
    out
}

/// Checks the memory-state decomposition of `deviation`'s full regret
/// against `profile` at every (I, g) of `player`.
pub fn check_decomposition(
    game: &Game,
    player: Player,
    profile: &StrategyProfile,
    deviation: &Deviation,
    budget: f64,
) -> Result<DecompositionResiduals, AuditError> {
    let eval = Evaluation::compute(game, profile);
    let analysis = MemoryAnalysis::new(game, player, profile, &eval, deviation)?;
    let enumerated = enumerate_memory_regrets(game, player, profile, &eval, deviation, budget)?;
    let definition = super::FullRegretOracle::new(game, player, std::slice::from_ref(deviation), budget)?
        .regrets_with(profile, &eval)
        .remove(0);
    let mut out = DecompositionResiduals::default();
    for (l, &i) in game.player_infosets(player).iter().enumerate() {
        let mut by_memory = 0.0;
        for g in memory_states(game, i) {
            let full = analysis.full_regret(i, &g)?;
            by_memory += full;
            let generic: f64 = analysis.successor_terms(i, &g, SuccessorRule::Generic)?.iter().map(|t| t.2).sum();
            let cases: f64 = analysis.successor_terms(i, &g, SuccessorRule::Cases)?.iter().map(|t| t.2).sum();
            let immediate = analysis.immediate_regret(i, &g)?;
            let brute = enumerated.get(&(l, g)).copied().unwrap_or(0.0);
            out.lemma = out.lemma.max((full - immediate - generic).abs());
            out.corollary = out.corollary.max((cases - generic).abs());
            out.enumeration = out.enumeration.max((full - brute).abs());
        }
        out.definition = out.definition.max((by_memory - definition[l]).abs());
    }
    Ok(out)
}

/// ρ_{I,g} by enumeration: Σ_s π_i(s) 1{φ reaches I holding g under s}
/// (V(φ(s), I) − V(s, I)), values taken from I down whether or not reached.
/// Keyed by (local infoset, memory); absent entries are zero.
pub fn enumerate_memory_regrets(
    game: &Game,
    player: Player,
    profile: &StrategyProfile,
    eval: &Evaluation,
    deviation: &Deviation,
    budget: f64,
) -> Result<HashMap<(usize, Vec<Observation>), f64>, AuditError> {
    deviation.validate(game, player)?;
    let index = TerminalIndex::new(game, player);
    let cfu = index.cf_utilities(game, eval);
    let infosets = game.player_infosets(player);
    let own = profile.strategy(player);
    let mut out = HashMap::new();
    for s in all_pure_strategies(game, player, budget)? {
        let p: f64 = infosets.iter().zip(&s).map(|(&i, &a)| own.prob(i, a)).product();
        if p == 0.0 {
            continue;
        }
        let t = trace(game, player, deviation, &s);
        let plain: Vec<Option<usize>> = s.iter().copied().map(Some).collect();
        for (l, g) in t.memory.into_iter().enumerate() {
            if let Some(g) = g {
                let gain = index.value_below(&t.strategy, l, &cfu) - index.value_below(&plain, l, &cfu);
                *out.entry((l, g)).or_insert(0.0) += p * gain;
            }
        }
    }
    Ok(out)
}
