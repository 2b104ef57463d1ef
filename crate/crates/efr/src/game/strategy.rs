use super::{Game, GameError, InfosetId, Player};

/// Drift below this is silently renormalized; above [`HARD_TOLERANCE`] it is an error.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-12;
pub const HARD_TOLERANCE: f64 = 1e-6;

/// Per-infoset action distributions for one player, indexed by global infoset
/// id (other players' infosets hold empty vectors).
#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralStrategy {
    player: Player,
    dists: Vec<Vec<f64>>,
}

impl BehavioralStrategy {
    pub fn uniform(game: &Game, player: Player) -> Self {
        let mut dists = vec![Vec::new(); game.infosets().len()];
        for &i in game.player_infosets(player) {
            let n = game.infoset(i).num_actions();
            dists[i] = vec![1.0 / n as f64; n];
        }
        Self { player, dists }
    }

    /// Builds a strategy from `f(infoset) -> distribution`, validating each.
    pub fn from_fn(
        game: &Game,
        player: Player,
        mut f: impl FnMut(InfosetId) -> Vec<f64>,
    ) -> Result<Self, GameError> {
        let mut s = Self::uniform(game, player);
        for &i in game.player_infosets(player) {
            s.set(i, f(i))?;
        }
        Ok(s)
    }

    /// Point mass on `actions[k]` at the player's k-th infoset.
    pub fn pure(game: &Game, player: Player, actions: &[usize]) -> Self {
        let mut s = Self::uniform(game, player);
        for (k, &i) in game.player_infosets(player).iter().enumerate() {
            let d = &mut s.dists[i];
            d.fill(0.0);
            d[actions[k]] = 1.0;
        }
        s
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn dist(&self, infoset: InfosetId) -> &[f64] {
        &self.dists[infoset]
    }

    pub fn prob(&self, infoset: InfosetId, action: usize) -> f64 {
        self.dists[infoset][action]
    }

    /// Replaces one distribution after checking it is on the simplex.
    pub fn set(&mut self, infoset: InfosetId, mut dist: Vec<f64>) -> Result<(), GameError> {
        let slot = &self.dists[infoset];
        if slot.len() != dist.len() || slot.is_empty() {
            return Err(GameError::Strategy(format!(
                "infoset {infoset}: expected {} probabilities, got {}",
                slot.len(),
                dist.len()
            )));
        }
        normalize(&mut dist).map_err(|e| GameError::Strategy(format!("infoset {infoset}: {e}")))?;
        self.dists[infoset] = dist;
        Ok(())
    }

    /// Replaces one distribution without validation.
    pub fn set_unchecked(&mut self, infoset: InfosetId, dist: &[f64]) {
        self.dists[infoset].copy_from_slice(dist);
    }
}

/// Validates a distribution, renormalizing small drift in place.
pub fn normalize(dist: &mut [f64]) -> Result<(), String> {
    if dist.iter().any(|p| !p.is_finite() || *p < -HARD_TOLERANCE) {
        return Err(format!("invalid probabilities {dist:?}"));
    }
    let total: f64 = dist.iter().sum();
    let drift = (total - 1.0).abs();
    if drift > HARD_TOLERANCE {
        return Err(format!("probabilities sum to {total}"));
    }
    if drift > RENORMALIZE_TOLERANCE || dist.iter().any(|p| *p < 0.0) {
        for p in dist.iter_mut() {
            *p = p.max(0.0);
        }
        let total: f64 = dist.iter().sum();
        for p in dist.iter_mut() {
            *p /= total;
        }
    }
    Ok(())
}

/// One behavioral strategy per player; the chance policy lives in the game.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile {
    strategies: Vec<BehavioralStrategy>,
}

impl StrategyProfile {
    pub fn new(game: &Game, strategies: Vec<BehavioralStrategy>) -> Result<Self, GameError> {
        if strategies.len() != game.num_players() {
            return Err(GameError::Strategy(format!(
                "{} strategies for {} players",
                strategies.len(),
                game.num_players()
            )));
        }
        for (p, s) in strategies.iter().enumerate() {
            if s.player != p || s.dists.len() != game.infosets().len() {
                return Err(GameError::Strategy(format!("strategy {p} does not belong to seat {p}")));
            }
        }
        Ok(Self { strategies })
    }

    pub fn uniform(game: &Game) -> Self {
        Self {
            strategies: (0..game.num_players()).map(|p| BehavioralStrategy::uniform(game, p)).collect(),
        }
    }

    pub fn strategy(&self, player: Player) -> &BehavioralStrategy {
        &self.strategies[player]
    }

    pub fn strategy_mut(&mut self, player: Player) -> &mut BehavioralStrategy {
        &mut self.strategies[player]
    }

    pub fn replace(&mut self, strategy: BehavioralStrategy) {
        let p = strategy.player;
        self.strategies[p] = strategy;
    }

    pub fn strategies(&self) -> &[BehavioralStrategy] {
        &self.strategies
    }

    /// π(a | I) for whichever player owns `infoset`.
    pub fn prob(&self, game: &Game, infoset: InfosetId, action: usize) -> f64 {
        self.strategies[game.infoset(infoset).player].prob(infoset, action)
    }
}
