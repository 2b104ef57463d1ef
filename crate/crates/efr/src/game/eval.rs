use super::{Game, GameError, InfosetId, NodeId, NodeKind, Player, StrategyProfile};
use crate::transform::ActionTransformation;

/// A contributor to reach probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Agent {
    Player(Player),
    Chance,
}

/// Everything a full-tree pass under one profile yields: per-agent reach of
/// every node, every player's expected utility below every node, and the
/// counterfactual action values of every infoset.
#[derive(Clone, Debug, Default)]
pub struct Evaluation {
    np: usize,
    reach: Vec<f64>,
    values: Vec<f64>,
    action_values: Vec<Vec<f64>>,
}

impl Evaluation {
    pub fn compute(game: &Game, profile: &StrategyProfile) -> Self {
        let mut e = Self::default();
        e.recompute(game, profile);
        e
    }

    /// Recomputes in place, reusing buffers.
    pub fn recompute(&mut self, game: &Game, profile: &StrategyProfile) {
        let np = game.num_players();
        let nodes = game.nodes();
        let stride = np + 1;
        self.np = np;
        self.reach.clear();
        self.reach.resize(nodes.len() * stride, 1.0);
        self.values.clear();
        self.values.resize(nodes.len() * np, 0.0);
        if self.action_values.len() != game.infosets().len() {
            self.action_values = game.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect();
        } else {
            for v in &mut self.action_values {
                v.fill(0.0);
            }
        }

        for id in 1..nodes.len() {
            let p = nodes[id].parent.unwrap();
            let a = nodes[id].action_in.unwrap();
            let (head, tail) = self.reach.split_at_mut(id * stride);
            let parent = &head[p * stride..(p + 1) * stride];
            let own = &mut tail[..stride];
            own.copy_from_slice(parent);
            match &nodes[p].kind {
                NodeKind::Chance { probs, .. } => own[np] *= probs[a],
                NodeKind::Decision { player, infoset } => {
                    own[*player] *= profile.strategy(*player).prob(*infoset, a)
                }
                NodeKind::Terminal { .. } => unreachable!("terminals have no children"),
            }
        }

        for id in (0..nodes.len()).rev() {
            let node = &nodes[id];
            match &node.kind {
                NodeKind::Terminal { payoffs } => {
                    self.values[id * np..(id + 1) * np].copy_from_slice(payoffs);
                }
                NodeKind::Chance { probs, .. } => {
                    for q in 0..np {
                        let mut v = 0.0;
                        for (k, &c) in node.children.iter().enumerate() {
                            v += probs[k] * self.values[c * np + q];
                        }
                        self.values[id * np + q] = v;
                    }
                }
                NodeKind::Decision { player, infoset } => {
                    let dist = profile.strategy(*player).dist(*infoset);
                    for q in 0..np {
                        let mut v = 0.0;
                        for (k, &c) in node.children.iter().enumerate() {
                            v += dist[k] * self.values[c * np + q];
                        }
                        self.values[id * np + q] = v;
                    }
                    let r = &self.reach[id * stride..(id + 1) * stride];
                    let mut w = r[np];
                    for (q, x) in r[..np].iter().enumerate() {
                        if q != *player {
                            w *= x;
                        }
                    }
                    if w != 0.0 {
                        let av = &mut self.action_values[*infoset];
                        for (k, &c) in node.children.iter().enumerate() {
                            av[k] += w * self.values[c * np + *player];
                        }
                    }
                }
            }
        }
    }

    /// u_i(π) for every player.
    pub fn utilities(&self) -> &[f64] {
        &self.values[..self.np]
    }

    /// Expected utility of `player` from `node` onward.
    pub fn node_value(&self, node: NodeId, player: Player) -> f64 {
        self.values[node * self.np + player]
    }

    pub fn reach(&self, node: NodeId, agent: Agent) -> f64 {
        let k = match agent {
            Agent::Player(p) => p,
            Agent::Chance => self.np,
        };
        self.reach[node * (self.np + 1) + k]
    }

    /// P(h; π_{-i}) including chance.
    pub fn reach_except(&self, node: NodeId, player: Player) -> f64 {
        let r = &self.reach[node * (self.np + 1)..(node + 1) * (self.np + 1)];
        let mut w = r[self.np];
        for (q, x) in r[..self.np].iter().enumerate() {
            if q != player {
                w *= x;
            }
        }
        w
    }

    /// v_I(a; π) for each action of `infoset`.
    pub fn action_values(&self, infoset: InfosetId) -> &[f64] {
        &self.action_values[infoset]
    }

    /// v_I(σ; π) for a distribution σ over the infoset's actions.
    pub fn cf_value(&self, infoset: InfosetId, sigma: &[f64]) -> f64 {
        self.action_values[infoset].iter().zip(sigma).map(|(v, p)| v * p).sum()
    }

    /// P(h(I); π_i): the owner's reach of `infoset`.
    pub fn own_reach(&self, game: &Game, infoset: InfosetId) -> f64 {
        let info = game.infoset(infoset);
        self.reach(info.histories[0], Agent::Player(info.player))
    }
}

fn agent_factor(game: &Game, profile: &StrategyProfile, node: NodeId, action: usize, agents: &[Agent]) -> f64 {
    match &game.node(node).kind {
        NodeKind::Chance { probs, .. } if agents.contains(&Agent::Chance) => probs[action],
        NodeKind::Decision { player, infoset } if agents.contains(&Agent::Player(*player)) => {
            profile.strategy(*player).prob(*infoset, action)
        }
        _ => 1.0,
    }
}

/// P(h; π_S): product of the path probabilities contributed by `agents`.
pub fn reach_prob(
    game: &Game,
    profile: &StrategyProfile,
    history: NodeId,
    agents: &[Agent],
) -> Result<f64, GameError> {
    if history >= game.num_nodes() {
        return Err(GameError::UnknownHistory(history));
    }
    Ok(game
        .path(history)
        .into_iter()
        .map(|(n, a)| agent_factor(game, profile, n, a, agents))
        .product())
}

/// P(h, h'; π_S): probability of going from `from` to `to`; 0 unless `from`
/// is a prefix of `to`.
pub fn reach_between(
    game: &Game,
    profile: &StrategyProfile,
    from: NodeId,
    to: NodeId,
    agents: &[Agent],
) -> Result<f64, GameError> {
    if from >= game.num_nodes() {
        return Err(GameError::UnknownHistory(from));
    }
    if to >= game.num_nodes() {
        return Err(GameError::UnknownHistory(to));
    }
    let mut prob = 1.0;
    let mut cur = to;
    while cur != from {
        match (game.node(cur).parent, game.node(cur).action_in) {
            (Some(p), Some(a)) => {
                prob *= agent_factor(game, profile, p, a, agents);
                cur = p;
            }
            _ => return Ok(0.0),
        }
    }
    Ok(prob)
}

pub fn all_agents(game: &Game) -> Vec<Agent> {
    (0..game.num_players()).map(Agent::Player).chain([Agent::Chance]).collect()
}

/// Every agent except `player`.
pub fn opponents_of(game: &Game, player: Player) -> Vec<Agent> {
    (0..game.num_players())
        .filter(|&q| q != player)
        .map(Agent::Player)
        .chain([Agent::Chance])
        .collect()
}

pub fn expected_utility(game: &Game, profile: &StrategyProfile) -> Vec<f64> {
    Evaluation::compute(game, profile).utilities().to_vec()
}

fn check_action(game: &Game, infoset: InfosetId, action: usize) -> Result<(), GameError> {
    let info = game.infosets().get(infoset).ok_or(GameError::UnknownInfoset(infoset))?;
    if action >= info.num_actions() {
        return Err(GameError::IllegalAction { infoset, action });
    }
    Ok(())
}

/// v_I(a; π) = Σ_{h∈I, z} P(h; π_{-i}) P(ha, z; π) u_i(z), by direct terminal sum.
pub fn counterfactual_value(
    game: &Game,
    profile: &StrategyProfile,
    infoset: InfosetId,
    action: usize,
) -> Result<f64, GameError> {
    check_action(game, infoset, action)?;
    let info = game.infoset(infoset);
    let i = info.player;
    let everyone = all_agents(game);
    let others = opponents_of(game, i);
    let mut total = 0.0;
    for &h in &info.histories {
        let w = reach_prob(game, profile, h, &others)?;
        let child = game.node(h).children[action];
        for &z in game.terminals() {
            let p = reach_between(game, profile, child, z, &everyone)?;
            if p != 0.0 {
                total += w * p * game.payoffs(z).unwrap()[i];
            }
        }
    }
    Ok(total)
}

/// The same value via the recursion v_I(a) = r(I, a) + Σ_{I' ∈ I_i(I, a)} v_{I'}(π),
/// with r(I, a) = Σ_{z ∈ Z_i(I, a)} P(z; π_{-i}) u_i(z).
pub fn counterfactual_value_recursive(
    game: &Game,
    profile: &StrategyProfile,
    infoset: InfosetId,
    action: usize,
) -> Result<f64, GameError> {
    check_action(game, infoset, action)?;
    let info = game.infoset(infoset);
    let others = opponents_of(game, info.player);
    let mut total = 0.0;
    for &z in &info.terminals[action] {
        total += reach_prob(game, profile, z, &others)? * game.payoffs(z).unwrap()[info.player];
    }
    for &child in &info.children[action] {
        let n = game.infoset(child).num_actions();
        for b in 0..n {
            let p = profile.prob(game, child, b);
            if p != 0.0 {
                total += p * counterfactual_value_recursive(game, profile, child, b)?;
            }
        }
    }
    Ok(total)
}

/// ρ^CF_I(φ; π) = E_{a∼φ(π_i(I))} v_I(a) − E_{a∼π_i(I)} v_I(a).
pub fn immediate_cf_regret(
    game: &Game,
    profile: &StrategyProfile,
    infoset: InfosetId,
    phi: ActionTransformation,
) -> Result<f64, GameError> {
    let n = game.infosets().get(infoset).ok_or(GameError::UnknownInfoset(infoset))?.num_actions();
    if !phi.is_valid_for(n) {
        return Err(GameError::Structure(format!("transformation {phi} invalid for {n} actions")));
    }
    let values: Vec<f64> = (0..n)
        .map(|a| counterfactual_value(game, profile, infoset, a))
        .collect::<Result<_, _>>()?;
    let sigma = profile.strategy(game.infoset(infoset).player).dist(infoset);
    Ok(phi.value_gain(sigma, &values))
}
