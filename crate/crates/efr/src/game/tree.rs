use std::collections::HashMap;

use super::GameError;

pub type NodeId = usize;
pub type InfosetId = usize;
pub type Player = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Chance { outcomes: Vec<String>, probs: Vec<f64> },
    Decision { player: Player, infoset: InfosetId },
    Terminal { payoffs: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Index of the parent's action leading here.
    pub action_in: Option<usize>,
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }
}

/// An information set together with its place in the owner's forest.
#[derive(Clone, Debug)]
pub struct InfoSet {
    pub id: InfosetId,
    pub player: Player,
    pub key: String,
    pub actions: Vec<String>,
    pub histories: Vec<NodeId>,
    /// Number of the owner's infosets strictly above this one.
    pub depth: usize,
    pub parent: Option<(InfosetId, usize)>,
    /// `children[a]`: the owner's next infosets after playing `a` here.
    pub children: Vec<Vec<InfosetId>>,
    /// `terminals[a]`: terminals reached after `a` with no further own decision.
    pub terminals: Vec<Vec<NodeId>>,
}

impl InfoSet {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Explicit extensive-form game tree.
///
/// Node ids are assigned parent-first, so increasing id order is a
/// topological order and decreasing order visits children before parents.
/// Infoset ids are likewise parents-first (stable by construction order).
#[derive(Clone, Debug)]
pub struct Game {
    name: String,
    num_players: usize,
    nodes: Vec<Node>,
    infosets: Vec<InfoSet>,
    by_player: Vec<Vec<InfosetId>>,
    /// Position of each infoset within its owner's `by_player` list.
    local: Vec<usize>,
    terminals: Vec<NodeId>,
    utility_bound: f64,
    /// Per node and player: the player's last (infoset, action) on the path.
    last_own: Vec<Option<(InfosetId, usize)>>,
    recall_violations: Vec<String>,
}

impl Game {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &InfoSet {
        &self.infosets[id]
    }

    /// The player's infosets, parents before children.
    pub fn player_infosets(&self, player: Player) -> &[InfosetId] {
        &self.by_player[player]
    }

    /// Index of `infoset` within [`Game::player_infosets`] of its owner.
    pub fn local_index(&self, infoset: InfosetId) -> usize {
        self.local[infoset]
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn utility_bound(&self) -> f64 {
        self.utility_bound
    }

    pub fn payoffs(&self, z: NodeId) -> Option<&[f64]> {
        match &self.nodes[z].kind {
            NodeKind::Terminal { payoffs } => Some(payoffs),
            _ => None,
        }
    }

    /// The last (infoset, action) of `player` on the path to `node`.
    pub fn last_own(&self, node: NodeId, player: Player) -> Option<(InfosetId, usize)> {
        self.last_own[node * self.num_players + player]
    }

    /// Maximum infoset depth of `player`.
    pub fn max_depth(&self, player: Player) -> usize {
        self.by_player[player].iter().map(|&i| self.infosets[i].depth).max().unwrap_or(0)
    }

    pub fn max_actions(&self, player: Player) -> usize {
        self.by_player[player]
            .iter()
            .map(|&i| self.infosets[i].num_actions())
            .max()
            .unwrap_or(0)
    }

    /// Own predecessors of `infoset` from the forest root down, each with the
    /// action leading toward `infoset`.
    pub fn chain(&self, infoset: InfosetId) -> Vec<(InfosetId, usize)> {
        let mut out = Vec::with_capacity(self.infosets[infoset].depth);
        let mut cur = self.infosets[infoset].parent;
        while let Some((i, a)) = cur {
            out.push((i, a));
            cur = self.infosets[i].parent;
        }
        out.reverse();
        out
    }

    /// Whether `a` is a (weak) predecessor of `b` in the owner's forest.
    pub fn precedes_or_eq(&self, a: InfosetId, b: InfosetId) -> bool {
        if self.infosets[a].player != self.infosets[b].player {
            return false;
        }
        let mut cur = Some(b);
        while let Some(i) = cur {
            if i == a {
                return true;
            }
            cur = self.infosets[i].parent.map(|(p, _)| p);
        }
        false
    }

    /// Action at ancestor `at` leading toward descendant `target`, if `at`
    /// strictly precedes `target`.
    pub fn action_toward(&self, at: InfosetId, target: InfosetId) -> Option<usize> {
        let mut cur = target;
        while let Some((p, a)) = self.infosets[cur].parent {
            if p == at {
                return Some(a);
            }
            cur = p;
        }
        None
    }

    /// The actions on the path from the root to `node`, as (node, action) pairs.
    pub fn path(&self, node: NodeId) -> Vec<(NodeId, usize)> {
        let mut out = Vec::new();
        let mut cur = node;
        while let (Some(p), Some(a)) = (self.nodes[cur].parent, self.nodes[cur].action_in) {
            out.push((p, a));
            cur = p;
        }
        out.reverse();
        out
    }

    /// Diagnostics recorded when the game was built without enforcing recall.
    pub fn recall_violations(&self) -> &[String] {
        &self.recall_violations
    }

    pub fn action_label(&self, node: NodeId, action: usize) -> &str {
        match &self.nodes[node].kind {
            NodeKind::Chance { outcomes, .. } => &outcomes[action],
            NodeKind::Decision { infoset, .. } => &self.infosets[*infoset].actions[action],
            NodeKind::Terminal { .. } => "",
        }
    }
}

/// Incremental construction of a [`Game`]; parents must be added before
/// their children.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    name: String,
    num_players: usize,
    nodes: Vec<Node>,
    slots: Vec<Vec<Option<NodeId>>>,
    infosets: Vec<InfoSet>,
    keys: HashMap<(Player, String), InfosetId>,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>, num_players: usize) -> Self {
        Self {
            name: name.into(),
            num_players,
            nodes: Vec::new(),
            slots: Vec::new(),
            infosets: Vec::new(),
            keys: HashMap::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn attach(&mut self, parent: Option<(NodeId, usize)>, kind: NodeKind, arity: usize) -> Result<NodeId, GameError> {
        let id = self.nodes.len();
        match parent {
            None if id != 0 => return Err(GameError::Structure("only the first node may be the root".into())),
            Some(_) if id == 0 => return Err(GameError::Structure("the first node must be the root".into())),
            Some((p, a)) => {
                let slot = self
                    .slots
                    .get_mut(p)
                    .and_then(|s| s.get_mut(a))
                    .ok_or_else(|| GameError::Structure(format!("node {p} has no action {a}")))?;
                if slot.is_some() {
                    return Err(GameError::Structure(format!("action {a} of node {p} already has a child")));
                }
                *slot = Some(id);
            }
            None => {}
        }
        self.nodes.push(Node {
            parent: parent.map(|(p, _)| p),
            action_in: parent.map(|(_, a)| a),
            kind,
            children: Vec::new(),
        });
        self.slots.push(vec![None; arity]);
        Ok(id)
    }

    pub fn chance(
        &mut self,
        parent: Option<(NodeId, usize)>,
        outcomes: Vec<(String, f64)>,
    ) -> Result<NodeId, GameError> {
        if outcomes.is_empty() {
            return Err(GameError::Structure("chance node without outcomes".into()));
        }
        let total: f64 = outcomes.iter().map(|o| o.1).sum();
        if (total - 1.0).abs() > 1e-9 || outcomes.iter().any(|o| !(o.1 >= 0.0)) {
            return Err(GameError::Structure(format!("chance probabilities sum to {total}")));
        }
        let n = outcomes.len();
        let (labels, probs): (Vec<String>, Vec<f64>) = outcomes.into_iter().unzip();
        if has_duplicates(&labels) {
            return Err(GameError::Structure("chance node repeats an outcome label".into()));
        }
        self.attach(parent, NodeKind::Chance { outcomes: labels, probs }, n)
    }

    pub fn decision<S: AsRef<str>>(
        &mut self,
        parent: Option<(NodeId, usize)>,
        player: Player,
        key: &str,
        actions: &[S],
    ) -> Result<NodeId, GameError> {
        if player >= self.num_players {
            return Err(GameError::Structure(format!("player {player} out of range")));
        }
        if actions.is_empty() {
            return Err(GameError::Structure(format!("infoset {key:?} has no actions")));
        }
        let labels: Vec<String> = actions.iter().map(|a| a.as_ref().to_string()).collect();
        if has_duplicates(&labels) {
            return Err(GameError::Structure(format!("infoset {key:?} repeats an action label")));
        }
        let infoset = match self.keys.get(&(player, key.to_string())) {
            Some(&i) => {
                if self.infosets[i].actions != labels {
                    return Err(GameError::Structure(format!(
                        "infoset {key:?} of player {player} has inconsistent actions"
                    )));
                }
                i
            }
            None => {
                let i = self.infosets.len();
                self.infosets.push(InfoSet {
                    id: i,
                    player,
                    key: key.to_string(),
                    actions: labels.clone(),
                    histories: Vec::new(),
                    depth: 0,
                    parent: None,
                    children: vec![Vec::new(); labels.len()],
                    terminals: vec![Vec::new(); labels.len()],
                });
                self.keys.insert((player, key.to_string()), i);
                i
            }
        };
        let id = self.attach(parent, NodeKind::Decision { player, infoset }, labels.len())?;
        self.infosets[infoset].histories.push(id);
        Ok(id)
    }

    pub fn terminal(&mut self, parent: Option<(NodeId, usize)>, payoffs: Vec<f64>) -> Result<NodeId, GameError> {
        if payoffs.len() != self.num_players {
            return Err(GameError::Structure(format!(
                "terminal has {} payoffs for {} players",
                payoffs.len(),
                self.num_players
            )));
        }
        if payoffs.iter().any(|u| !u.is_finite()) {
            return Err(GameError::Structure("non-finite payoff".into()));
        }
        self.attach(parent, NodeKind::Terminal { payoffs }, 0)
    }

    /// Builds the game, rejecting it if any player has imperfect recall.
    pub fn build(self) -> Result<Game, GameError> {
        let game = self.build_unchecked()?;
        if game.recall_violations.is_empty() {
            Ok(game)
        } else {
            Err(GameError::ImperfectRecall(game.recall_violations.clone()))
        }
    }

    /// Builds the game; recall violations are recorded instead of rejected,
    /// and forest metadata follows the first history of each infoset.
    pub fn build_unchecked(mut self) -> Result<Game, GameError> {
        if self.nodes.is_empty() {
            return Err(GameError::Structure("empty game".into()));
        }
        for (id, slots) in self.slots.iter().enumerate() {
            let mut children = Vec::with_capacity(slots.len());
            for (a, s) in slots.iter().enumerate() {
                children.push(s.ok_or_else(|| GameError::Structure(format!("node {id} is missing child {a}")))?);
            }
            self.nodes[id].children = children;
        }
        let np = self.num_players;
        let mut last_own: Vec<Option<(InfosetId, usize)>> = vec![None; self.nodes.len() * np];
        for id in 1..self.nodes.len() {
            let p = self.nodes[id].parent.expect("non-root node has a parent");
            let a = self.nodes[id].action_in.expect("non-root node has an action");
            for q in 0..np {
                last_own[id * np + q] = last_own[p * np + q];
            }
            if let NodeKind::Decision { player, infoset } = self.nodes[p].kind {
                last_own[id * np + player] = Some((infoset, a));
            }
        }

        let mut violations = Vec::new();
        for info in &self.infosets {
            let first = info.histories[0];
            let expect = last_own[first * np + info.player];
            for &h in &info.histories[1..] {
                if last_own[h * np + info.player] != expect {
                    violations.push(format!(
                        "player {} infoset {:?}: histories {} and {} differ in own (infoset, action) sequence",
                        info.player, info.key, first, h
                    ));
                    break;
                }
            }
        }

        for i in 0..self.infosets.len() {
            let first = self.infosets[i].histories[0];
            let parent = last_own[first * np + self.infosets[i].player];
            self.infosets[i].parent = parent;
            if let Some((p, a)) = parent {
                debug_assert!(p < i, "infoset parents are created first");
                self.infosets[i].depth = self.infosets[p].depth + 1;
                self.infosets[p].children[a].push(i);
            }
        }

        let mut terminals = Vec::new();
        let mut bound: f64 = 0.0;
        for (id, node) in self.nodes.iter().enumerate() {
            if let NodeKind::Terminal { payoffs } = &node.kind {
                terminals.push(id);
                for (q, u) in payoffs.iter().enumerate() {
                    bound = bound.max(u.abs());
                    if let Some((i, a)) = last_own[id * np + q] {
                        self.infosets[i].terminals[a].push(id);
                    }
                }
            }
        }

        let mut by_player = vec![Vec::new(); np];
        let mut local = vec![0; self.infosets.len()];
        for info in &self.infosets {
            local[info.id] = by_player[info.player].len();
            by_player[info.player].push(info.id);
        }

        Ok(Game {
            name: self.name,
            num_players: np,
            nodes: self.nodes,
            infosets: self.infosets,
            by_player,
            local,
            terminals,
            utility_bound: bound,
            last_own,
            recall_violations: violations,
        })
    }
}

fn has_duplicates(labels: &[String]) -> bool {
    labels.iter().enumerate().any(|(i, l)| labels[..i].contains(l))
}

/// Exhaustive perfect-recall check: every pair of histories in an infoset
/// must share the owner's full (infoset, action) sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RecallReport {
    pub perfect_recall: bool,
    pub diagnostics: Vec<String>,
}

pub fn validate_perfect_recall(game: &Game) -> RecallReport {
    let own_sequence = |h: NodeId, player: Player| -> Vec<(InfosetId, usize)> {
        game.path(h)
            .into_iter()
            .filter_map(|(n, a)| match game.node(n).kind {
                NodeKind::Decision { player: q, infoset } if q == player => Some((infoset, a)),
                _ => None,
            })
            .collect()
    };
    let mut diagnostics = Vec::new();
    for info in game.infosets() {
        let seqs: Vec<_> = info.histories.iter().map(|&h| own_sequence(h, info.player)).collect();
        'pairs: for x in 0..seqs.len() {
            for y in x + 1..seqs.len() {
                if seqs[x] != seqs[y] {
                    diagnostics.push(format!(
                        "player {} infoset {:?}: histories {} and {} differ in own (infoset, action) sequence",
                        info.player, info.key, info.histories[x], info.histories[y]
                    ));
                    break 'pairs;
                }
            }
        }
    }
    RecallReport { perfect_recall: diagnostics.is_empty(), diagnostics }
}
