use std::fmt;
use std::str::FromStr;

use crate::game::{Game, GameBuilder, GameError, NodeId};

/// Order in which point cards are revealed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointOrder {
    Ascending,
    Descending,
    /// Each round's point card is dealt uniformly by chance from the rest.
    Random,
}

impl FromStr for PointOrder {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asc" | "ascending" | "up" => Ok(Self::Ascending),
            "desc" | "descending" | "down" => Ok(Self::Descending),
            "random" | "rand" | "R" => Ok(Self::Random),
            other => Err(GameError::Structure(format!("invalid point order {other:?} (asc|desc|random)"))),
        }
    }
}

impl fmt::Display for PointOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ascending => "asc",
            Self::Descending => "desc",
            Self::Random => "random",
        })
    }
}

/// Imperfect-information goofspiel. Each player holds bid cards `1..=n`.
/// Every round a point card is revealed, players bid simultaneously (encoded
/// as sequential moves hidden by infosets), and the sole highest bid wins the
/// point card; on a tie for highest it is discarded. Players see their own
/// bids, the point cards and each round's winner, never the others' bids.
/// The last round is forced and resolved without a decision.
pub fn build_goofspiel(n_ranks: usize, order: PointOrder, n_players: usize) -> Result<Game, GameError> {
    if n_ranks < 2 {
        return Err(GameError::Structure("goofspiel needs at least two ranks".into()));
    }
    if !(2..=3).contains(&n_players) {
        return Err(GameError::Structure("goofspiel supports two or three players".into()));
    }
    let name = format!("goofspiel({n_ranks},{order},{n_players})");
    let mut b = GameBuilder::new(name, n_players);
    let state = State {
        order,
        hands: vec![(1..=n_ranks).collect(); n_players],
        points: (1..=n_ranks).collect(),
        scores: vec![0; n_players],
        views: vec![String::new(); n_players],
        bids: Vec::new(),
        card: None,
    };
    start_round(&mut b, None, state)?;
    b.build()
}

#[derive(Clone)]
struct State {
    order: PointOrder,
    hands: Vec<Vec<usize>>,
    /// Point cards not yet revealed.
    points: Vec<usize>,
    scores: Vec<usize>,
    /// Per player: private observation string so far.
    views: Vec<String>,
    bids: Vec<usize>,
    card: Option<usize>,
}

fn start_round(b: &mut GameBuilder, at: Option<(NodeId, usize)>, state: State) -> Result<(), GameError> {
    if state.points.len() == 1 {
        let mut s = state;
        s.card = Some(s.points[0]);
        s.bids = s.hands.iter().map(|h| h[0]).collect();
        let s = resolve(s);
        b.terminal(at, utilities(&s.scores))?;
        return Ok(());
    }
    match state.order {
        PointOrder::Random => {
            let p = 1.0 / state.points.len() as f64;
            let outcomes = state.points.iter().map(|c| (format!("point{c}"), p)).collect();
            let node = b.chance(at, outcomes)?;
            for k in 0..state.points.len() {
                let mut s = state.clone();
                let c = s.points.remove(k);
                s.card = Some(c);
                for v in &mut s.views {
                    v.push_str(&format!("P{c}"));
                }
                bid(b, Some((node, k)), s)?;
            }
            Ok(())
        }
        PointOrder::Ascending | PointOrder::Descending => {
            let mut s = state;
            let k = if s.order == PointOrder::Ascending { 0 } else { s.points.len() - 1 };
            let c = s.points.remove(k);
            s.card = Some(c);
            bid(b, at, s)
        }
    }
}

fn bid(b: &mut GameBuilder, at: Option<(NodeId, usize)>, state: State) -> Result<(), GameError> {
    let p = state.bids.len();
    if p == state.hands.len() {
        let s = resolve(state);
        return start_round(b, at, s);
    }
    let labels: Vec<String> = state.hands[p].iter().map(|c| format!("bid{c}")).collect();
    let node = b.decision(at, p, &state.views[p], &labels)?;
    for (k, &c) in state.hands[p].iter().enumerate() {
        let mut s = state.clone();
        s.bids.push(c);
        s.hands[p].remove(k);
        s.views[p].push_str(&format!("b{c}"));
        bid(b, Some((node, k)), s)?;
    }
    Ok(())
}

/// Scores the current round and records its winner in every view.
fn resolve(mut s: State) -> State {
    let top = *s.bids.iter().max().expect("every player bids");
    let leaders: Vec<usize> = (0..s.bids.len()).filter(|&p| s.bids[p] == top).collect();
    let card = s.card.take().expect("a point card is on the table");
    let tag = if leaders.len() == 1 {
        s.scores[leaders[0]] += card;
        format!("w{}", leaders[0])
    } else {
        "d".to_string()
    };
    for v in &mut s.views {
        v.push_str(&tag);
        v.push('|');
    }
    s.bids.clear();
    for h in &mut s.hands {
        h.sort_unstable();
    }
    s
}

/// 1 for the sole points leader, 1/k to each of k tied leaders, 0 otherwise.
pub fn utilities(scores: &[usize]) -> Vec<f64> {
    let best = *scores.iter().max().expect("at least one player");
    let k = scores.iter().filter(|&&s| s == best).count() as f64;
    scores.iter().map(|&s| if s == best { 1.0 / k } else { 0.0 }).collect()
}
