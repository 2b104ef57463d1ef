use crate::game::{Game, GameBuilder, GameError, NodeId};

const RANKS: [&str; 3] = ["J", "Q", "K"];
const SUITS: usize = 2;
const ANTE: f64 = 1.0;
const RAISE: [f64; 2] = [2.0, 4.0];
const MAX_RAISES: usize = 2;

/// Payoffs are in chips; multiply by this for milli-big-blinds (the ante is
/// one big blind).
pub const MBB_PER_CHIP: f64 = 1000.0;

fn rank(card: usize) -> usize {
    card / SUITS
}

fn card_label(card: usize) -> String {
    format!("{}{}", RANKS[rank(card)], ["s", "h"][card % SUITS])
}

/// Leduc hold'em: six cards, one private card each, a public card before
/// the second betting round, at most two raises per round.
/// Actions are `f` (fold, only when facing a bet), `c` (check/call) and `r` (raise).
pub fn build_leduc() -> Game {
    try_build().expect("Leduc hold'em is well formed")
}

#[derive(Clone)]
struct Bets {
    round: usize,
    history: [String; 2],
    contrib: [f64; 2],
    raises: usize,
    acted: usize,
    to_act: usize,
}

struct Deal {
    cards: [usize; 2],
    public: Option<usize>,
}

fn try_build() -> Result<Game, GameError> {
    let mut b = GameBuilder::new("leduc", 2);
    let n = RANKS.len() * SUITS;
    let first: Vec<(String, f64)> = (0..n).map(|c| (card_label(c), 1.0 / n as f64)).collect();
    let root = b.chance(None, first)?;
    for c0 in 0..n {
        let others: Vec<usize> = (0..n).filter(|&c| c != c0).collect();
        let outcomes = others.iter().map(|&c| (card_label(c), 1.0 / others.len() as f64)).collect();
        let second = b.chance(Some((root, c0)), outcomes)?;
        for (k, &c1) in others.iter().enumerate() {
            let bets = Bets {
                round: 0,
                history: [String::new(), String::new()],
                contrib: [ANTE; 2],
                raises: 0,
                acted: 0,
                to_act: 0,
            };
            betting(&mut b, (second, k), &Deal { cards: [c0, c1], public: None }, bets)?;
        }
    }
    b.build()
}

fn key(deal: &Deal, bets: &Bets, player: usize) -> String {
    let public = deal.public.map(card_label).unwrap_or_default();
    format!("{}|{}|{}/{}", card_label(deal.cards[player]), public, bets.history[0], bets.history[1])
}

fn betting(b: &mut GameBuilder, at: (NodeId, usize), deal: &Deal, bets: Bets) -> Result<(), GameError> {
    let p = bets.to_act;
    let facing = bets.contrib[1 - p] > bets.contrib[p];
    let mut actions: Vec<&str> = Vec::new();
    if facing {
        actions.push("f");
    }
    actions.push("c");
    if bets.raises < MAX_RAISES {
        actions.push("r");
    }
    let h = b.decision(Some(at), p, &key(deal, &bets, p), &actions)?;
    for (k, &a) in actions.iter().enumerate() {
        let mut next = bets.clone();
        next.history[bets.round].push_str(a);
        next.acted += 1;
        next.to_act = 1 - p;
        match a {
            "f" => {
                let loss = bets.contrib[p];
                let mut u = vec![loss; 2];
                u[p] = -loss;
                b.terminal(Some((h, k)), u)?;
            }
            "c" => {
                next.contrib[p] = next.contrib[1 - p];
                let round_over = facing || next.acted == 2;
                if !round_over {
                    betting(b, (h, k), deal, next)?;
                } else if bets.round == 0 {
                    reveal(b, (h, k), deal, next)?;
                } else {
                    b.terminal(Some((h, k)), showdown(deal, &next))?;
                }
            }
            _ => {
                next.contrib[p] = next.contrib[1 - p] + RAISE[bets.round];
                next.raises += 1;
                betting(b, (h, k), deal, next)?;
            }
        }
    }
    Ok(())
}

fn reveal(b: &mut GameBuilder, at: (NodeId, usize), deal: &Deal, bets: Bets) -> Result<(), GameError> {
    let n = RANKS.len() * SUITS;
    let left: Vec<usize> = (0..n).filter(|c| !deal.cards.contains(c)).collect();
    let outcomes = left.iter().map(|&c| (card_label(c), 1.0 / left.len() as f64)).collect();
    let c = b.chance(Some(at), outcomes)?;
    for (k, &card) in left.iter().enumerate() {
        let next = Bets { round: 1, raises: 0, acted: 0, to_act: 0, ..bets.clone() };
        betting(b, (c, k), &Deal { cards: deal.cards, public: Some(card) }, next)?;
    }
    Ok(())
}

fn strength(card: usize, public: usize) -> usize {
    if rank(card) == rank(public) {
        RANKS.len() + rank(card)
    } else {
        rank(card)
    }
}

fn showdown(deal: &Deal, bets: &Bets) -> Vec<f64> {
    let public = deal.public.expect("showdown happens after the reveal");
    let s0 = strength(deal.cards[0], public);
    let s1 = strength(deal.cards[1], public);
    let pot = bets.contrib[0];
    match s0.cmp(&s1) {
        std::cmp::Ordering::Greater => vec![pot, -pot],
        std::cmp::Ordering::Less => vec![-pot, pot],
        std::cmp::Ordering::Equal => vec![0.0, 0.0],
    }
}
