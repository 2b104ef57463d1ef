use crate::game::{Game, GameBuilder, GameError, NodeId};

const CARDS: [&str; 3] = ["J", "Q", "K"];

/// Three-card Kuhn poker: ante 1, one bet of 1, player 0 acts first.
/// Actions are `p` (pass/check/fold) and `b` (bet/call).
pub fn build_kuhn() -> Game {
    try_build().expect("Kuhn poker is well formed")
}

fn try_build() -> Result<Game, GameError> {
    let mut b = GameBuilder::new("kuhn", 2);
    let mut deals = Vec::new();
    for (x, cx) in CARDS.iter().enumerate() {
        for (y, cy) in CARDS.iter().enumerate() {
            if x != y {
                deals.push((format!("{cx}{cy}"), 1.0 / 6.0));
            }
        }
    }
    let root = b.chance(None, deals)?;
    let mut k = 0;
    for x in 0..3 {
        for y in 0..3 {
            if x != y {
                deal(&mut b, (root, k), x, y)?;
                k += 1;
            }
        }
    }
    b.build()
}

fn deal(b: &mut GameBuilder, at: (NodeId, usize), x: usize, y: usize) -> Result<(), GameError> {
    let (cx, cy) = (CARDS[x], CARDS[y]);
    let show = |stake: f64| if x > y { vec![stake, -stake] } else { vec![-stake, stake] };
    let p0 = b.decision(Some(at), 0, cx, &["p", "b"])?;
    // check
    let p1 = b.decision(Some((p0, 0)), 1, &format!("{cy}p"), &["p", "b"])?;
    b.terminal(Some((p1, 0)), show(1.0))?;
    let p0b = b.decision(Some((p1, 1)), 0, &format!("{cx}pb"), &["p", "b"])?;
    b.terminal(Some((p0b, 0)), vec![-1.0, 1.0])?;
    b.terminal(Some((p0b, 1)), show(2.0))?;
    // bet
    let p1 = b.decision(Some((p0, 1)), 1, &format!("{cy}b"), &["p", "b"])?;
    b.terminal(Some((p1, 0)), vec![1.0, -1.0])?;
    b.terminal(Some((p1, 1)), show(2.0))?;
    Ok(())
}
