use crate::game::{Game, GameBuilder, GameError, NodeId};

/// Sheriff parameters; defaults are three items, bribes up to three, four
/// negotiation rounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SheriffConfig {
    pub max_items: usize,
    pub max_bribe: usize,
    pub rounds: usize,
    pub item_value: f64,
    /// Paid by the smuggler per item found.
    pub item_penalty: f64,
    /// Paid by the sheriff for inspecting a clean cargo.
    pub sheriff_penalty: f64,
}

impl Default for SheriffConfig {
    fn default() -> Self {
        Self { max_items: 3, max_bribe: 3, rounds: 4, item_value: 1.0, item_penalty: 2.0, sheriff_penalty: 3.0 }
    }
}

pub const SMUGGLER: usize = 0;
pub const SHERIFF: usize = 1;

pub fn build_sheriff() -> Game {
    build_sheriff_with(SheriffConfig::default()).expect("default Sheriff is well formed")
}

/// The smuggler (player 0) privately loads items, then each round offers a
/// bribe and the sheriff (player 1) signals inspect or pass; only the last
/// round binds.
pub fn build_sheriff_with(cfg: SheriffConfig) -> Result<Game, GameError> {
    if cfg.rounds == 0 {
        return Err(GameError::Structure("Sheriff needs at least one round".into()));
    }
    let mut b = GameBuilder::new("sheriff", 2);
    let items: Vec<String> = (0..=cfg.max_items).map(|k| format!("load{k}")).collect();
    let root = b.decision(None, SMUGGLER, "", &items)?;
    for k in 0..=cfg.max_items {
        round(&mut b, &cfg, (root, k), k, String::new(), 0)?;
    }
    b.build()
}

fn round(
    b: &mut GameBuilder,
    cfg: &SheriffConfig,
    at: (NodeId, usize),
    items: usize,
    public: String,
    r: usize,
) -> Result<(), GameError> {
    let bribes: Vec<String> = (0..=cfg.max_bribe).map(|x| format!("bribe{x}")).collect();
    let s = b.decision(Some(at), SMUGGLER, &format!("{items}|{public}"), &bribes)?;
    for bribe in 0..=cfg.max_bribe {
        let seen = format!("{public}b{bribe}");
        let h = b.decision(Some((s, bribe)), SHERIFF, &seen, &["pass", "inspect"])?;
        for (signal, tag) in ["p", "i"].iter().enumerate() {
            let next = (h, signal);
            if r + 1 == cfg.rounds {
                b.terminal(Some(next), payoffs(cfg, items, bribe, signal == 1))?;
            } else {
                round(b, cfg, next, items, format!("{seen}{tag},"), r + 1)?;
            }
        }
    }
    Ok(())
}

pub fn payoffs(cfg: &SheriffConfig, items: usize, bribe: usize, inspect: bool) -> Vec<f64> {
    let (items, bribe) = (items as f64, bribe as f64);
    if !inspect {
        vec![items * cfg.item_value - bribe, bribe]
    } else if items > 0.0 {
        vec![-cfg.item_penalty * items, cfg.item_penalty * items]
    } else {
        vec![cfg.sheriff_penalty, -cfg.sheriff_penalty]
    }
}
