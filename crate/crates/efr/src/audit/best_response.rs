use super::play::EmpiricalPlay;
use super::AuditError;
use crate::game::{Evaluation, Game, NodeKind, Player, StrategyProfile};

/// max over the player's strategies of its expected utility against the
/// others' strategies in `profile`.
pub fn best_response_value(game: &Game, profile: &StrategyProfile, player: Player) -> f64 {
    let eval = Evaluation::compute(game, profile);
    let cfu = |z| eval.reach_except(z, player) * game.payoffs(z).expect("terminal")[player];
    let mut best = vec![0.0; game.infosets().len()];
    for &i in game.player_infosets(player).iter().rev() {
        let info = game.infoset(i);
        best[i] = (0..info.num_actions())
            .map(|a| {
                info.terminals[a].iter().map(|&z| cfu(z)).sum::<f64>()
                    + info.children[a].iter().map(|&c| best[c]).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let roots: f64 =
        game.player_infosets(player).iter().filter(|&&i| game.infoset(i).parent.is_none()).map(|&i| best[i]).sum();
    let untouched: f64 = game
        .terminals()
        .iter()
        .filter(|&&z| {
            !game
                .path(z)
                .iter()
                .any(|&(h, _)| matches!(game.node(h).kind, NodeKind::Decision { player: p, .. } if p == player))
        })
        .map(|&z| cfu(z))
        .sum();
    roots + untouched
}

/// The constant every terminal's payoffs sum to, if the game has two
/// players and such a constant.
fn constant_sum(game: &Game) -> Option<f64> {
    if game.num_players() != 2 {
        return None;
    }
    let mut sums = game.terminals().iter().map(|&z| game.payoffs(z).expect("terminal").iter().sum::<f64>());
    let first = sums.next()?;
    sums.all(|s| (s - first).abs() <= 1e-9 * game.utility_bound().max(1.0)).then_some(first)
}

fn require_constant_sum(game: &Game) -> Result<f64, AuditError> {
    constant_sum(game).ok_or_else(|| {
        AuditError::Unsupported(format!("{} is not a two-player constant-sum game", game.name()))
    })
}

/// How much `player` gains by best responding to the others' average
/// strategies instead of playing its own average strategy.
pub fn best_response_gap(play: &EmpiricalPlay<'_>, player: Player) -> Result<f64, AuditError> {
    let game = play.game();
    require_constant_sum(game)?;
    let avg = play.average_profile()?;
    let eval = Evaluation::compute(game, &avg);
    Ok(best_response_value(game, &avg, player) - eval.utilities()[player])
}

/// Mean of the two players' best-response gaps; zero exactly at equilibrium.
pub fn exploitability(game: &Game, profile: &StrategyProfile) -> Result<f64, AuditError> {
    let total = require_constant_sum(game)?;
    let br: f64 = (0..2).map(|p| best_response_value(game, profile, p)).sum();
    Ok((br - total) / 2.0)
}
