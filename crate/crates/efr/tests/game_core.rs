use efr::game::{
    counterfactual_value, counterfactual_value_recursive, expected_utility, immediate_cf_regret,
    opponents_of, reach_between, reach_prob, text, validate_perfect_recall, Agent, BehavioralStrategy, Evaluation,
    Game, GameBuilder, GameError, NodeKind, StrategyProfile,
};
use efr::games::build_kuhn;
use efr::ActionTransformation;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_profile(game: &Game, seed: u64) -> StrategyProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strategies = (0..game.num_players())
        .map(|p| {
            BehavioralStrategy::from_fn(game, p, |i| {
                let raw: Vec<f64> =
                    (0..game.infoset(i).num_actions()).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / s).collect()
            })
            .unwrap()
        })
        .collect();
    StrategyProfile::new(game, strategies).unwrap()
}

/// Independent oracle: walk every terminal's path and multiply probabilities.
fn brute_force_utility(game: &Game, profile: &StrategyProfile) -> Vec<f64> {
    let mut u = vec![0.0; game.num_players()];
    for &z in game.terminals() {
        let mut p = 1.0;
        let mut cur = z;
        while let Some(parent) = game.node(cur).parent {
            let a = game.node(cur).action_in.unwrap();
            p *= match &game.node(parent).kind {
                NodeKind::Chance { probs, .. } => probs[a],
                NodeKind::Decision { infoset, .. } => profile.prob(game, *infoset, a),
                NodeKind::Terminal { .. } => unreachable!(),
            };
            cur = parent;
        }
        for (q, x) in game.payoffs(z).unwrap().iter().enumerate() {
            u[q] += p * x;
        }
    }
    u
}

fn kuhn_history(game: &Game, deal: &str, actions: &[&str]) -> usize {
    let root = game.root();
    let k = match &game.node(root).kind {
        NodeKind::Chance { outcomes, .. } => outcomes.iter().position(|o| o == deal).unwrap(),
        _ => panic!("Kuhn starts with a deal"),
    };
    let mut cur = game.node(root).children[k];
    for a in actions {
        let NodeKind::Decision { infoset, .. } = game.node(cur).kind else { panic!("not a decision") };
        let idx = game.infoset(infoset).actions.iter().position(|x| x == a).unwrap();
        cur = game.node(cur).children[idx];
    }
    cur
}

fn infoset_by_key(game: &Game, player: usize, key: &str) -> usize {
    game.player_infosets(player).iter().copied().find(|&i| game.infoset(i).key == key).unwrap()
}

#[test]
fn kuhn_shape() {
    let g = build_kuhn();
    assert_eq!(g.terminals().len(), 30);
    assert_eq!(g.infosets().len(), 12);
    assert_eq!(g.utility_bound(), 2.0);
    assert!(g.terminals().iter().all(|&z| g.payoffs(z).unwrap().iter().sum::<f64>() == 0.0));
    let z = kuhn_history(&g, "JQ", &["p", "p"]);
    assert_eq!(g.payoffs(z).unwrap(), &[-1.0, 1.0]);
    assert_eq!(g.max_depth(0), 1);
    assert_eq!(g.max_depth(1), 0);
}

#[test]
fn perfect_recall_checks() {
    assert!(validate_perfect_recall(&build_kuhn()).perfect_recall);

    let mut b = GameBuilder::new("single", 1);
    let r = b.decision(None, 0, "root", &["x", "y"]).unwrap();
    b.terminal(Some((r, 0)), vec![1.0]).unwrap();
    b.terminal(Some((r, 1)), vec![0.0]).unwrap();
    assert!(validate_perfect_recall(&b.build().unwrap()).perfect_recall);

    // Player 0 forgets its first move.
    let mut b = GameBuilder::new("forgetful", 1);
    let r = b.decision(None, 0, "root", &["x", "y"]).unwrap();
    for a in 0..2 {
        let h = b.decision(Some((r, a)), 0, "later", &["l", "r"]).unwrap();
        b.terminal(Some((h, 0)), vec![a as f64]).unwrap();
        b.terminal(Some((h, 1)), vec![0.0]).unwrap();
    }
    let report_game = b.clone().build_unchecked().unwrap();
    let report = validate_perfect_recall(&report_game);
    assert!(!report.perfect_recall);
    assert!(report.diagnostics[0].contains("later"));
    assert!(matches!(b.build(), Err(GameError::ImperfectRecall(_))));
}

#[test]
fn reach_probabilities() {
    let g = build_kuhn();
    let u = StrategyProfile::uniform(&g);
    let all = efr::game::all_agents(&g);
    assert_eq!(reach_prob(&g, &u, g.root(), &all).unwrap(), 1.0);
    let h = kuhn_history(&g, "JQ", &["b"]);
    assert!((reach_prob(&g, &u, h, &opponents_of(&g, 0)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert!((reach_prob(&g, &u, h, &[Agent::Player(0)]).unwrap() - 0.5).abs() < 1e-15);
    let other = kuhn_history(&g, "JK", &["b"]);
    assert_eq!(reach_between(&g, &u, h, other, &all).unwrap(), 0.0);
    assert_eq!(reach_between(&g, &u, h, h, &all).unwrap(), 1.0);
    assert!(matches!(reach_prob(&g, &u, 10_000, &all), Err(GameError::UnknownHistory(10_000))));
}

#[test]
fn expected_utility_small_games() {
    let mut b = GameBuilder::new("coin", 2);
    let c = b.chance(None, vec![("H".into(), 0.5), ("T".into(), 0.5)]).unwrap();
    b.terminal(Some((c, 0)), vec![1.0, -1.0]).unwrap();
    b.terminal(Some((c, 1)), vec![-1.0, 1.0]).unwrap();
    let g = b.build().unwrap();
    assert_eq!(expected_utility(&g, &StrategyProfile::uniform(&g)), vec![0.0, 0.0]);

    let mut b = GameBuilder::new("pennies", 2);
    let r = b.decision(None, 0, "", &["h", "t"]).unwrap();
    for a in 0..2 {
        let h = b.decision(Some((r, a)), 1, "", &["h", "t"]).unwrap();
        for c in 0..2 {
            let u = if a == c { 1.0 } else { -1.0 };
            b.terminal(Some((h, c)), vec![u, -u]).unwrap();
        }
    }
    let g = b.build().unwrap();
    assert_eq!(expected_utility(&g, &StrategyProfile::uniform(&g)), vec![0.0, 0.0]);
}

#[test]
fn kuhn_uniform_value_matches_enumeration() {
    let g = build_kuhn();
    let u = StrategyProfile::uniform(&g);
    let fast = expected_utility(&g, &u);
    let slow = brute_force_utility(&g, &u);
    assert!((fast[0] - slow[0]).abs() < 1e-15);
    // Frozen from the enumeration oracle above.
    assert!((fast[0] - 0.125).abs() < 1e-15, "{}", fast[0]);
}

#[test]
fn counterfactual_value_basics() {
    let mut b = GameBuilder::new("one-shot", 1);
    let r = b.decision(None, 0, "", &["a", "b", "c"]).unwrap();
    let payoff = [3.0, -1.0, 0.5];
    for (a, u) in payoff.iter().enumerate() {
        b.terminal(Some((r, a)), vec![*u]).unwrap();
    }
    let g = b.build().unwrap();
    let u = StrategyProfile::uniform(&g);
    for (a, x) in payoff.iter().enumerate() {
        assert_eq!(counterfactual_value(&g, &u, 0, a).unwrap(), *x);
    }
    assert!(matches!(counterfactual_value(&g, &u, 0, 7), Err(GameError::IllegalAction { .. })));

    // Opponent never lets player 1 act at "Kb"-type infosets.
    let k = build_kuhn();
    let mut p = StrategyProfile::uniform(&k);
    for &i in k.player_infosets(0) {
        p.strategy_mut(0).set(i, vec![1.0, 0.0]).unwrap();
    }
    let kb = infoset_by_key(&k, 1, "Kb");
    assert_eq!(counterfactual_value(&k, &p, kb, 0).unwrap(), 0.0);
    assert_eq!(counterfactual_value(&k, &p, kb, 1).unwrap(), 0.0);
}

#[test]
fn counterfactual_value_kuhn_root_recursion_oracle() {
    let g = build_kuhn();
    let u = StrategyProfile::uniform(&g);
    let j = infoset_by_key(&g, 0, "J");
    for a in 0..2 {
        let direct = counterfactual_value(&g, &u, j, a).unwrap();
        let rec = counterfactual_value_recursive(&g, &u, j, a).unwrap();
        assert!((direct - rec).abs() < 1e-12);
    }
}

#[test]
fn immediate_regret_examples() {
    let g = build_kuhn();
    let u = StrategyProfile::uniform(&g);
    let j = infoset_by_key(&g, 0, "J");
    assert_eq!(immediate_cf_regret(&g, &u, j, ActionTransformation::Identity).unwrap(), 0.0);
    let bet = ActionTransformation::External { to: 1 };
    let two_term = counterfactual_value(&g, &u, j, 1).unwrap()
        - 0.5 * (counterfactual_value(&g, &u, j, 0).unwrap() + counterfactual_value(&g, &u, j, 1).unwrap());
    assert!((immediate_cf_regret(&g, &u, j, bet).unwrap() - two_term).abs() < 1e-15);

    let mut p = u.clone();
    p.strategy_mut(0).set(j, vec![0.0, 1.0]).unwrap();
    assert_eq!(immediate_cf_regret(&g, &p, j, bet).unwrap(), 0.0);
}

#[test]
fn text_format_round_trip() {
    let g = build_kuhn();
    let s = text::to_text(&g);
    assert!(s.starts_with(text::HEADER));
    let back = text::from_text(&s).unwrap();
    assert_eq!(text::to_text(&back), s);
    let p = StrategyProfile::uniform(&back);
    assert_eq!(expected_utility(&back, &p), expected_utility(&g, &StrategyProfile::uniform(&g)));

    assert!(matches!(text::from_text("efr-game v2\n"), Err(GameError::Parse { line: 1, .. })));
    let bad = "efr-game v1\nplayers 1\nnode 0 - - player 0 r a b\nnode 1 0 zz terminal 1\n";
    assert!(matches!(text::from_text(bad), Err(GameError::Parse { line: 4, .. })));
}

#[test]
fn strategies_reject_invalid_distributions() {
    let g = build_kuhn();
    let mut s = BehavioralStrategy::uniform(&g, 0);
    let i = g.player_infosets(0)[0];
    assert!(s.set(i, vec![0.7, 0.7]).is_err());
    assert!(s.set(i, vec![1.0]).is_err());
    s.set(i, vec![0.25 + 1e-9, 0.75]).unwrap();
    assert!((s.dist(i).iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn evaluation_agrees_with_direct_and_recursive_sums(seed in any::<u64>()) {
        let g = build_kuhn();
        let p = random_profile(&g, seed);
        let e = Evaluation::compute(&g, &p);
        let u = g.utility_bound();
        for info in g.infosets() {
            for a in 0..info.num_actions() {
                let direct = counterfactual_value(&g, &p, info.id, a).unwrap();
                let rec = counterfactual_value_recursive(&g, &p, info.id, a).unwrap();
                prop_assert!((direct - rec).abs() <= 1e-9 * u);
                prop_assert!((direct - e.action_values(info.id)[a]).abs() <= 1e-12);
            }
            let sigma = p.strategy(info.player).dist(info.id);
            let lin: f64 = (0..info.num_actions()).map(|a| sigma[a] * e.action_values(info.id)[a]).sum();
            prop_assert_eq!(lin, e.cf_value(info.id, sigma));
        }
        let brute = brute_force_utility(&g, &p);
        for q in 0..2 {
            prop_assert!((brute[q] - e.utilities()[q]).abs() < 1e-12);
        }
    }

    #[test]
    fn root_infosets_carry_the_whole_value(seed in any::<u64>()) {
        // Player 0 acts before any terminal in Kuhn, so u_0 is the sum of
        // reach-weighted values of its root infosets (reach 1 there).
        let g = build_kuhn();
        let p = random_profile(&g, seed);
        let e = Evaluation::compute(&g, &p);
        let roots: f64 = g
            .player_infosets(0)
            .iter()
            .filter(|&&i| g.infoset(i).parent.is_none())
            .map(|&i| e.own_reach(&g, i) * e.cf_value(i, p.strategy(0).dist(i)))
            .sum();
        prop_assert!((roots - e.utilities()[0]).abs() < 1e-12);
    }

    #[test]
    fn terminal_reach_matches_expected_utility(seed in any::<u64>()) {
        let g = build_kuhn();
        let p = random_profile(&g, seed);
        let all = efr::game::all_agents(&g);
        let total: f64 = g
            .terminals()
            .iter()
            .map(|&z| reach_prob(&g, &p, z, &all).unwrap() * g.payoffs(z).unwrap()[1])
            .sum();
        prop_assert!((total - expected_utility(&g, &p)[1]).abs() < 1e-12);
    }
}
