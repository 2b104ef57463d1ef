use efr::deviation::{own_reach, DeviationType, TimeSelectionKey};
use efr::game::{
    immediate_cf_regret, BehavioralStrategy, Game, GameBuilder, NodeKind, StrategyProfile,
};
use efr::games::build_kuhn;
use efr::{EfrLearner, RmVariant};

/// Counterfactual action values by a plain recursive walk, indexed by infoset.
fn cf_values(game: &Game, profile: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = game.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect();
    walk(game, game.root(), &vec![1.0; game.num_players() + 1], profile, &mut out);
    out
}

/// Returns every player's expected utility below `node`.
fn walk(game: &Game, node: usize, reach: &[f64], profile: &[Vec<Vec<f64>>], out: &mut [Vec<f64>]) -> Vec<f64> {
    let np = game.num_players();
    let n = game.node(node);
    match &n.kind {
        NodeKind::Terminal { payoffs } => payoffs.clone(),
        NodeKind::Chance { probs, .. } => {
            let mut v = vec![0.0; np];
            for (a, &c) in n.children.iter().enumerate() {
                let mut r = reach.to_vec();
                r[np] *= probs[a];
                let child = walk(game, c, &r, profile, out);
                for q in 0..np {
                    v[q] += probs[a] * child[q];
                }
            }
            v
        }
        NodeKind::Decision { player, infoset } => {
            let sigma = &profile[*player][*infoset];
            let others: f64 = (0..=np).filter(|q| q != player).map(|q| reach[q]).product();
            let mut v = vec![0.0; np];
            for (a, &c) in n.children.iter().enumerate() {
                let mut r = reach.to_vec();
                r[*player] *= sigma[a];
                let child = walk(game, c, &r, profile, out);
                out[*infoset][a] += others * child[*player];
                for q in 0..np {
                    v[q] += sigma[a] * child[q];
                }
            }
            v
        }
    }
}

fn regret_matching(regrets: &[f64]) -> Vec<f64> {
    let pos: Vec<f64> = regrets.iter().map(|r| r.max(0.0)).collect();
    let z: f64 = pos.iter().sum();
    if z > 0.0 {
        pos.iter().map(|p| p / z).collect()
    } else {
        vec![1.0 / regrets.len() as f64; regrets.len()]
    }
}

fn self_play<'g>(game: &'g Game, kind: DeviationType, rounds: usize) -> (Vec<EfrLearner<'g>>, Vec<StrategyProfile>) {
    let mut learners: Vec<_> =
        (0..game.num_players()).map(|p| EfrLearner::new(game, p, kind, RmVariant::Rm).unwrap()).collect();
    let mut history = Vec::new();
    for _ in 0..rounds {
        let profile = StrategyProfile::new(game, learners.iter().map(|l| l.strategy().clone()).collect()).unwrap();
        for l in &mut learners {
            l.observe_and_update(&profile).unwrap();
        }
        history.push(profile);
    }
    (learners, history)
}

/// One decision for player 0 with the given payoffs; player 1 never moves.
fn one_shot(payoffs: &[f64]) -> Game {
    let mut b = GameBuilder::new("one-shot", 2);
    let labels: Vec<String> = (0..payoffs.len()).map(|a| format!("a{a}")).collect();
    let root = b.decision(None, 0, "root", &labels).unwrap();
    for (a, &u) in payoffs.iter().enumerate() {
        b.terminal(Some((root, a)), vec![u, -u]).unwrap();
    }
    b.build().unwrap()
}

#[test]
fn first_strategy_is_uniform() {
    let g = build_kuhn();
    let l = EfrLearner::new(&g, 0, DeviationType::Tips, RmVariant::Rm).unwrap();
    assert_eq!(l.strategy(), &BehavioralStrategy::uniform(&g, 0));
    assert!(l.table().all(|(_, _, _, x)| x == 0.0));
}

#[test]
fn blind_cf_matches_vanilla_cfr() {
    let g = build_kuhn();
    let mut regrets: Vec<Vec<f64>> = g.infosets().iter().map(|i| vec![0.0; i.num_actions()]).collect();
    let mut dists: Vec<Vec<Vec<f64>>> =
        (0..2).map(|_| g.infosets().iter().map(|i| vec![1.0 / i.num_actions() as f64; i.num_actions()]).collect()).collect();
    let mut learners: Vec<_> =
        (0..2).map(|p| EfrLearner::new(&g, p, DeviationType::BlindCf, RmVariant::Rm).unwrap()).collect();
    for round in 0..5 {
        let profile = StrategyProfile::new(&g, learners.iter().map(|l| l.strategy().clone()).collect()).unwrap();
        for l in &mut learners {
            l.observe_and_update(&profile).unwrap();
        }

        let values = cf_values(&g, &dists);
        for info in g.infosets() {
            let sigma = &dists[info.player][info.id];
            let base: f64 = sigma.iter().zip(&values[info.id]).map(|(p, v)| p * v).sum();
            for (r, v) in regrets[info.id].iter_mut().zip(&values[info.id]) {
                *r += v - base;
            }
        }
        for info in g.infosets() {
            dists[info.player][info.id] = regret_matching(&regrets[info.id]);
        }

        for info in g.infosets() {
            let ours = learners[info.player].strategy().dist(info.id);
            for (a, b) in ours.iter().zip(&dists[info.player][info.id]) {
                assert!((a - b).abs() <= 1e-12, "round {round} infoset {}", info.key);
            }
        }
    }
}

#[test]
fn informed_action_is_one_step_of_internal_regret_matching() {
    let g = one_shot(&[1.0, -0.5, 0.25]);
    let mut l = EfrLearner::new(&g, 0, DeviationType::InformedAction, RmVariant::Rm).unwrap();
    let profile = StrategyProfile::uniform(&g);
    l.observe_and_update(&profile).unwrap();

    // Internal regret a -> b after one uniform round is (1/3)(v_b - v_a);
    // the next strategy is the stationary distribution of the swap chain.
    let v = [1.0, -0.5, 0.25];
    let mut m = [[0.0; 3]; 3];
    let mut z = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                let y = ((v[b] - v[a]) / 3.0f64).max(0.0);
                m[a][b] = y;
                z += y;
            }
        }
    }
    let mut sigma = [1.0 / 3.0; 3];
    for _ in 0..10_000 {
        let mut next = sigma;
        for a in 0..3 {
            for b in 0..3 {
                next[b] += sigma[a] * m[a][b] / z;
                next[a] -= sigma[a] * m[a][b] / z;
            }
        }
        sigma = next;
    }
    let root = g.player_infosets(0)[0];
    for (x, y) in l.strategy().dist(root).iter().zip(sigma) {
        assert!((x - y).abs() < 1e-9, "{:?} vs {sigma:?}", l.strategy().dist(root));
    }
    // Everything flows to the best action here.
    assert!((sigma[0] - 1.0).abs() < 1e-9);
}

#[test]
fn regret_bound_examples() {
    let g = build_kuhn();
    let l = EfrLearner::new(&g, 0, DeviationType::BlindCf, RmVariant::Rm).unwrap();
    assert_eq!(l.regret_bound(0), 0.0);
    let expect = 2.0 * 2.0 * 6.0 * (1.0 * 100.0f64).sqrt();
    assert!((l.regret_bound(100) - expect).abs() < 1e-9);
    let l = EfrLearner::new(&g, 0, DeviationType::Tips, RmVariant::Rm).unwrap();
    // d_* = 1, n_A = 2: D = (1*2 + 1)(4 - 2) = 6, n_IN = 1.
    let expect = 4.0 * 2.0 * 6.0 * (6.0 * 100.0f64).sqrt();
    assert!((l.regret_bound(100) - expect).abs() < 1e-9);
}

#[test]
fn average_strategy_examples() {
    let g = one_shot(&[1.0, 0.0]);
    let root = g.player_infosets(0)[0];
    let mut l = EfrLearner::new(&g, 0, DeviationType::BlindCf, RmVariant::Rm).unwrap();
    let first = l.strategy().clone();
    l.observe_and_update(&StrategyProfile::uniform(&g)).unwrap();
    assert_eq!(l.average_strategy(), first);

    let second = l.strategy().clone();
    assert_ne!(second, first);
    let profile = StrategyProfile::new(&g, vec![second.clone(), BehavioralStrategy::uniform(&g, 1)]).unwrap();
    l.observe_and_update(&profile).unwrap();
    let avg = l.average_strategy();
    for a in 0..2 {
        let mean = 0.5 * (first.prob(root, a) + second.prob(root, a));
        assert!((avg.prob(root, a) - mean).abs() < 1e-15);
    }

    // Repeating one strategy averages to itself.
    let g = build_kuhn();
    let (learners, _) = self_play(&g, DeviationType::InformedCf, 1);
    assert_eq!(learners[0].average_strategy(), BehavioralStrategy::uniform(&g, 0));
}

#[test]
fn table_sizes_match_hand_counts_on_kuhn() {
    // Player 0 has three root infosets and three depth-one infosets, player 1
    // six roots; two actions everywhere.
    let g = build_kuhn();
    let expect = [
        (DeviationType::BlindCf, 12, 12),
        (DeviationType::InformedCf, 12, 12),
        (DeviationType::BlindAction, 12, 12),
        (DeviationType::InformedAction, 12, 12),
        (DeviationType::Bps, 3 * 2 + 3 * 2 * 2, 12),
        (DeviationType::Cfps, 3 * 2 + 3 * 2 * 2, 12),
        // Root externals have no keys.
        (DeviationType::Csps, 3 * 2 + 3 * (2 * 2 + 2), 6 * 2),
        (DeviationType::Tips, 3 * 2 + 3 * 2 * 3, 12),
        (DeviationType::Behavioral, 3 * 2 + 3 * 2 * 2, 12),
        (DeviationType::CfExIn, 24, 24),
        (DeviationType::CfpsExIn, 3 * 4 + 3 * 4 * 2, 24),
        (DeviationType::TipsExIn, 3 * 4 + 3 * 4 * 3, 24),
    ];
    for (kind, n0, n1) in expect {
        for (p, n) in [(0, n0), (1, n1)] {
            let l = EfrLearner::new(&g, p, kind, RmVariant::Rm).unwrap();
            assert_eq!(l.table_size(), n, "{kind} player {p}");
        }
    }
}

#[test]
fn blind_action_table_is_reach_weighted_cf_regret() {
    let g = build_kuhn();
    let (learners, history) = self_play(&g, DeviationType::BlindAction, 8);
    for (i, phi, key, x) in learners[0].table() {
        assert_eq!(key, &TimeSelectionKey::ReachAt(i).canonical(&g));
        let direct: f64 = history
            .iter()
            .map(|pi| own_reach(&g, pi.strategy(0))[i] * immediate_cf_regret(&g, pi, i, phi).unwrap())
            .sum();
        assert!((x - direct).abs() < 1e-12, "{i} {phi}");
    }
}

#[test]
fn informed_cf_is_internal_regret_matching_per_infoset() {
    let g = build_kuhn();
    let (learners, history) = self_play(&g, DeviationType::InformedCf, 12);
    let mut cum: Vec<Vec<Vec<f64>>> = g.infosets().iter().map(|i| vec![vec![0.0; i.num_actions()]; i.num_actions()]).collect();
    for (t, pi) in history.iter().enumerate() {
        let dists: Vec<Vec<Vec<f64>>> =
            (0..2).map(|p| g.infosets().iter().map(|i| pi.strategy(p).dist(i.id).to_vec()).collect()).collect();
        let values = cf_values(&g, &dists);
        for info in g.infosets() {
            let sigma = pi.strategy(info.player).dist(info.id);
            for a in 0..2 {
                for b in 0..2 {
                    cum[info.id][a][b] += sigma[a] * (values[info.id][b] - values[info.id][a]);
                }
            }
        }
        let next = history.get(t + 1).map(|p| p.strategies().to_vec()).unwrap_or_else(|| {
            learners.iter().map(|l| l.strategy().clone()).collect()
        });
        for info in g.infosets() {
            // Two actions: the stationary point of the swap chain weighs each
            // action by the positive regret of swapping into it.
            let (y01, y10) = (cum[info.id][0][1].max(0.0), cum[info.id][1][0].max(0.0));
            let expect = if y01 + y10 > 0.0 { vec![y10 / (y01 + y10), y01 / (y01 + y10)] } else { vec![0.5, 0.5] };
            let got = next[info.player].dist(info.id);
            for (x, y) in got.iter().zip(&expect) {
                assert!((x - y).abs() < 1e-9, "round {t} infoset {}", info.key);
            }
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let g = build_kuhn();
    for kind in [DeviationType::Csps, DeviationType::Behavioral, DeviationType::TipsExIn] {
        let (a, _) = self_play(&g, kind, 20);
        let (b, _) = self_play(&g, kind, 20);
        for p in 0..2 {
            assert_eq!(a[p].strategy(), b[p].strategy());
            let xs: Vec<u64> = a[p].table().map(|e| e.3.to_bits()).collect();
            let ys: Vec<u64> = b[p].table().map(|e| e.3.to_bits()).collect();
            assert_eq!(xs, ys);
        }
    }
}

#[test]
fn every_variant_and_type_runs_on_kuhn() {
    let g = build_kuhn();
    for kind in DeviationType::ALL {
        for variant in RmVariant::ALL {
            let mut ls: Vec<_> = (0..2).map(|p| EfrLearner::new(&g, p, kind, variant).unwrap()).collect();
            for _ in 0..10 {
                let profile = StrategyProfile::new(&g, ls.iter().map(|l| l.strategy().clone()).collect()).unwrap();
                for l in &mut ls {
                    l.observe_and_update(&profile).unwrap();
                }
            }
            for l in &ls {
                for &i in g.player_infosets(l.player()) {
                    let d = l.strategy().dist(i);
                    assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12 && d.iter().all(|p| *p >= 0.0));
                }
            }
        }
    }
}

#[test]
fn stale_profiles_are_rejected() {
    let g = build_kuhn();
    let mut l = EfrLearner::new(&g, 0, DeviationType::Tips, RmVariant::Rm).unwrap();
    let mut s = BehavioralStrategy::uniform(&g, 0);
    s.set(g.player_infosets(0)[0], vec![1.0, 0.0]).unwrap();
    let profile = StrategyProfile::new(&g, vec![s, BehavioralStrategy::uniform(&g, 1)]).unwrap();
    assert!(l.observe_and_update(&profile).is_err());
}
