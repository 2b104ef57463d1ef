use efr::regret::{
    fixed_point, regret_bound, rmpp_adversary, ActionLearner, LinkOutputs, LocalLearner, OnlineLearner, RmVariant,
};
use efr::transform::maximal_activation;
use efr::ActionTransformation;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXT0: ActionTransformation = ActionTransformation::External { to: 0 };
const EXT1: ActionTransformation = ActionTransformation::External { to: 1 };

fn ext(n: usize) -> Vec<ActionTransformation> {
    ActionTransformation::externals(n).collect()
}

/// Applies σ ↦ (1/z) Σ y_φ φ(σ) with plain loops.
fn operator(n: usize, phis: &[ActionTransformation], y: &[f64], sigma: &[f64]) -> Vec<f64> {
    let z: f64 = y.iter().sum();
    let mut out = vec![0.0; n];
    for (phi, &w) in phis.iter().zip(y) {
        for a in 0..n {
            out[phi.apply(a)] += w / z * sigma[a];
        }
    }
    out
}

fn power_iteration(n: usize, phis: &[ActionTransformation], y: &[f64], steps: usize) -> Vec<f64> {
    let mut sigma = vec![1.0 / n as f64; n];
    for _ in 0..steps {
        let next = operator(n, phis, y, &sigma);
        sigma = sigma.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
    }
    sigma
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn link_output_examples() {
    let mut l = LocalLearner::dense(RmVariant::Rm, ext(3), 1);
    l.update(&[-1.0, -0.5, 0.0], &[1.0]);
    assert_eq!(l.link_outputs(&[1.0]), LinkOutputs { y: vec![0.0; 3], z: 0.0 });

    let mut l = LocalLearner::dense(RmVariant::Rm, ext(3), 1);
    l.update(&[2.0, -1.0, 3.0], &[1.0]);
    assert_eq!(l.link_outputs(&[1.0]), LinkOutputs { y: vec![2.0, 0.0, 3.0], z: 5.0 });

    let mut l = LocalLearner::new(RmVariant::Rm, vec![EXT0], vec![(0, 0), (0, 1)]);
    l.update(&[4.0], &[1.0, 0.0]);
    l.update(&[2.0], &[0.0, 1.0]);
    assert_eq!(l.link_outputs(&[0.5, 1.0]).y, vec![4.0]);
}

#[test]
fn fixed_point_examples() {
    let y = LinkOutputs { y: vec![2.0, 1.0], z: 3.0 };
    assert_eq!(fixed_point(2, &[EXT0, EXT1], &y).unwrap(), vec![2.0 / 3.0, 1.0 / 3.0]);
    let zero = LinkOutputs { y: vec![0.0; 3], z: 0.0 };
    assert_eq!(fixed_point(3, &ext(3), &zero).unwrap(), vec![1.0 / 3.0; 3]);

    let phis: Vec<_> = ActionTransformation::internals(3).collect();
    let mut y = vec![0.0; phis.len()];
    for (k, phi) in phis.iter().enumerate() {
        if matches!(phi, ActionTransformation::Internal { from: 0, to: 1 } | ActionTransformation::Internal { from: 1, to: 0 }) {
            y[k] = 1.0;
        }
    }
    let sigma = fixed_point(3, &phis, &LinkOutputs { y: y.clone(), z: 2.0 }).unwrap();
    let oracle = power_iteration(3, &phis, &y, 10_000);
    assert!(max_diff(&sigma, &oracle) < 1e-9, "{sigma:?} vs {oracle:?}");
}

#[test]
fn update_examples() {
    let mut l = LocalLearner::dense(RmVariant::Rm, ext(2), 1);
    l.update(&[0.0, 0.0], &[1.0]);
    assert_eq!(l.cumulative(), &[0.0, 0.0]);

    let mut l = LocalLearner::dense(RmVariant::RmPlus, ext(1), 1);
    l.update(&[-1.0], &[1.0]);
    assert_eq!(l.cumulative(), &[0.0]);

    let mut l = LocalLearner::dense(RmVariant::Rm, ext(1), 1);
    l.update(&[2.0], &[1.0]);
    l.update(&[2.0], &[0.5]);
    assert_eq!(l.cumulative(), &[3.0]);
}

#[test]
fn bound_and_activation() {
    assert_eq!(regret_bound(1.0, 3.0, 2.0, 0), 0.0);
    assert_eq!(regret_bound(2.0, 1.0, 1.0, 4), 8.0);
    for n in 2..6 {
        let internal: Vec<_> = ActionTransformation::internals(n).collect();
        // Brute force over recommended actions.
        let omega = (0..n).map(|s| internal.iter().filter(|phi| phi.apply(s) != s).count()).max().unwrap();
        assert_eq!(omega, n - 1);
        assert_eq!(maximal_activation(&ext(n), n), n - 1);
    }
}

#[test]
fn regret_matching_plus_plus_examples() {
    let mut l = LocalLearner::dense(RmVariant::RmPlusPlus, ext(2), 1);
    l.update(&[1.0, 3.0], &[1.0]);
    assert_eq!(l.strategy(2, &[1.0]).unwrap(), vec![0.25, 0.75]);
    l.update(&[-1.0, -2.0], &[1.0]);
    assert_eq!(l.cumulative(), &[1.0, 3.0]);

    assert_eq!(rmpp_adversary(0, &mut ActionLearner::new(RmVariant::RmPlusPlus, 2)).q(), 0.0);
    let trace = rmpp_adversary(1000, &mut ActionLearner::new(RmVariant::RmPlusPlus, 2));
    assert!(trace.q() >= 250.0);
    // Linear growth: the second half adds at least a quarter of its length.
    assert!(trace.positive_regret[999] - trace.positive_regret[499] >= 125.0);
}

struct Even;

impl OnlineLearner for Even {
    fn policy(&self) -> Vec<f64> {
        vec![0.5, 0.5]
    }

    fn observe(&mut self, _: &[f64]) {}
}

#[test]
fn adversary_against_a_fixed_even_policy() {
    let trace = rmpp_adversary(40, &mut Even);
    for (t, q) in trace.positive_regret.iter().enumerate() {
        assert_eq!(*q, 0.5 * (t + 1) as f64);
    }
    assert!(trace.rewards.iter().all(|r| *r == [0.0, 1.0]));
}

#[test]
fn adversary_forces_a_quarter_on_every_learner() {
    for v in RmVariant::ALL {
        let trace = rmpp_adversary(2000, &mut ActionLearner::new(v, 2));
        for (t, q) in trace.positive_regret.iter().enumerate() {
            assert!(*q >= (t + 1) as f64 / 4.0, "{v} t={}", t + 1);
        }
    }
    let trace = rmpp_adversary(2000, &mut ActionLearner::new(RmVariant::Rm, 2));
    for (t, r) in trace.regret.iter().enumerate() {
        assert!(*r <= regret_bound(1.0, 1.0, 2.0, t + 1), "t={}", t + 1);
    }
}

fn transformation_set(kind: usize, n: usize) -> Vec<ActionTransformation> {
    let int = ActionTransformation::internals(n);
    match kind {
        0 => ext(n),
        1 => int.collect(),
        _ => ext(n).into_iter().chain(int).collect(),
    }
}

/// Plays regret matching against random rewards with random key weights and
/// returns the worst cumulative regret after each round.
struct Stream {
    n: usize,
    phis: Vec<ActionTransformation>,
    keys: usize,
}

impl Stream {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.gen_range(2..=5);
        let phis = transformation_set(rng.gen_range(0..3), n);
        Self { n, phis, keys: rng.gen_range(1..=4) }
    }

    fn round(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let r = (0..self.n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let w = (0..self.keys).map(|_| rng.gen::<f64>()).collect();
        (r, w)
    }
}

#[test]
fn fixed_point_with_a_nearly_absorbing_state() {
    // Taken from a behavioral learner on goofspiel(5): action 1 absorbs and
    // action 0 leaks into it at rate ~1e-9, which stalls power iteration.
    let phis: Vec<_> = ActionTransformation::internals(3).collect();
    let y = vec![4.64942628898537e-13, 0.0, 0.0, 0.0, 2.7777777777777783e-4, 2.7777777777777783e-4];
    let z = 5.555555560204983e-4;
    let sigma = fixed_point(3, &phis, &LinkOutputs { y, z }).unwrap();
    assert_eq!(sigma, vec![0.0, 1.0, 0.0]);
}

#[test]
fn fixed_point_on_a_reducible_chain_splits_uniform_mass() {
    // 0 <-> 1 and 2 <-> 3 never mix; each class keeps the half it starts with.
    let phis: Vec<_> = ActionTransformation::internals(4).collect();
    let y: Vec<f64> = phis
        .iter()
        .map(|phi| match phi {
            ActionTransformation::Internal { from, to } if from / 2 == to / 2 => 1.0 + *from as f64,
            _ => 0.0,
        })
        .collect();
    let z = y.iter().sum();
    let sigma = fixed_point(4, &phis, &LinkOutputs { y: y.clone(), z }).unwrap();
    assert!(max_diff(&operator(4, &phis, &y, &sigma), &sigma) <= 1e-12);
    assert!(max_diff(&sigma, &[1.0 / 3.0, 1.0 / 6.0, 2.0 / 7.0, 3.0 / 14.0]) <= 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fixed_points_are_stationary_and_satisfy_blackwell(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let phis = transformation_set(rng.gen_range(0..3), n);
        let y: Vec<f64> = phis.iter().map(|_| if rng.gen_bool(0.6) { rng.gen::<f64>() } else { 0.0 }).collect();
        let z: f64 = y.iter().sum();
        prop_assume!(z > 0.0);
        let sigma = fixed_point(n, &phis, &LinkOutputs { y: y.clone(), z }).unwrap();
        prop_assert!((sigma.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(sigma.iter().all(|p| *p >= 0.0));
        prop_assert!(max_diff(&operator(n, &phis, &y, &sigma), &sigma) <= 1e-10);
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let inner: f64 = phis.iter().zip(&y).map(|(phi, yk)| yk * phi.value_gain(&sigma, &r)).sum();
        prop_assert!(inner.abs() <= 1e-8 * z);
    }

    #[test]
    fn fixed_points_match_lazy_power_iteration_from_uniform(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let phis: Vec<_> = ActionTransformation::internals(n).collect();
        // Sparse enough to leave transient states and several closed classes,
        // with rates far enough from zero for power iteration to settle.
        let y: Vec<f64> = phis.iter().map(|_| if rng.gen_bool(0.3) { rng.gen_range(0.2..1.0) } else { 0.0 }).collect();
        let z: f64 = y.iter().sum();
        prop_assume!(z > 0.0);
        let sigma = fixed_point(n, &phis, &LinkOutputs { y: y.clone(), z }).unwrap();
        let oracle = power_iteration(n, &phis, &y, 20_000);
        prop_assert!(max_diff(&sigma, &oracle) < 1e-9, "{:?} vs {:?}", sigma, oracle);
    }

    #[test]
    fn time_selection_regret_stays_within_the_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Stream::random(&mut rng);
        let omega = maximal_activation(&s.phis, s.n) as f64;
        let mut learner = LocalLearner::dense(RmVariant::Rm, s.phis.clone(), s.keys);
        for t in 1..=1500 {
            let (r, w) = s.round(&mut rng);
            let sigma = learner.strategy(s.n, &w).unwrap();
            let rho: Vec<f64> = s.phis.iter().map(|phi| phi.value_gain(&sigma, &r)).collect();
            learner.update(&rho, &w);
            let worst = learner.cumulative().iter().copied().fold(f64::MIN, f64::max);
            prop_assert!(worst <= regret_bound(1.0, s.keys as f64, omega, t));
        }
    }

    #[test]
    fn pseudo_regrets_dominate_exact_regrets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Stream::random(&mut rng);
        let mut plus = LocalLearner::dense(RmVariant::RmPlus, s.phis.clone(), s.keys);
        let mut exact = LocalLearner::dense(RmVariant::Rm, s.phis.clone(), s.keys);
        for _ in 0..300 {
            let (r, w) = s.round(&mut rng);
            let sigma = plus.strategy(s.n, &w).unwrap();
            let rho: Vec<f64> = s.phis.iter().map(|phi| phi.value_gain(&sigma, &r)).collect();
            plus.update(&rho, &w);
            exact.update(&rho, &w);
            prop_assert!(plus.cumulative().iter().all(|q| *q >= 0.0));
            for (q, x) in plus.cumulative().iter().zip(exact.cumulative()) {
                prop_assert!(q >= x);
            }
        }
    }

    #[test]
    fn optimistic_regret_is_bounded_by_prediction_error(seed in any::<u64>(), noisy in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Stream::random(&mut rng);
        let mut learner = LocalLearner::dense(RmVariant::RmOptimistic, s.phis.clone(), s.keys);
        let links = learner.links().to_vec();
        let mut prediction = vec![0.0; links.len()];
        let mut error = 0.0;
        for _ in 0..500 {
            let (r, w) = s.round(&mut rng);
            if noisy {
                prediction.iter_mut().for_each(|m| *m = rng.gen_range(-2.0..=2.0));
                learner.set_prediction(&prediction);
            }
            let sigma = learner.strategy(s.n, &w).unwrap();
            let rho: Vec<f64> = s.phis.iter().map(|phi| phi.value_gain(&sigma, &r)).collect();
            for (k, &(phi, key)) in links.iter().enumerate() {
                error += (w[key] * rho[phi] - prediction[k]).powi(2);
            }
            learner.update(&rho, &w);
            // The built-in prediction is this round's increment.
            if !noisy {
                for (k, &(phi, key)) in links.iter().enumerate() {
                    prediction[k] = w[key] * rho[phi];
                }
            }
            let worst = learner.cumulative().iter().copied().fold(f64::MIN, f64::max);
            prop_assert!(worst <= error.sqrt() + 1e-9);
        }
    }
}
