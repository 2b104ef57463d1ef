//! Time-selection regret matching with the ReLU link.
//!
//! A [`LocalLearner`] keeps one cumulative value per (transformation, key)
//! link. Each round the caller supplies instantaneous regrets per
//! transformation and a weight per key; the next strategy is a fixed point
//! of the transformations weighted by their link outputs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::transform::ActionTransformation;

/// Residual a fixed point must reach.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RegretError {
    #[error("fixed point residual {residual:e} over tolerance")]
    FixedPoint { residual: f64 },
    #[error("unknown regret-matching variant {0:?} (rm|rm_plus|rm_optimistic|rm_pp)")]
    Variant(String),
}

/// How cumulative values are accumulated and linked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RmVariant {
    /// Exact cumulative regrets.
    #[default]
    Rm,
    /// Pseudo-regrets clipped at zero after every update.
    RmPlus,
    /// Exact regrets plus the last round's increment as a prediction.
    RmOptimistic,
    /// Sums of positive instantaneous regrets. Not a no-regret method.
    RmPlusPlus,
}

impl RmVariant {
    pub const ALL: [Self; 4] = [Self::Rm, Self::RmPlus, Self::RmOptimistic, Self::RmPlusPlus];

    pub fn token(self) -> &'static str {
        match self {
            Self::Rm => "rm",
            Self::RmPlus => "rm_plus",
            Self::RmOptimistic => "rm_optimistic",
            Self::RmPlusPlus => "rm_pp",
        }
    }
}

impl fmt::Display for RmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for RmVariant {
    type Err = RegretError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|v| v.token() == s).ok_or_else(|| RegretError::Variant(s.to_string()))
    }
}

/// y per transformation and their sum z.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkOutputs {
    pub y: Vec<f64>,
    pub z: f64,
}

/// Regret state at one decision point.
#[derive(Clone, Debug)]
pub struct LocalLearner {
    variant: RmVariant,
    transformations: Vec<ActionTransformation>,
    /// (transformation index, key slot) of each cumulative entry.
    links: Vec<(usize, usize)>,
    cumulative: Vec<f64>,
    prediction: Vec<f64>,
}

impl LocalLearner {
    /// `links` pairs a transformation index with the key slot weighting it.
    pub fn new(variant: RmVariant, transformations: Vec<ActionTransformation>, links: Vec<(usize, usize)>) -> Self {
        debug_assert!(links.iter().all(|&(phi, _)| phi < transformations.len()));
        let n = links.len();
        Self { variant, transformations, links, cumulative: vec![0.0; n], prediction: vec![0.0; n] }
    }

    /// Every transformation linked to every one of `n_keys` keys.
    pub fn dense(variant: RmVariant, transformations: Vec<ActionTransformation>, n_keys: usize) -> Self {
        let links = (0..transformations.len()).flat_map(|phi| (0..n_keys).map(move |k| (phi, k))).collect();
        Self::new(variant, transformations, links)
    }

    pub fn variant(&self) -> RmVariant {
        self.variant
    }

    pub fn transformations(&self) -> &[ActionTransformation] {
        &self.transformations
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    /// Cumulative regret (or pseudo-regret) per link.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Overrides the optimistic predictions, one per link.
    pub fn set_prediction(&mut self, prediction: &[f64]) {
        self.prediction.copy_from_slice(prediction);
    }

    pub fn link_outputs(&self, weights: &[f64]) -> LinkOutputs {
        let mut y = vec![0.0; self.transformations.len()];
        let optimistic = self.variant == RmVariant::RmOptimistic;
        for (k, &(phi, slot)) in self.links.iter().enumerate() {
            let x = if optimistic { self.cumulative[k] + self.prediction[k] } else { self.cumulative[k] };
            if x > 0.0 {
                y[phi] += weights[slot] * x;
            }
        }
        let z = y.iter().sum();
        LinkOutputs { y, z }
    }

    /// Adds `weights[key] * regrets[phi]` to every link.
    pub fn update(&mut self, regrets: &[f64], weights: &[f64]) {
        for (k, &(phi, slot)) in self.links.iter().enumerate() {
            let r = weights[slot] * regrets[phi];
            let x = &mut self.cumulative[k];
            match self.variant {
                RmVariant::Rm => *x += r,
                RmVariant::RmPlus => *x = (*x + r).max(0.0),
                RmVariant::RmOptimistic => {
                    *x += r;
                    self.prediction[k] = r;
                }
                RmVariant::RmPlusPlus => *x += r.max(0.0),
            }
        }
    }

    pub fn strategy(&self, n_actions: usize, weights: &[f64]) -> Result<Vec<f64>, RegretError> {
        let out = self.link_outputs(weights);
        fixed_point(n_actions, &self.transformations, &out)
    }
}

/// A distribution σ with σ = (1/z) Σ_φ y_φ φ(σ); uniform when z = 0.
pub fn fixed_point(
    n_actions: usize,
    transformations: &[ActionTransformation],
    link: &LinkOutputs,
) -> Result<Vec<f64>, RegretError> {
    let n = n_actions;
    if link.z <= 0.0 || n == 1 {
        return Ok(vec![1.0 / n as f64; n]);
    }
    let active = || transformations.iter().zip(&link.y).filter(|(_, &y)| y > 0.0);
    if active().all(|(phi, _)| matches!(phi, ActionTransformation::External { .. })) {
        let mut sigma = vec![0.0; n];
        for (phi, &y) in active() {
            if let ActionTransformation::External { to } = phi {
                sigma[*to] += y;
            }
        }
        let total: f64 = sigma.iter().sum();
        return Ok(sigma.into_iter().map(|p| p / total).collect());
    }

    // rate[from][to]: weight moving mass from `from` to `to`. Dividing by z
    // would not change the stationary distribution, so it is skipped.
    let mut rate = vec![vec![0.0; n]; n];
    for (phi, &y) in active() {
        for (from, row) in rate.iter_mut().enumerate() {
            let to = phi.apply(from);
            if to != from {
                row[to] += y;
            }
        }
    }
    let sigma = stationary_from_uniform(&rate);
    let res = residual(&rate, link.z, &sigma);
    if res > FIXED_POINT_TOLERANCE {
        return Err(RegretError::FixedPoint { residual: res });
    }
    Ok(sigma)
}

/// The limit of the lazy chain started from the uniform distribution: each
/// closed class's stationary distribution, weighted by the uniform mass that
/// ends up absorbed in it. This is one fixed point on irreducible chains and
/// treats the actions symmetrically on reducible ones.
fn stationary_from_uniform(rate: &[Vec<f64>]) -> Vec<f64> {
    let n = rate.len();
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || rate[i][j] > 0.0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    reach[i][j] |= reach[k][j];
                }
            }
        }
    }
    // class_of[i] is Some(c) for states in the c-th closed class.
    let mut class_of = vec![None; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i].is_none() && (0..n).all(|j| !reach[i][j] || reach[j][i]) {
            let members: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            for &j in &members {
                class_of[j] = Some(classes.len());
            }
            classes.push(members);
        }
    }

    // Nodes 0..n are states and node n + c stands for the whole c-th class.
    // Eliminating the transient states one at a time pushes their mass, and
    // their routes through each other, onto the classes.
    let k = classes.len();
    let mut r = vec![vec![0.0; n + k]; n];
    let mut mass = vec![1.0 / n as f64; n + k];
    mass[n..].fill(0.0);
    for i in 0..n {
        match class_of[i] {
            Some(c) => {
                mass[n + c] += mass[i];
                mass[i] = 0.0;
            }
            None => {
                for j in 0..n {
                    match class_of[j] {
                        Some(c) => r[i][n + c] += rate[i][j],
                        None => r[i][j] = rate[i][j],
                    }
                }
            }
        }
    }
    let mut alive: Vec<bool> = class_of.iter().map(Option::is_none).collect();
    for t in 0..n {
        if !alive[t] {
            continue;
        }
        alive[t] = false;
        let live = |s: usize| s >= n || alive[s];
        // Returns to `t` only restart it, so they drop out of the split.
        let out: f64 = (0..n + k).filter(|&s| live(s)).map(|s| r[t][s]).sum();
        let split: Vec<f64> = (0..n + k).map(|s| if live(s) { r[t][s] / out } else { 0.0 }).collect();
        let moved = mass[t];
        mass[t] = 0.0;
        for (m, p) in mass.iter_mut().zip(&split) {
            *m += moved * p;
        }
        for i in 0..n {
            if alive[i] && r[i][t] > 0.0 {
                let via = std::mem::take(&mut r[i][t]);
                for (s, p) in split.iter().enumerate() {
                    if s != i {
                        r[i][s] += via * p;
                    }
                }
            }
        }
    }

    let mut sigma = vec![0.0; n];
    for (c, members) in classes.iter().enumerate() {
        let sub: Vec<Vec<f64>> = members.iter().map(|&i| members.iter().map(|&j| rate[i][j]).collect()).collect();
        for (&i, p) in members.iter().zip(gth(&sub)) {
            sigma[i] = mass[n + c] * p;
        }
    }
    let total: f64 = sigma.iter().sum();
    sigma.into_iter().map(|p| p / total).collect()
}

/// Stationary distribution of an irreducible chain by Grassmann-Taksar-Heyman
/// elimination. Only off-diagonal rates are read and nothing is subtracted,
/// so tiny rates survive next to large ones.
fn gth(rate: &[Vec<f64>]) -> Vec<f64> {
    let m = rate.len();
    let mut p = rate.to_vec();
    for k in (1..m).rev() {
        let s: f64 = p[k][..k].iter().sum();
        for i in 0..k {
            p[i][k] /= s;
        }
        for i in 0..k {
            let pik = p[i][k];
            if pik > 0.0 {
                for j in 0..k {
                    if i != j {
                        p[i][j] += pik * p[k][j];
                    }
                }
            }
        }
    }
    let mut pi = vec![0.0; m];
    pi[0] = 1.0;
    for j in 1..m {
        pi[j] = (0..j).map(|i| pi[i] * p[i][j]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.into_iter().map(|x| x / total).collect()
}

/// max_j |(M σ)_j - σ_j| for the stochastic matrix M = I + (rate - diag(out)) / z.
fn residual(rate: &[Vec<f64>], z: f64, sigma: &[f64]) -> f64 {
    let n = sigma.len();
    (0..n)
        .map(|j| {
            let inflow: f64 = (0..n).filter(|&i| i != j).map(|i| sigma[i] * rate[i][j]).sum();
            let outflow: f64 = sigma[j] * rate[j].iter().enumerate().filter(|&(k, _)| k != j).map(|(_, r)| r).sum::<f64>();
            ((inflow - outflow) / z).abs()
        })
        .fold(0.0, f64::max)
}

/// 2 U sqrt(M* ω T).
pub fn regret_bound(utility_bound: f64, max_keys: f64, activation: f64, rounds: usize) -> f64 {
    2.0 * utility_bound * (max_keys * activation * rounds as f64).sqrt()
}

/// Anything that picks a distribution over actions and learns from rewards.
pub trait OnlineLearner {
    fn policy(&self) -> Vec<f64>;
    fn observe(&mut self, rewards: &[f64]);
}

/// A learner over a plain action set: the external transformations with one
/// constant key, so regrets are those of ordinary regret matching.
#[derive(Clone, Debug)]
pub struct ActionLearner {
    inner: LocalLearner,
    n_actions: usize,
}

impl ActionLearner {
    pub fn new(variant: RmVariant, n_actions: usize) -> Self {
        let inner = LocalLearner::dense(variant, ActionTransformation::externals(n_actions).collect(), 1);
        Self { inner, n_actions }
    }

    /// Per-action cumulative values: regrets, pseudo-regrets or positive sums.
    pub fn cumulative(&self) -> &[f64] {
        self.inner.cumulative()
    }
}

impl OnlineLearner for ActionLearner {
    fn policy(&self) -> Vec<f64> {
        self.inner.strategy(self.n_actions, &[1.0]).expect("external-only fixed points are closed form")
    }

    fn observe(&mut self, rewards: &[f64]) {
        let pi = self.policy();
        let base: f64 = pi.iter().zip(rewards).map(|(p, r)| p * r).sum();
        let regrets: Vec<f64> = rewards.iter().map(|r| r - base).collect();
        self.inner.update(&regrets, &[1.0]);
    }
}

/// What the two-action adversary extracted from a learner.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdversaryTrace {
    pub rewards: Vec<[f64; 2]>,
    /// Q^t = max_a Σ_{s ≤ t} (r^s(a) - <π^s, r^s>)^+, for t = 1..T.
    pub positive_regret: Vec<f64>,
    /// max_a Σ_{s ≤ t} (r^s(a) - <π^s, r^s>), for t = 1..T.
    pub regret: Vec<f64>,
}

impl AdversaryTrace {
    /// Q^T, or 0 for an empty run.
    pub fn q(&self) -> f64 {
        self.positive_regret.last().copied().unwrap_or(0.0)
    }
}

/// Rewards the less likely action with 1 and the other with 0, every round.
pub fn rmpp_adversary(rounds: usize, learner: &mut impl OnlineLearner) -> AdversaryTrace {
    let mut trace = AdversaryTrace::default();
    let (mut pos, mut cum) = ([0.0; 2], [0.0; 2]);
    for _ in 0..rounds {
        let pi = learner.policy();
        assert_eq!(pi.len(), 2, "the adversary plays two-action games");
        let r = if pi[0] >= 0.5 { [0.0, 1.0] } else { [1.0, 0.0] };
        let base = pi[0] * r[0] + pi[1] * r[1];
        for a in 0..2 {
            pos[a] += (r[a] - base).max(0.0);
            cum[a] += r[a] - base;
        }
        learner.observe(&r);
        trace.rewards.push(r);
        trace.positive_regret.push(pos[0].max(pos[1]));
        trace.regret.push(cum[0].max(cum[1]));
    }
    trace
}
