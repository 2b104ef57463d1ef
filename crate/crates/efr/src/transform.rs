//! Action transformations: maps from an infoset's actions to its actions.

use std::fmt;

/// A map on the action indices of one information set.
///
/// `Internal { from, to }` with `from == to` is never constructed by the
/// generators; use [`ActionTransformation::internal`] which normalizes it to
/// `Identity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionTransformation {
    Identity,
    /// Always plays `to`.
    External { to: usize },
    /// Plays `to` when recommended `from`, otherwise follows the recommendation.
    Internal { from: usize, to: usize },
}

impl ActionTransformation {
    pub fn internal(from: usize, to: usize) -> Self {
        if from == to {
            Self::Identity
        } else {
            Self::Internal { from, to }
        }
    }

    pub fn apply(self, a: usize) -> usize {
        match self {
            Self::Identity => a,
            Self::External { to } => to,
            Self::Internal { from, to } => {
                if a == from {
                    to
                } else {
                    a
                }
            }
        }
    }

    /// Pushforward of an action distribution.
    pub fn apply_dist(self, sigma: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; sigma.len()];
        self.apply_dist_into(sigma, &mut out);
        out
    }

    pub fn apply_dist_into(self, sigma: &[f64], out: &mut [f64]) {
        match self {
            Self::Identity => out.copy_from_slice(sigma),
            Self::External { to } => {
                out.fill(0.0);
                out[to] = 1.0;
            }
            Self::Internal { from, to } => {
                out.copy_from_slice(sigma);
                out[to] += sigma[from];
                out[from] = 0.0;
            }
        }
    }

    /// Expected value of `values` under the transformed distribution, minus
    /// its expectation under `sigma`.
    pub fn value_gain(self, sigma: &[f64], values: &[f64]) -> f64 {
        match self {
            Self::Identity => 0.0,
            Self::External { to } => {
                let base: f64 = sigma.iter().zip(values).map(|(p, v)| p * v).sum();
                values[to] - base
            }
            Self::Internal { from, to } => sigma[from] * (values[to] - values[from]),
        }
    }

    pub fn is_identity(self) -> bool {
        matches!(self, Self::Identity)
    }

    /// Whether the deviation player observes the recommendation; external
    /// transformations hide it.
    pub fn observes(self) -> bool {
        !matches!(self, Self::External { .. })
    }

    pub fn is_valid_for(self, n_actions: usize) -> bool {
        match self {
            Self::Identity => true,
            Self::External { to } => to < n_actions,
            Self::Internal { from, to } => from < n_actions && to < n_actions && from != to,
        }
    }

    /// All external transformations on `n` actions.
    pub fn externals(n: usize) -> impl Iterator<Item = Self> {
        (0..n).map(|to| Self::External { to })
    }

    /// All non-identity internal transformations on `n` actions, ordered by
    /// trigger then target.
    pub fn internals(n: usize) -> impl Iterator<Item = Self> {
        (0..n).flat_map(move |from| {
            (0..n).filter(move |&to| to != from).map(move |to| Self::Internal { from, to })
        })
    }
}

impl fmt::Display for ActionTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "id"),
            Self::External { to } => write!(f, "->{to}"),
            Self::Internal { from, to } => write!(f, "{from}->{to}"),
        }
    }
}

/// Number of transformations in `set` that change action `s`, maximized over
/// `s`. This is the "maximal activation" of the set.
pub fn maximal_activation(set: &[ActionTransformation], n_actions: usize) -> usize {
    (0..n_actions)
        .map(|s| set.iter().filter(|phi| phi.apply(s) != s).count())
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn internal_with_equal_ends_is_identity() {
        assert_eq!(ActionTransformation::internal(2, 2), ActionTransformation::Identity);
    }

    #[test]
    fn pushforward_moves_trigger_mass() {
        let phi = ActionTransformation::internal(0, 2);
        assert_eq!(phi.apply_dist(&[0.5, 0.25, 0.25]), vec![0.0, 0.25, 0.75]);
        let ext = ActionTransformation::External { to: 1 };
        assert_eq!(ext.apply_dist(&[0.5, 0.25, 0.25]), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn value_gain_matches_pushforward_difference() {
        let sigma = [0.2, 0.3, 0.5];
        let v = [1.0, -2.0, 0.5];
        let dot = |p: &[f64]| p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        for phi in ActionTransformation::externals(3).chain(ActionTransformation::internals(3)) {
            let direct = dot(&phi.apply_dist(&sigma)) - dot(&sigma);
            assert!((phi.value_gain(&sigma, &v) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn activation_of_standard_sets() {
        for n in 1..6 {
            let ext: Vec<_> = ActionTransformation::externals(n).collect();
            let int: Vec<_> = ActionTransformation::internals(n).collect();
            assert_eq!(maximal_activation(&ext, n), n - 1);
            assert_eq!(maximal_activation(&int, n), n - 1);
            assert_eq!(int.len(), n * n - n);
        }
    }
}
