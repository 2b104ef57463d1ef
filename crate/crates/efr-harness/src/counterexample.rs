use efr::regret::{rmpp_adversary, ActionLearner, AdversaryTrace};
use efr::RmVariant;

/// The alternating two-action adversary run against one regret-matching
/// variant, with the two properties it is used to show.
#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub variant: RmVariant,
    pub trace: AdversaryTrace,
    /// First round t with Q^t < t/4, if any.
    pub first_below_quarter: Option<usize>,
    /// First round t whose maximum cumulative regret exceeds 2 sqrt(2t).
    pub first_above_bound: Option<usize>,
}

impl CounterexampleReport {
    pub fn rounds(&self) -> usize {
        self.trace.positive_regret.len()
    }
}

/// Payoffs lie in [0, 1], so U = 1 and |A| = 2.
pub fn counterexample(variant: RmVariant, rounds: usize) -> CounterexampleReport {
    let mut learner = ActionLearner::new(variant, 2);
    let trace = rmpp_adversary(rounds, &mut learner);
    let first = |bad: &dyn Fn(usize, f64) -> bool, xs: &[f64]| {
        xs.iter().enumerate().find(|&(k, &x)| bad(k + 1, x)).map(|(k, _)| k + 1)
    };
    let first_below_quarter = first(&|t, q| q < t as f64 / 4.0, &trace.positive_regret);
    let first_above_bound = first(&|t, r| r > 2.0 * (2.0 * t as f64).sqrt(), &trace.regret);
    CounterexampleReport { variant, trace, first_below_quarter, first_above_bound }
}
