//! Extensive-form regret minimization (EFR) for behavioral deviations.
//!
//! The crate is layered bottom-up:
//!
//! - [`game`]: explicit game trees, strategies, reach probabilities and
//!   counterfactual values, plus a line-oriented text format.
//! - [`games`]: Kuhn poker, Leduc hold'em, goofspiel and Sheriff generators.
//! - [`deviation`]: action transformations, behavioral deviations, memory
//!   states, the per-type transformation and time-selection generators, and
//!   pure-strategy deviation maps for small games.
//! - [`regret`]: time-selection regret matching with fixed-point strategies.
//! - [`learner`]: the EFR learner itself.
//! - [`audit`]: brute-force oracles (full regret, observable sequential
//!   rationality gap, best responses) for small games.

pub mod audit;
pub mod deviation;
pub mod game;
pub mod games;
pub mod learner;
pub mod regret;
pub mod transform;

pub use deviation::DeviationType;
pub use game::{Game, InfosetId, NodeId, Player, StrategyProfile, BehavioralStrategy};
pub use learner::{EfrLearner, RmVariant};
pub use transform::ActionTransformation;

// The guide's snippets run as doc-tests, one module per chapter so a failure
// names its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/deviations.md")]
    mod deviations {}
    #[doc = include_str!("../../../book/src/regret-matching.md")]
    mod regret_matching {}
    #[doc = include_str!("../../../book/src/learner.md")]
    mod learner {}
    #[doc = include_str!("../../../book/src/audit.md")]
    mod audit {}
}
