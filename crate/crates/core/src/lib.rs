//! Thompson sampling with Gaussian-process priors for full-information online learning.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversaries;
pub mod analysis;
pub mod error;
pub mod experiment;
pub mod game;
pub mod gp;
pub mod learners;
pub mod rng;
pub mod space;
pub mod stats;

pub use adversaries::{Adversary, AdversarySpec, AdversaryView};
pub use error::{Error, Result};
pub use experiment::{run_replications, Replications};
pub use game::{best_in_hindsight, play_game, realized_regret, RegretReport, RewardFunction, Trajectory};
pub use gp::{GpSample, GpSampler, KernelFamily, KernelSpec};
pub use learners::{Learner, LearnerSpec};
pub use space::{ActionSpace, Point, SpaceKind};
pub use stats::Estimate;
