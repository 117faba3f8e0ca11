//! Shared fixtures for the benchmarks.

use gpts_core::{ActionSpace, Adversary, AdversarySpec, KernelSpec, Learner, LearnerSpec};

/// Thompson with a white prior against Rademacher rewards on `n` experts.
pub fn finite_setup(n: usize) -> (ActionSpace, Learner, Adversary) {
    let space = ActionSpace::finite(n).expect("n >= 1");
    let prior = KernelSpec::diagonal_white(2f64.sqrt()).expect("positive sigma");
    let learner = Learner::new(&LearnerSpec::Thompson { prior }, &space).expect("valid learner");
    let adversary = Adversary::new(&AdversarySpec::Rademacher, &space).expect("valid adversary");
    (space, learner, adversary)
}

/// Thompson with a Matérn-1/2 prior against the zigzag adversary on a 1-d grid.
pub fn lipschitz_setup(points: usize) -> (ActionSpace, Learner, Adversary) {
    let space = ActionSpace::cube_grid(1, points).expect("points >= 1");
    let prior = KernelSpec::matern_half(1.0, 1.0).expect("positive parameters");
    let learner = Learner::new(&LearnerSpec::Thompson { prior }, &space).expect("valid learner");
    let spec = AdversarySpec::LipschitzZigzag { beta: 1.0, lambda: 1.0 };
    let adversary = Adversary::new(&spec, &space).expect("valid adversary");
    (space, learner, adversary)
}
