//! Independent replications of a game, run in parallel with deterministic seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::Adversary;
use crate::error::Result;
use crate::game::{play_game, realized_regret};
use crate::learners::Learner;
use crate::rng::derive_seed;
use crate::space::ActionSpace;
use crate::stats::{Estimate, MeanAccumulator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replications {
    pub seeds: Vec<u64>,
    pub regrets: Vec<f64>,
    pub mean_regret: Estimate,
}

/// Seed of replication `index` under base seed `seed`.
pub fn replication_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Plays `replications` games; results are ordered by replication index
/// regardless of scheduling.
pub fn run_replications(
    learner: &Learner,
    adversary: &Adversary,
    space: &ActionSpace,
    horizon: usize,
    replications: usize,
    seed: u64,
) -> Result<Replications> {
    let seeds: Vec<u64> = (0..replications).map(|r| replication_seed(seed, r)).collect();
    let regrets: Vec<f64> = seeds
        .par_iter()
        .map(|&s| play_game(learner, adversary, space, horizon, s).map(|t| realized_regret(&t)))
        .collect::<Result<_>>()?;
    let acc: MeanAccumulator = regrets.iter().copied().collect();
    Ok(Replications { seeds, regrets, mean_regret: acc.estimate() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::AdversarySpec;
    use crate::learners::LearnerSpec;

    #[test]
    fn replications_are_deterministic_and_ordered() {
        let space = ActionSpace::finite(3).unwrap();
        let learner = Learner::new(&LearnerSpec::Uniform, &space).unwrap();
        let adversary = Adversary::new(&AdversarySpec::Rademacher, &space).unwrap();
        let a = run_replications(&learner, &adversary, &space, 20, 16, 5).unwrap();
        let b = run_replications(&learner, &adversary, &space, 20, 16, 5).unwrap();
        assert_eq!(a, b);
        let single = realized_regret(&play_game(&learner, &adversary, &space, 20, a.seeds[7]).unwrap());
        assert_eq!(single, a.regrets[7]);
        assert_eq!(a.mean_regret.n, 16);
    }
}
