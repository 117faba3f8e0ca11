//! The sequential game protocol and regret accounting.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adversaries::{Adversary, AdversaryView};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::rng::{stream_rng, ADVERSARY_STREAM, LEARNER_STREAM};
use crate::space::ActionSpace;
use crate::stats::{argmax, Estimate};

/// The adversary's payoff for one round, evaluated at every point of the action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardFunction(pub Vec<f64>);

impl RewardFunction {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|y(x) - y(x')| / |x - x'|` over lattice neighbours.
    pub fn grid_lipschitz(&self, space: &ActionSpace) -> f64 {
        let Some(spacing) = space.grid_spacing() else {
            return 0.0;
        };
        space
            .grid_neighbors()
            .into_iter()
            .map(|(i, j)| (self.0[i] - self.0[j]).abs() / spacing)
            .fold(0.0, f64::max)
    }

    /// SHA-256 of the little-endian bytes of the values, hex encoded.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for v in &self.0 {
            hasher.update(v.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

impl From<Vec<f64>> for RewardFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Returns the maximizing index (smallest on ties) and the maximum.
pub fn best_in_hindsight(cumulative: &[f64]) -> Result<(usize, f64)> {
    if cumulative.is_empty() {
        return Err(Error::invalid("best_in_hindsight of an empty vector"));
    }
    let i = argmax(cumulative);
    Ok((i, cumulative[i]))
}

/// Full record of one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub horizon: usize,
    pub actions: Vec<usize>,
    pub rewards: Vec<RewardFunction>,
    /// `cumulative[t]` is `y_1 + ... + y_t`; `cumulative[0]` is zero.
    pub cumulative: Vec<Vec<f64>>,
    pub seed: u64,
}

impl Trajectory {
    pub fn new(rewards: Vec<RewardFunction>, actions: Vec<usize>, seed: u64) -> Result<Self> {
        if rewards.is_empty() || rewards.len() != actions.len() {
            return Err(Error::invalid(format!(
                "trajectory needs T >= 1 rewards and one action per round (got {} and {})",
                rewards.len(),
                actions.len()
            )));
        }
        let n = rewards[0].len();
        let mut cumulative = Vec::with_capacity(rewards.len() + 1);
        cumulative.push(vec![0.0; n]);
        for (t, (y, &a)) in rewards.iter().zip(&actions).enumerate() {
            if y.len() != n || a >= n {
                return Err(Error::invalid(format!("round {} does not match {n} actions", t + 1)));
            }
            let next = cumulative[t].iter().zip(y.values()).map(|(c, v)| c + v).collect();
            cumulative.push(next);
        }
        Ok(Self { horizon: rewards.len(), actions, rewards, cumulative, seed })
    }

    /// Rewards with no actions attached; used by the analysis estimators on fixed sequences.
    pub fn oblivious(rewards: Vec<RewardFunction>) -> Result<Self> {
        let actions = vec![0; rewards.len()];
        Self::new(rewards, actions, 0)
    }

    pub fn n_actions(&self) -> usize {
        self.cumulative[0].len()
    }

    pub fn final_cumulative(&self) -> &[f64] {
        &self.cumulative[self.horizon]
    }

    pub fn collected(&self, t: usize) -> f64 {
        self.rewards[t - 1].values()[self.actions[t - 1]]
    }

    pub fn total_collected(&self) -> f64 {
        (1..=self.horizon).map(|t| self.collected(t)).sum()
    }

    /// One JSON object per round: `t`, `action`, `reward_sha256`, `reward`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for t in 1..=self.horizon {
            let line = serde_json::json!({
                "t": t,
                "action": self.actions[t - 1],
                "reward_sha256": self.rewards[t - 1].digest(),
                "reward": self.collected(t),
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// Best-in-hindsight total minus collected reward.
pub fn realized_regret(trajectory: &Trajectory) -> f64 {
    let best = best_in_hindsight(trajectory.final_cumulative()).map(|(_, v)| v).unwrap_or(0.0);
    best - trajectory.total_collected()
}

/// Realized regret together with optional decomposition estimates and a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub realized_regret: f64,
    pub best_in_hindsight_value: f64,
    pub prior_regret_estimate: Option<Estimate>,
    pub excess_regret_estimate: Option<Estimate>,
    pub bregman_sum_estimate: Option<Estimate>,
    pub bound_value: Option<f64>,
}

impl RegretReport {
    pub fn from_trajectory(trajectory: &Trajectory) -> Self {
        let best = best_in_hindsight(trajectory.final_cumulative()).map(|(_, v)| v).unwrap_or(0.0);
        Self {
            realized_regret: best - trajectory.total_collected(),
            best_in_hindsight_value: best,
            prior_regret_estimate: None,
            excess_regret_estimate: None,
            bregman_sum_estimate: None,
            bound_value: None,
        }
    }
}

/// Plays `horizon` rounds. The adversary commits `y_t` seeing the history and the
/// learner's sampling rule but not `x_t`; the learner sees `y_1..y_{t-1}` only.
/// Learner and adversary draw from separate streams of `seed`.
pub fn play_game(
    learner: &Learner,
    adversary: &Adversary,
    space: &ActionSpace,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let n = space.len();
    if learner.n_actions() != n || adversary.space().len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: space {n}, learner {}, adversary {}",
            learner.n_actions(),
            adversary.space().len()
        )));
    }
    let mut learner_rng = stream_rng(seed, LEARNER_STREAM);
    let mut adversary_rng = stream_rng(seed, ADVERSARY_STREAM);
    let mut cumulative = vec![vec![0.0; n]];
    let mut actions = Vec::with_capacity(horizon);
    let mut rewards = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let past = &cumulative[t - 1];
        let view = AdversaryView { t, horizon, cumulative: past, actions: &actions };
        let y = adversary.next_round(&view, learner, &mut adversary_rng)?;
        if y.len() != n {
            return Err(Error::invalid(format!("adversary returned {} values for {n} actions", y.len())));
        }
        let a = learner.act(past, t, horizon, &mut learner_rng)?;
        let next: Vec<f64> = past.iter().zip(y.values()).map(|(c, v)| c + v).collect();
        cumulative.push(next);
        actions.push(a);
        rewards.push(y);
    }
    Ok(Trajectory { horizon, actions, rewards, cumulative, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::AdversarySpec;
    use crate::gp::KernelSpec;
    use crate::learners::LearnerSpec;

    fn fixed(rows: &[&[f64]]) -> Vec<RewardFunction> {
        rows.iter().map(|r| RewardFunction(r.to_vec())).collect()
    }

    #[test]
    fn best_in_hindsight_examples() {
        assert_eq!(best_in_hindsight(&[0.0, 0.0, 0.0]).unwrap(), (0, 0.0));
        assert_eq!(best_in_hindsight(&[1.0, 3.0, 2.0]).unwrap(), (1, 3.0));
        let t = Trajectory::oblivious(fixed(&[&[1.0, 0.0], &[1.0, 0.0]])).unwrap();
        assert_eq!(best_in_hindsight(t.final_cumulative()).unwrap(), (0, 2.0));
        assert!(matches!(best_in_hindsight(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn realized_regret_examples() {
        let t = Trajectory::new(fixed(&[&[1.0, 0.0], &[1.0, 0.0]]), vec![1, 1], 0).unwrap();
        assert_eq!(realized_regret(&t), 2.0);

        // Collecting 2 while the best fixed arm earns 1 gives regret -1.
        let t = Trajectory::new(fixed(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![0, 1], 0).unwrap();
        assert_eq!(best_in_hindsight(t.final_cumulative()).unwrap(), (0, 1.0));
        assert_eq!(realized_regret(&t), -1.0);
        let report = RegretReport::from_trajectory(&t);
        assert_eq!(report.best_in_hindsight_value, 1.0);

        let t = Trajectory::new(fixed(&[&[0.2, 0.5], &[0.3, 0.1], &[0.9, 0.0]]), vec![0, 0, 0], 0).unwrap();
        assert_eq!(realized_regret(&t), 0.0);
    }

    #[test]
    fn cumulative_sums_are_consistent() {
        let t = Trajectory::oblivious(fixed(&[&[1.0, -1.0], &[0.5, 2.0], &[-3.0, 0.0]])).unwrap();
        assert_eq!(t.cumulative[0], vec![0.0, 0.0]);
        for s in 1..=3 {
            for i in 0..2 {
                assert_eq!(t.cumulative[s][i] - t.cumulative[s - 1][i], t.rewards[s - 1].values()[i]);
            }
        }
    }

    #[test]
    fn follow_the_leader_against_constant_adversary() {
        let space = ActionSpace::finite(2).unwrap();
        let prior = KernelSpec::diagonal_white(1.0).unwrap();
        // FTPL with eta = 0 is follow-the-leader.
        let learner = Learner::new(&LearnerSpec::Ftpl { prior, eta: 0.0 }, &space).unwrap();
        let seq = vec![RewardFunction(vec![1.0, 0.0]); 20];
        let adversary = Adversary::new(&AdversarySpec::fixed(seq), &space).unwrap();
        let t = play_game(&learner, &adversary, &space, 20, 4).unwrap();
        assert!(realized_regret(&t) <= 1.0);
    }

    #[test]
    fn zero_adversary_single_round() {
        let space = ActionSpace::finite(3).unwrap();
        let learner = Learner::new(&LearnerSpec::Uniform, &space).unwrap();
        let adversary = Adversary::new(&AdversarySpec::fixed(vec![RewardFunction::zeros(3)]), &space).unwrap();
        let t = play_game(&learner, &adversary, &space, 1, 0).unwrap();
        assert_eq!(realized_regret(&t), 0.0);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let space = ActionSpace::finite(5).unwrap();
        let prior = KernelSpec::diagonal_white(2f64.sqrt()).unwrap();
        let learner = Learner::new(&LearnerSpec::Thompson { prior }, &space).unwrap();
        let adversary = Adversary::new(&AdversarySpec::Rademacher, &space).unwrap();
        let a = play_game(&learner, &adversary, &space, 50, 77).unwrap();
        let b = play_game(&learner, &adversary, &space, 50, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        let c = play_game(&learner, &adversary, &space, 50, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let two = ActionSpace::finite(2).unwrap();
        let three = ActionSpace::finite(3).unwrap();
        let learner = Learner::new(&LearnerSpec::Uniform, &two).unwrap();
        let adversary = Adversary::new(&AdversarySpec::Rademacher, &three).unwrap();
        assert!(matches!(play_game(&learner, &adversary, &two, 5, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(
            play_game(&learner, &Adversary::new(&AdversarySpec::Rademacher, &two).unwrap(), &two, 0, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn jsonl_has_one_line_per_round() {
        let t = Trajectory::new(fixed(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![0, 0], 3).unwrap();
        let text = t.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["t"], 2);
        assert_eq!(v["action"], 0);
        assert_eq!(v["reward"], 0.0);
        assert_eq!(v["reward_sha256"].as_str().unwrap().len(), 64);
    }
}
