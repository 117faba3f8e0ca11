//! Prior/excess regret decomposition and Bregman divergences of `Gamma*_t`,
//! estimated with common random numbers.
//!
//! With `s_t = sqrt(T - t + 1)`, `Gamma*_t(f) = E max(f + s_t gamma)`. Each draw of
//! `gamma` is shared by every maximum taken in a round, so the differences below
//! are paired.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Trajectory;
use crate::gp::{sup_mc, GpSampler, KernelSpec};
use crate::learners::{Learner, LearnerSpec};
use crate::rng::{derive_seed, rng_from_seed, stream_rng};
use crate::space::ActionSpace;
use crate::stats::{argmax, pooled_stderr, Estimate, MeanAccumulator};

/// Stream used to resample a learner's action independently of the prior draws.
const RESAMPLE_STREAM: u64 = 2;

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn check_round(t: usize, horizon: usize, max_t: usize) -> Result<()> {
    if t == 0 || t > max_t {
        return Err(Error::invalid(format!("round {t} outside 1..={max_t} for horizon {horizon}")));
    }
    Ok(())
}

/// `Gamma*_t(f) = E max_x (f(x) + sqrt(T - t + 1) gamma(x))`; exact at `t = T + 1`.
pub fn gamma_star_mc<R: Rng + ?Sized>(
    f: &[f64],
    t: usize,
    horizon: usize,
    sampler: &GpSampler,
    n: usize,
    rng: &mut R,
) -> Result<Estimate> {
    check_round(t, horizon, horizon + 1)?;
    if f.len() != sampler.len() {
        return Err(Error::invalid("reward vector does not match the prior"));
    }
    if t == horizon + 1 {
        return Ok(Estimate { value: max_of(f), stderr: 0.0, n: n as u64 });
    }
    if n < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    let scale = ((horizon - t + 1) as f64).sqrt();
    let mut buf = vec![0.0; f.len()];
    let mut acc = MeanAccumulator::new();
    for _ in 0..n {
        sampler.sample_into(scale, rng, &mut buf);
        acc.push(buf.iter().zip(f).map(|(g, v)| g + v).fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(acc.estimate())
}

/// `D_{Gamma*_t}(y_{1:t} || y_{1:t-1})` as `E[(y_{1:t} + s gamma)(x*_new) - (y_{1:t} + s gamma)(x*_old)]`,
/// where `x*_new`, `x*_old` maximize `y_{1:t} + s gamma` and `y_{1:t-1} + s gamma`.
pub fn bregman_divergence_mc<R: Rng + ?Sized>(
    current: &[f64],
    previous: &[f64],
    t: usize,
    horizon: usize,
    sampler: &GpSampler,
    n: usize,
    rng: &mut R,
) -> Result<Estimate> {
    check_round(t, horizon, horizon)?;
    if current.len() != previous.len() || current.len() != sampler.len() {
        return Err(Error::invalid("cumulative vectors do not match the prior"));
    }
    if n < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    let scale = ((horizon - t + 1) as f64).sqrt();
    let mut gamma = vec![0.0; current.len()];
    let mut old = vec![0.0; current.len()];
    let mut new = vec![0.0; current.len()];
    let mut acc = MeanAccumulator::new();
    for _ in 0..n {
        sampler.sample_into(scale, rng, &mut gamma);
        for i in 0..gamma.len() {
            old[i] = previous[i] + gamma[i];
            new[i] = current[i] + gamma[i];
        }
        acc.push(max_of(&new) - new[argmax(&old)]);
    }
    Ok(acc.estimate())
}

/// Per-round excess regret `E_t` and Bregman divergence `D_t`, with the prior regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionEstimate {
    pub per_round_excess: Vec<Estimate>,
    pub per_round_bregman: Vec<Estimate>,
    /// Paired estimates of `E_t - D_t`.
    pub per_round_gap: Vec<Estimate>,
    /// `Gamma*_1(0) = sqrt(T) E sup gamma`.
    pub prior_regret: Estimate,
    pub total_excess: Estimate,
    pub total_bregman: Estimate,
    pub total_gap: Estimate,
    /// `prior_regret + total_excess`: the learner's expected regret on this sequence.
    pub expected_regret: Estimate,
    pub seed: u64,
}

/// Splits the learner's expected regret on the trajectory's reward sequence into
/// the prior regret and per-round excess terms
/// `E_t = Gamma*_{t+1}(y_{1:t}) - Gamma*_t(y_{1:t-1}) - <y_t, p_t>`; the term
/// `E <gamma_t, p_t^gamma>` vanishes because the prior is centred.
///
/// When the learner is Thompson sampling with this prior, `<y_t, p_t>` uses the
/// argmax of the shared draw; otherwise the learner's action is resampled on an
/// independent stream.
pub fn decompose_regret(
    trajectory: &Trajectory,
    prior: &KernelSpec,
    space: &ActionSpace,
    learner: &Learner,
    n: usize,
    seed: u64,
) -> Result<DecompositionEstimate> {
    if n < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    if trajectory.n_actions() != space.len() || learner.n_actions() != space.len() {
        return Err(Error::invalid("trajectory, learner and space dimensions differ"));
    }
    let sampler = GpSampler::new(prior, space.points())?;
    let paired = matches!(learner.spec(), LearnerSpec::Thompson { prior: p } if p == prior);
    let horizon = trajectory.horizon;
    let mut prior_rng = rng_from_seed(derive_seed(seed, 0));
    let prior_regret = sup_mc(&sampler, (horizon as f64).sqrt(), n, &mut prior_rng)?;

    let rounds: Vec<[Estimate; 3]> = (1..=horizon)
        .into_par_iter()
        .map(|t| round_terms(trajectory, &sampler, learner, paired, t, n, derive_seed(seed, t as u64)))
        .collect::<Result<_>>()?;

    let per_round_excess: Vec<Estimate> = rounds.iter().map(|r| r[0]).collect();
    let per_round_bregman: Vec<Estimate> = rounds.iter().map(|r| r[1]).collect();
    let per_round_gap: Vec<Estimate> = rounds.iter().map(|r| r[2]).collect();
    let total_excess = Estimate::sum(&per_round_excess);
    Ok(DecompositionEstimate {
        total_bregman: Estimate::sum(&per_round_bregman),
        total_gap: Estimate::sum(&per_round_gap),
        expected_regret: Estimate::sum([&prior_regret, &total_excess]),
        per_round_excess,
        per_round_bregman,
        per_round_gap,
        prior_regret,
        total_excess,
        seed,
    })
}

fn round_terms(
    trajectory: &Trajectory,
    sampler: &GpSampler,
    learner: &Learner,
    paired: bool,
    t: usize,
    n: usize,
    seed: u64,
) -> Result<[Estimate; 3]> {
    let horizon = trajectory.horizon;
    let previous = &trajectory.cumulative[t - 1];
    let current = &trajectory.cumulative[t];
    let y = trajectory.rewards[t - 1].values();
    let s = ((horizon - t + 1) as f64).sqrt();
    let s_next = ((horizon - t) as f64).sqrt();
    let mut rng = rng_from_seed(seed);
    let mut learner_rng = stream_rng(seed, RESAMPLE_STREAM);
    let len = y.len();
    let (mut gamma, mut old, mut new) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut excess, mut bregman, mut gap) = (MeanAccumulator::new(), MeanAccumulator::new(), MeanAccumulator::new());
    for _ in 0..n {
        sampler.sample_into(1.0, &mut rng, &mut gamma);
        let mut next_max = f64::NEG_INFINITY;
        for i in 0..len {
            old[i] = previous[i] + s * gamma[i];
            new[i] = current[i] + s * gamma[i];
            next_max = next_max.max(current[i] + s_next * gamma[i]);
        }
        let leader = argmax(&old);
        let played = if paired { leader } else { learner.act(previous, t, horizon, &mut learner_rng)? };
        let e = next_max - old[leader] - y[played];
        let d = max_of(&new) - new[leader];
        excess.push(e);
        bregman.push(d);
        gap.push(e - d);
    }
    Ok([excess.estimate(), bregman.estimate(), gap.estimate()])
}

/// Outcome of comparing the total excess regret against the Bregman sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BregmanReport {
    pub total_excess: Estimate,
    pub total_bregman: Estimate,
    /// `total_bregman - total_excess`; never asserted to be small.
    pub slack: f64,
    /// `3 * pooled stderr` of the two totals.
    pub tolerance: f64,
    /// Smallest `D_t / stderr(D_t)` over rounds with nonzero stderr.
    pub min_bregman_z: f64,
    pub holds: bool,
    pub seed: u64,
}

/// Checks `sum_t E_t <= sum_t D_t + 3 pooled stderr` for Thompson sampling with
/// `prior` on the trajectory's reward sequence, plus `D_t >= -3 stderr` per round.
/// A violation is reported, not raised.
pub fn verify_bregman_bound(
    trajectory: &Trajectory,
    prior: &KernelSpec,
    space: &ActionSpace,
    n: usize,
    seed: u64,
) -> Result<BregmanReport> {
    let learner = Learner::new(&LearnerSpec::Thompson { prior: *prior }, space)?;
    let dec = decompose_regret(trajectory, prior, space, &learner, n, seed)?;
    let tolerance = 3.0 * pooled_stderr(dec.total_excess.stderr, dec.total_bregman.stderr);
    let min_bregman_z = dec
        .per_round_bregman
        .iter()
        .filter(|d| d.stderr > 0.0)
        .map(|d| d.value / d.stderr)
        .fold(f64::INFINITY, f64::min);
    let nonnegative = dec.per_round_bregman.iter().all(|d| d.value >= -3.0 * d.stderr);
    Ok(BregmanReport {
        slack: dec.total_bregman.value - dec.total_excess.value,
        holds: dec.total_excess.value <= dec.total_bregman.value + tolerance && nonnegative,
        total_excess: dec.total_excess,
        total_bregman: dec.total_bregman,
        tolerance,
        min_bregman_z,
        seed,
    })
}
