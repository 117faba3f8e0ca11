//! Adversary strategies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::RewardFunction;
use crate::learners::Learner;
use crate::space::ActionSpace;

/// Learner simulations per round used to estimate a randomized learner's strategy.
pub const FREQUENCY_SIMULATIONS: usize = 256;

const AUDIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversarySpec {
    /// IID signs per expert per round.
    Rademacher,
    /// The base adversary with its per-round constant mean removed.
    Centered { base: Box<AdversarySpec> },
    /// Random-sign spikes of height `beta` and slope `lambda` on a cube grid.
    LipschitzZigzag { beta: f64, lambda: f64 },
    /// Punishes the learner's most probable arm and rewards its best competitor.
    AdaptiveGreedy { bound: f64 },
    /// A fixed oblivious sequence; must cover the whole horizon.
    Fixed { rewards: Vec<RewardFunction> },
}

impl AdversarySpec {
    pub fn centered(base: AdversarySpec) -> Self {
        Self::Centered { base: Box::new(base) }
    }

    pub fn fixed(rewards: Vec<RewardFunction>) -> Self {
        Self::Fixed { rewards }
    }
}

/// Everything the adversary may look at before committing `y_t`.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryView<'a> {
    pub t: usize,
    pub horizon: usize,
    /// `y_1 + ... + y_{t-1}`.
    pub cumulative: &'a [f64],
    /// Actions `x_1, ..., x_{t-1}`; the current action is not available.
    pub actions: &'a [usize],
}

#[derive(Debug, Clone)]
pub struct Adversary {
    spec: AdversarySpec,
    space: ActionSpace,
}

impl Adversary {
    pub fn new(spec: &AdversarySpec, space: &ActionSpace) -> Result<Self> {
        validate(spec, space)?;
        Ok(Self { spec: spec.clone(), space: space.clone() })
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    /// Draws `y_t`. The learner is consulted only through its sampling rule.
    pub fn next_round<R: Rng + ?Sized>(
        &self,
        view: &AdversaryView<'_>,
        learner: &Learner,
        rng: &mut R,
    ) -> Result<RewardFunction> {
        round(&self.spec, &self.space, view, learner, rng)
    }
}

fn validate(spec: &AdversarySpec, space: &ActionSpace) -> Result<()> {
    match spec {
        AdversarySpec::Rademacher => {
            if !space.is_finite() {
                return Err(Error::invalid("the Rademacher adversary needs a finite action space"));
            }
        }
        AdversarySpec::Centered { base } => validate(base, space)?,
        AdversarySpec::LipschitzZigzag { beta, lambda } => {
            zigzag_check(space, *beta, *lambda)?;
        }
        AdversarySpec::AdaptiveGreedy { bound } => {
            if !space.is_finite() {
                return Err(Error::invalid("the adaptive greedy adversary needs a finite action space"));
            }
            if !(*bound > 0.0 && bound.is_finite()) {
                return Err(Error::invalid(format!("adversary bound must be positive, got {bound}")));
            }
        }
        AdversarySpec::Fixed { rewards } => {
            if rewards.is_empty() {
                return Err(Error::invalid("fixed adversary needs at least one round"));
            }
            if let Some(t) = rewards.iter().position(|y| y.len() != space.len()) {
                return Err(Error::invalid(format!(
                    "fixed reward {} has {} values for {} actions",
                    t + 1,
                    rewards[t].len(),
                    space.len()
                )));
            }
        }
    }
    Ok(())
}

fn round<R: Rng + ?Sized>(
    spec: &AdversarySpec,
    space: &ActionSpace,
    view: &AdversaryView<'_>,
    learner: &Learner,
    rng: &mut R,
) -> Result<RewardFunction> {
    match spec {
        AdversarySpec::Rademacher => Ok(rademacher_round(space, rng)),
        AdversarySpec::Centered { base } => {
            let mut y = round(base, space, view, learner, rng)?;
            // Rademacher and zigzag rounds already have conditional mean zero.
            let c = match base.as_ref() {
                AdversarySpec::Fixed { .. } | AdversarySpec::AdaptiveGreedy { .. } => {
                    y.values().iter().sum::<f64>() / y.len() as f64
                }
                _ => 0.0,
            };
            y.0.iter_mut().for_each(|v| *v -= c);
            Ok(y)
        }
        AdversarySpec::LipschitzZigzag { beta, lambda } => lipschitz_zigzag_round(space, *beta, *lambda, rng),
        AdversarySpec::AdaptiveGreedy { bound } => {
            let freqs =
                learner.action_probabilities(view.cumulative, view.t, view.horizon, FREQUENCY_SIMULATIONS, rng)?;
            adaptive_greedy_round(&freqs, view.cumulative, *bound)
        }
        AdversarySpec::Fixed { rewards } => rewards.get(view.t - 1).cloned().ok_or_else(|| {
            Error::invalid(format!("fixed adversary has {} rounds, horizon is {}", rewards.len(), view.horizon))
        }),
    }
}

pub fn rademacher_round<R: Rng + ?Sized>(space: &ActionSpace, rng: &mut R) -> RewardFunction {
    RewardFunction((0..space.len()).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
}

/// Removes a constant from every reward in the batch: `known_mean` when given,
/// otherwise the grand mean of the batch over rounds and coordinates.
pub fn center_adversary(batch: &[RewardFunction], known_mean: Option<f64>) -> Result<Vec<RewardFunction>> {
    let count: usize = batch.iter().map(RewardFunction::len).sum();
    if batch.is_empty() || count == 0 {
        return Err(Error::invalid("cannot center an empty batch"));
    }
    let c = known_mean.unwrap_or_else(|| batch.iter().flat_map(|y| y.values()).sum::<f64>() / count as f64);
    Ok(batch.iter().map(|y| RewardFunction(y.values().iter().map(|v| v - c).collect())).collect())
}

fn zigzag_check(space: &ActionSpace, beta: f64, lambda: f64) -> Result<()> {
    let Some(spacing) = space.grid_spacing() else {
        return Err(Error::invalid("the zigzag adversary needs a cube grid"));
    };
    if !(beta > 0.0 && beta.is_finite()) || !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("zigzag needs beta > 0 and lambda >= 0, got {beta} and {lambda}")));
    }
    if lambda > 0.0 && spacing > 2.0 * beta / lambda {
        return Err(Error::invalid(format!(
            "grid spacing {spacing} exceeds the spike width 2*beta/lambda = {}",
            2.0 * beta / lambda
        )));
    }
    Ok(())
}

/// One zigzag draw. The cube is cut into cells of side `2 beta / lambda`; each cell
/// carries a cone `s * max(0, beta - lambda |x - c|)` around its centre `c` with an
/// independent sign `s`. In one dimension this is the usual tent; with `lambda = 0`
/// it is the constant `s * beta`.
pub fn lipschitz_zigzag_round<R: Rng + ?Sized>(
    space: &ActionSpace,
    beta: f64,
    lambda: f64,
    rng: &mut R,
) -> Result<RewardFunction> {
    zigzag_check(space, beta, lambda)?;
    let d = space.dim();
    let values = if lambda == 0.0 {
        let s = if rng.random::<bool>() { beta } else { -beta };
        vec![s; space.len()]
    } else {
        let width = 2.0 * beta / lambda;
        let cells = (1.0 / width).ceil().max(1.0) as usize;
        let total = cells.checked_pow(d as u32).ok_or_else(|| Error::invalid("too many zigzag cells"))?;
        let signs: Vec<f64> = (0..total).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        space
            .points()
            .iter()
            .map(|x| {
                let mut cell = 0;
                let mut dist2 = 0.0;
                for &xk in x {
                    let k = ((xk / width).floor() as usize).min(cells - 1);
                    cell = cell * cells + k;
                    let c = (k as f64 + 0.5) * width;
                    dist2 += (xk - c) * (xk - c);
                }
                signs[cell] * (beta - lambda * dist2.sqrt()).max(0.0)
            })
            .collect()
    };
    let y = RewardFunction(values);
    audit_lipschitz(&y, space, beta, lambda)?;
    Ok(y)
}

/// Checks `|y| <= beta` and `|y(x) - y(x')| <= lambda * spacing` over lattice neighbours.
pub fn audit_lipschitz(y: &RewardFunction, space: &ActionSpace, beta: f64, lambda: f64) -> Result<()> {
    if y.sup_norm() > beta + AUDIT_SLACK {
        return Err(Error::ConstraintViolation(format!("sup norm {} exceeds {beta}", y.sup_norm())));
    }
    let spacing = space.grid_spacing().unwrap_or(1.0);
    let v = y.values();
    for (i, j) in space.grid_neighbors() {
        let diff = (v[i] - v[j]).abs();
        if diff > lambda * spacing + AUDIT_SLACK {
            return Err(Error::ConstraintViolation(format!(
                "neighbour difference {diff} exceeds lambda * spacing = {}",
                lambda * spacing
            )));
        }
    }
    Ok(())
}

/// `-bound` on the most probable arm, `+bound` on the best cumulative arm among
/// the rest, zero elsewhere. Ties go to the smallest index.
pub fn adaptive_greedy_round(freqs: &[f64], cumulative: &[f64], bound: f64) -> Result<RewardFunction> {
    if freqs.is_empty() || freqs.len() != cumulative.len() {
        return Err(Error::invalid("frequencies and cumulative rewards must have equal nonzero length"));
    }
    let total: f64 = freqs.iter().sum();
    if (total - 1.0).abs() > 1e-9 || freqs.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::invalid(format!("frequencies must form a probability vector, sum is {total}")));
    }
    let victim = crate::stats::argmax(freqs);
    let mut y = vec![0.0; freqs.len()];
    y[victim] = -bound;
    let rival = (0..cumulative.len())
        .filter(|&i| i != victim)
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if cumulative[b] >= cumulative[i] => Some(b),
            _ => Some(i),
        });
    if let Some(r) = rival {
        y[r] = bound;
    }
    Ok(RewardFunction(y))
}
