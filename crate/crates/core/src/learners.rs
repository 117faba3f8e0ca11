//! Learner strategies. Each round the learner sees only `y_1 + ... + y_{t-1}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{GpSampler, KernelSpec};
use crate::space::ActionSpace;
use crate::stats::argmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    /// Perturb with `sqrt(T - t + 1) * gamma`, `gamma ~ GP(0, prior)`.
    Thompson { prior: KernelSpec },
    /// Perturb with `eta * gamma` at every round.
    Ftpl { prior: KernelSpec, eta: f64 },
    /// Hedge; `eta = sqrt(8 ln N / T)` when unset.
    ExpWeights { eta: Option<f64> },
    Uniform,
}

/// A learner bound to an action space, with any sampler state precomputed.
#[derive(Debug, Clone)]
pub struct Learner {
    spec: LearnerSpec,
    n: usize,
    sampler: Option<GpSampler>,
}

impl Learner {
    pub fn new(spec: &LearnerSpec, space: &ActionSpace) -> Result<Self> {
        let sampler = match spec {
            LearnerSpec::Thompson { prior } => Some(GpSampler::new(prior, space.points())?),
            LearnerSpec::Ftpl { prior, eta } => {
                if !(*eta >= 0.0 && eta.is_finite()) {
                    return Err(Error::invalid(format!("FTPL learning rate must be positive, got {eta}")));
                }
                Some(GpSampler::new(prior, space.points())?)
            }
            LearnerSpec::ExpWeights { eta } => {
                if !space.is_finite() {
                    return Err(Error::invalid("exponential weights needs a finite action space"));
                }
                if let Some(eta) = eta {
                    if !(*eta >= 0.0 && eta.is_finite()) {
                        return Err(Error::invalid(format!("learning rate must be positive, got {eta}")));
                    }
                }
                None
            }
            LearnerSpec::Uniform => None,
        };
        Ok(Self { spec: spec.clone(), n: space.len(), sampler })
    }

    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn n_actions(&self) -> usize {
        self.n
    }

    pub fn sampler(&self) -> Option<&GpSampler> {
        self.sampler.as_ref()
    }

    /// Draws the round-`t` action given `cumulative = y_{1:t-1}`.
    pub fn act<R: Rng + ?Sized>(&self, cumulative: &[f64], t: usize, horizon: usize, rng: &mut R) -> Result<usize> {
        if cumulative.len() != self.n {
            return Err(Error::invalid("cumulative reward length does not match the action space"));
        }
        match (&self.spec, &self.sampler) {
            (LearnerSpec::Thompson { .. }, Some(s)) => thompson_step(cumulative, t, horizon, s, rng),
            (LearnerSpec::Ftpl { eta, .. }, Some(s)) => ftpl_step(cumulative, *eta, s, rng),
            (LearnerSpec::ExpWeights { eta }, _) => {
                exp_weights_step(cumulative, eta.unwrap_or_else(|| default_hedge_rate(self.n, horizon)), rng)
            }
            _ => Ok(uniform_step(self.n, rng)),
        }
    }

    /// The learner's mixed strategy at round `t`: exact for hedge and uniform,
    /// estimated from `n_sims` simulated draws for perturbation learners.
    pub fn action_probabilities<R: Rng + ?Sized>(
        &self,
        cumulative: &[f64],
        t: usize,
        horizon: usize,
        n_sims: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        match &self.spec {
            LearnerSpec::Uniform => Ok(vec![1.0 / self.n as f64; self.n]),
            LearnerSpec::ExpWeights { eta } => {
                exp_weights_probabilities(cumulative, eta.unwrap_or_else(|| default_hedge_rate(self.n, horizon)))
            }
            _ => {
                let mut counts = vec![0.0; self.n];
                for _ in 0..n_sims.max(1) {
                    counts[self.act(cumulative, t, horizon, rng)?] += 1.0;
                }
                let total: f64 = counts.iter().sum();
                Ok(counts.into_iter().map(|c| c / total).collect())
            }
        }
    }
}

/// Classical hedge tuning `sqrt(8 ln N / T)`.
pub fn default_hedge_rate(n: usize, horizon: usize) -> f64 {
    (8.0 * (n as f64).ln() / horizon.max(1) as f64).sqrt()
}

/// `argmax(cumulative + scale * gamma)` with one fresh prior draw.
pub fn perturbed_argmax<R: Rng + ?Sized>(cumulative: &[f64], sampler: &GpSampler, scale: f64, rng: &mut R) -> usize {
    let mut buf = vec![0.0; cumulative.len()];
    sampler.sample_into(scale, rng, &mut buf);
    for (b, c) in buf.iter_mut().zip(cumulative) {
        *b += c;
    }
    argmax(&buf)
}

/// Thompson sampling over future rewards. With a prior IID over rounds the
/// remaining sum `gamma_t + ... + gamma_T` is `sqrt(T - t + 1)` times one draw.
pub fn thompson_step<R: Rng + ?Sized>(
    cumulative: &[f64],
    t: usize,
    horizon: usize,
    sampler: &GpSampler,
    rng: &mut R,
) -> Result<usize> {
    if t == 0 || t > horizon {
        return Err(Error::invalid(format!("round {t} outside 1..={horizon}")));
    }
    Ok(perturbed_argmax(cumulative, sampler, ((horizon - t + 1) as f64).sqrt(), rng))
}

pub fn ftpl_step<R: Rng + ?Sized>(cumulative: &[f64], eta: f64, sampler: &GpSampler, rng: &mut R) -> Result<usize> {
    if !(eta >= 0.0) {
        return Err(Error::invalid(format!("FTPL learning rate must be nonnegative, got {eta}")));
    }
    Ok(perturbed_argmax(cumulative, sampler, eta, rng))
}

pub fn exp_weights_probabilities(cumulative: &[f64], eta: f64) -> Result<Vec<f64>> {
    let max = cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = cumulative.iter().map(|c| (eta * (c - max)).exp()).collect();
    let total: f64 = w.iter().sum();
    if !total.is_finite() || total <= 0.0 || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("exponential weights are not finite".into()));
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

pub fn exp_weights_step<R: Rng + ?Sized>(cumulative: &[f64], eta: f64, rng: &mut R) -> Result<usize> {
    let p = exp_weights_probabilities(cumulative, eta)?;
    Ok(sample_categorical(&p, rng))
}

pub fn uniform_step<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    rng.random_range(0..n)
}

fn sample_categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::stats::normal_cdf;
    use proptest::prelude::*;

    fn white(sigma: f64, n: usize) -> GpSampler {
        let space = ActionSpace::finite(n).unwrap();
        GpSampler::new(&KernelSpec::diagonal_white(sigma).unwrap(), space.points()).unwrap()
    }

    fn frequency(n: usize, draws: usize, mut f: impl FnMut() -> usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        for _ in 0..draws {
            c[f()] += 1.0;
        }
        c.into_iter().map(|v| v / draws as f64).collect()
    }

    #[test]
    fn zero_scale_is_follow_the_leader() {
        let s = white(1.0, 3);
        let mut rng = rng_from_seed(0);
        assert_eq!(perturbed_argmax(&[0.5, 2.0, 1.0], &s, 0.0, &mut rng), 1);
        assert_eq!(ftpl_step(&[0.5, 2.0, 2.0], 0.0, &s, &mut rng).unwrap(), 1);
    }

    #[test]
    fn thompson_rejects_bad_round() {
        let s = white(1.0, 2);
        let mut rng = rng_from_seed(0);
        assert!(thompson_step(&[0.0, 0.0], 0, 5, &s, &mut rng).is_err());
        assert!(thompson_step(&[0.0, 0.0], 6, 5, &s, &mut rng).is_err());
    }

    #[test]
    fn thompson_last_round_with_large_lead() {
        // arm 0 wins unless gamma_1 - gamma_0 > 10 with variance 4: Phi(5)
        let s = white(2f64.sqrt(), 2);
        let mut rng = rng_from_seed(1);
        let f = frequency(2, 10_000, || thompson_step(&[10.0, 0.0], 7, 7, &s, &mut rng).unwrap());
        assert!(f[0] >= 0.999 && normal_cdf(5.0) > 0.999);
    }

    #[test]
    fn thompson_symmetric_prior_splits_evenly() {
        let s = white(2f64.sqrt(), 2);
        let mut rng = rng_from_seed(2);
        let f = frequency(2, 10_000, || thompson_step(&[0.0, 0.0], 3, 10, &s, &mut rng).unwrap());
        assert!((f[0] - 0.5).abs() < 0.02);
    }

    #[test]
    fn ftpl_matches_gaussian_oracle() {
        let s = white(1.0, 2);
        let mut rng = rng_from_seed(3);
        let f = frequency(2, 10_000, || ftpl_step(&[1.0, 0.0], 1.0, &s, &mut rng).unwrap());
        let oracle = normal_cdf(1.0 / 2f64.sqrt());
        assert!((oracle - 0.7602).abs() < 1e-4);
        assert!((f[0] - oracle).abs() < 0.02);
    }

    #[test]
    fn ftpl_coincides_with_thompson_at_matching_rate() {
        let s = white(1.0, 6);
        let cum = [0.3, -1.0, 2.0, 0.0, 1.5, 1.9];
        for t in 1..=10 {
            let eta = ((10 - t + 1) as f64).sqrt();
            let a = thompson_step(&cum, t, 10, &s, &mut rng_from_seed(t as u64)).unwrap();
            let b = ftpl_step(&cum, eta, &s, &mut rng_from_seed(t as u64)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hedge_probabilities() {
        let p = exp_weights_probabilities(&[2f64.ln(), 0.0], 1.0).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        let p = exp_weights_probabilities(&[5.0, -3.0, 1.0], 0.0).unwrap();
        assert!(p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        // stabilized by max subtraction
        let p = exp_weights_probabilities(&[1e6, 1e6 - 1.0], 1.0).unwrap();
        assert!((p[0] - 1.0 / (1.0 + (-1f64).exp())).abs() < 1e-12);
        assert!(exp_weights_probabilities(&[f64::NAN, 0.0], 1.0).is_err());
    }

    #[test]
    fn hedge_equal_cumulative_is_uniform() {
        let mut rng = rng_from_seed(4);
        let f = frequency(4, 10_000, || exp_weights_step(&[1.0; 4], 0.7, &mut rng).unwrap());
        assert!(f.iter().all(|v| (v - 0.25).abs() < 0.02));
    }

    #[test]
    fn uniform_frequencies() {
        let mut rng = rng_from_seed(5);
        assert_eq!(uniform_step(1, &mut rng), 0);
        let f = frequency(4, 10_000, || uniform_step(4, &mut rng));
        assert!(f.iter().all(|v| (v - 0.25).abs() < 0.02));
        let cube = ActionSpace::cube_grid(3, 2).unwrap();
        let learner = Learner::new(&LearnerSpec::Uniform, &cube).unwrap();
        let f = frequency(8, 10_000, || learner.act(&[0.0; 8], 1, 1, &mut rng).unwrap());
        assert!(f.iter().all(|v| (v - 0.125).abs() < 0.02));
    }

    #[test]
    fn learner_spec_validation() {
        let cube = ActionSpace::cube_grid(1, 4).unwrap();
        assert!(Learner::new(&LearnerSpec::ExpWeights { eta: None }, &cube).is_err());
        let finite = ActionSpace::finite(3).unwrap();
        let prior = KernelSpec::diagonal_white(1.0).unwrap();
        assert!(Learner::new(&LearnerSpec::Ftpl { prior, eta: -1.0 }, &finite).is_err());
        assert!(Learner::new(&LearnerSpec::ExpWeights { eta: Some(f64::NAN) }, &finite).is_err());
    }

    #[test]
    fn default_hedge_rate_formula() {
        assert!((default_hedge_rate(10, 1000) - (8.0 * 10f64.ln() / 1000.0).sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn argmax_invariant_under_constant_shift(
            cum in proptest::collection::vec(-50.0f64..50.0, 2..12),
            c in -100.0f64..100.0,
            seed in any::<u64>(),
            t in 1usize..20,
        ) {
            let s = white(1.3, cum.len());
            let shifted: Vec<f64> = cum.iter().map(|v| v + c).collect();
            let a = thompson_step(&cum, t, 20, &s, &mut rng_from_seed(seed)).unwrap();
            let b = thompson_step(&shifted, t, 20, &s, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(a, b);
            let a = ftpl_step(&cum, 2.5, &s, &mut rng_from_seed(seed)).unwrap();
            let b = ftpl_step(&shifted, 2.5, &s, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
