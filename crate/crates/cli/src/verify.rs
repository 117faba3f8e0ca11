//! Invariant suites behind `gpts verify`.

use gpts_core::analysis::hessian::{analytic_c, equality_distance, hessian_rhs, lipschitz_envelope};
use gpts_core::analysis::{check_hessian_condition, decompose_regret, truncated_normal_mean, verify_bregman_bound};
use gpts_core::gp::{dudley_bound, gaussian_max_bound, sup_mc, sup_of_sum_mc, GpSampler, SquareMatrix};
use gpts_core::rng::{derive_seed, rng_from_seed};
use gpts_core::stats::{normal_cdf, normal_pdf, pooled_stderr, MeanAccumulator};
use gpts_core::{
    run_replications, ActionSpace, Adversary, AdversarySpec, KernelSpec, Learner, LearnerSpec, RewardFunction,
    Trajectory,
};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::CliError;

/// Default seed for every suite.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Decomposition,
    Bregman,
    Hessian,
    Truncnorm,
    Chaining,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Decomposition => "decomposition",
            Suite::Bregman => "bregman",
            Suite::Hessian => "hessian",
            Suite::Truncnorm => "truncnorm",
            Suite::Chaining => "chaining",
            Suite::All => "all",
        }
    }
}

/// One assertion: `passed` iff `value <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { suite, name: name.into(), value, threshold, passed: value <= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run(suite: Suite, seed: u64) -> Result<VerifyReport, CliError> {
    let checks = match suite {
        Suite::Decomposition => decomposition(seed)?,
        Suite::Bregman => bregman(seed)?,
        Suite::Hessian => hessian()?,
        Suite::Truncnorm => truncnorm(seed)?,
        Suite::Chaining => chaining(seed)?,
        Suite::All => {
            let mut all = decomposition(seed)?;
            all.extend(bregman(seed)?);
            all.extend(hessian()?);
            all.extend(truncnorm(seed)?);
            all.extend(chaining(seed)?);
            all
        }
    };
    Ok(VerifyReport { suite: suite.name(), seed, passed: checks.iter().all(|c| c.passed), checks })
}

fn rademacher_rewards(n: usize, horizon: usize, seed: u64) -> Vec<RewardFunction> {
    let mut rng = rng_from_seed(seed);
    (0..horizon)
        .map(|_| RewardFunction((0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()))
        .collect()
}

/// `|prior + sum E_t - simulated mean regret| / (3 pooled stderr) <= 1`.
fn decomposition(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (k, (n, horizon)) in [(2usize, 3usize), (5, 10)].into_iter().enumerate() {
        let space = ActionSpace::finite(n)?;
        let prior = KernelSpec::diagonal_white(1.0)?;
        let learner = Learner::new(&LearnerSpec::Thompson { prior }, &space)?;
        let rewards = rademacher_rewards(n, horizon, derive_seed(seed, k as u64));
        let dec = decompose_regret(&Trajectory::oblivious(rewards.clone())?, &prior, &space, &learner, 50_000, seed)?;
        let adversary = Adversary::new(&AdversarySpec::fixed(rewards), &space)?;
        let sim = run_replications(&learner, &adversary, &space, horizon, 50_000, derive_seed(seed, 10 + k as u64))?
            .mean_regret;
        let tol = 3.0 * pooled_stderr(sim.stderr, dec.expected_regret.stderr);
        checks.push(Check::at_most(
            "decomposition",
            format!("identity N={n} T={horizon}"),
            (dec.expected_regret.value - sim.value).abs(),
            tol,
        ));
    }
    Ok(checks)
}

fn bregman(seed: u64) -> Result<Vec<Check>, CliError> {
    let prior = KernelSpec::diagonal_white(1.0)?;
    let mut checks = Vec::new();
    for k in 0..50u64 {
        let n = 2 + (k % 3) as usize;
        let horizon = 3 + (k % 4) as usize;
        let space = ActionSpace::finite(n)?;
        let rewards = if k % 5 == 0 {
            (0..horizon).map(|_| RewardFunction((0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect())).collect()
        } else {
            rademacher_rewards(n, horizon, derive_seed(seed, 100 + k))
        };
        let r = verify_bregman_bound(&Trajectory::oblivious(rewards)?, &prior, &space, 10_000, derive_seed(seed, 200 + k))?;
        checks.push(Check::at_most(
            "bregman",
            format!("sequence {k}: sum E - sum D"),
            r.total_excess.value - r.total_bregman.value,
            r.tolerance,
        ));
        checks.push(Check::at_most("bregman", format!("sequence {k}: -min D_t/stderr"), -r.min_bregman_z.min(0.0), 3.0));
    }
    Ok(checks)
}

fn hessian() -> Result<Vec<Check>, CliError> {
    let grid = ActionSpace::cube_grid(1, 64)?;
    let mut checks = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        for lambda in [0.5, 1.0, 2.0] {
            let kappa = beta / lambda;
            let spec = KernelSpec::matern_half(beta, kappa)?;
            let report = check_hessian_condition(beta, lambda, &spec, grid.points())?;
            checks.push(Check::at_most(
                "hessian",
                format!("max violation beta={beta} lambda={lambda}"),
                report.max_lhs_minus_rhs,
                1e-10,
            ));
            let r = equality_distance(beta, lambda, kappa);
            let gap = lipschitz_envelope(beta, lambda, kappa, r) - hessian_rhs(analytic_c(beta, lambda, kappa), kappa, r);
            checks.push(Check::at_most(
                "hessian",
                format!("equality at r*={r} beta={beta} lambda={lambda}"),
                gap.abs(),
                1e-9,
            ));
        }
    }
    Ok(checks)
}

fn truncnorm(seed: u64) -> Result<Vec<Check>, CliError> {
    let cases: [(&[f64], &[&[f64]], &[f64]); 3] = [
        (&[0.0], &[&[1.0]], &[0.0]),
        (&[0.0, 0.0], &[&[1.0, 0.5], &[0.5, 1.0]], &[0.0, 0.0]),
        (&[0.2, -0.1, 0.0], &[&[1.0, 0.3, -0.2], &[0.3, 1.5, 0.4], &[-0.2, 0.4, 0.8]], &[0.5, 0.3, 0.2]),
    ];
    let mut checks = Vec::new();
    for (k, (mu, rows, alpha)) in cases.into_iter().enumerate() {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let sigma = SquareMatrix::from_rows(&rows)?;
        let formula = truncated_normal_mean(mu, &sigma, alpha)?;
        let oracle = rejection_mean(mu, &rows, alpha, 200_000, derive_seed(seed, 300 + k as u64));
        for (i, (f, o)) in formula.iter().zip(&oracle).enumerate() {
            checks.push(Check::at_most(
                "truncnorm",
                format!("d={} coordinate {i}", mu.len()),
                (f - o.0).abs(),
                3.0 * o.1,
            ));
        }
    }
    let one = SquareMatrix::from_rows(&[vec![1.0]])?;
    for alpha in [-2.0, 0.0, 1.5] {
        let m = truncated_normal_mean(&[0.0], &one, &[alpha])?;
        checks.push(Check::at_most(
            "truncnorm",
            format!("univariate closed form alpha={alpha}"),
            (m[0] + normal_pdf(alpha) / normal_cdf(alpha)).abs(),
            1e-6,
        ));
    }
    Ok(checks)
}

fn rejection_mean(mu: &[f64], sigma: &[Vec<f64>], alpha: &[f64], accepted: usize, seed: u64) -> Vec<(f64, f64)> {
    let d = mu.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = if i == j { (sigma[i][i] - s).sqrt() } else { (sigma[i][j] - s) / l[j][j] };
        }
    }
    let mut rng = rng_from_seed(seed);
    let mut acc = vec![MeanAccumulator::new(); d];
    let (mut z, mut x) = (vec![0.0; d], vec![0.0; d]);
    let mut n = 0;
    while n < accepted {
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        for i in 0..d {
            x[i] = mu[i] + (0..=i).map(|j| l[i][j] * z[j]).sum::<f64>();
        }
        if x.iter().zip(alpha).all(|(v, a)| v <= a) {
            acc.iter_mut().zip(&x).for_each(|(a, v)| a.push(*v));
            n += 1;
        }
    }
    acc.iter().map(|a| (a.mean(), a.estimate().stderr)).collect()
}

fn chaining(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (d, n) in [(1usize, 256usize), (2, 32), (3, 10)] {
        let space = ActionSpace::cube_grid(d, n)?;
        for kappa in [0.25, 1.0, 4.0] {
            let spec = KernelSpec::matern_half(1.0, kappa)?;
            let sampler = GpSampler::new(&spec, space.points())?;
            let e = sup_mc(&sampler, 1.0, 500, &mut rng_from_seed(derive_seed(seed, 400 + d as u64)))?;
            checks.push(Check::at_most(
                "chaining",
                format!("Dudley d={d} kappa={kappa}"),
                e.value - 3.0 * e.stderr,
                dudley_bound(&spec, d),
            ));
        }
    }
    for n in [2usize, 10, 100] {
        let space = ActionSpace::finite(n)?;
        let sampler = GpSampler::new(&KernelSpec::diagonal_white(1.0)?, space.points())?;
        let e = sup_mc(&sampler, 1.0, 10_000, &mut rng_from_seed(derive_seed(seed, 500 + n as u64)))?;
        checks.push(Check::at_most(
            "chaining",
            format!("Gaussian max N={n}"),
            e.value - 3.0 * e.stderr,
            gaussian_max_bound(1.0, n),
        ));
    }
    let grid = ActionSpace::cube_grid(1, 64)?;
    let sampler = GpSampler::new(&KernelSpec::matern_half(1.0, 1.0)?, grid.points())?;
    for t in [4usize, 16] {
        let sum = sup_of_sum_mc(&sampler, t, 20_000, &mut rng_from_seed(derive_seed(seed, 600 + t as u64)))?;
        let one = sup_mc(&sampler, 1.0, 20_000, &mut rng_from_seed(derive_seed(seed, 700 + t as u64)))?
            .scaled((t as f64).sqrt());
        checks.push(Check::at_most(
            "chaining",
            format!("prior regret identity T={t}"),
            (sum.value - one.value).abs(),
            3.0 * pooled_stderr(sum.stderr, one.stderr),
        ));
    }
    Ok(checks)
}
