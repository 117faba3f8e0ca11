//! `simulate`, `sweep` and `bounds`.

use std::fs;
use std::path::{Path, PathBuf};

use gpts_core::analysis::bounds::{
    lipschitz_parameters, regret_bound_finite, regret_bound_ftpl_finite, regret_bound_lipschitz, thompson_regret_bound,
};
use gpts_core::analysis::hessian::analytic_c;
use gpts_core::gp::{dudley_bound, gaussian_max_bound, modulus_bound, sup_mc};
use gpts_core::rng::{derive_seed, rng_from_seed};
use gpts_core::{play_game, run_replications, ActionSpace, Adversary, Estimate, KernelFamily, KernelSpec, Learner, SpaceKind};
use serde::Serialize;

use crate::config::{AdversaryKind, Eta, ExperimentConfig, LearnerKind};
use crate::error::CliError;

/// A Monte-Carlo estimate together with the seed that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeededEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl SeededEstimate {
    pub fn new(e: Estimate, seed: u64) -> Self {
        Self { value: e.value, stderr: e.stderr, n: e.n, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub space: SpaceKind,
    pub learner: String,
    pub adversary: String,
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    pub mean_regret: SeededEstimate,
    pub bound: Option<f64>,
    pub bound_kind: Option<&'static str>,
    /// `mean + 3 stderr <= bound`.
    pub bound_satisfied: Option<bool>,
    /// `sqrt(T) E sup gamma` for Thompson learners.
    pub prior_regret: Option<SeededEstimate>,
}

pub struct Simulation {
    pub summary: SimulationSummary,
    pub seeds: Vec<u64>,
    pub regrets: Vec<f64>,
}

fn learner_name(kind: LearnerKind) -> &'static str {
    match kind {
        LearnerKind::Thompson => "thompson",
        LearnerKind::Ftpl => "ftpl",
        LearnerKind::ExpWeights => "exp_weights",
        LearnerKind::Uniform => "uniform",
    }
}

fn adversary_name(kind: AdversaryKind) -> &'static str {
    match kind {
        AdversaryKind::Rademacher => "rademacher",
        AdversaryKind::Zigzag => "zigzag",
        AdversaryKind::AdaptiveGreedy => "adaptive_greedy",
        AdversaryKind::Zero => "zero",
    }
}

/// The closed-form bound that applies to the configuration, if any.
pub fn theoretical_bound(config: &ExperimentConfig, space: &ActionSpace) -> Result<Option<Bound>, CliError> {
    let horizon = config.horizon;
    let l = &config.learner;
    let beta = config.adversary.reward_bound();
    let bound = match (l.kind, l.kernel) {
        (LearnerKind::Thompson, KernelFamily::DiagonalWhite) => Some(Bound {
            value: thompson_regret_bound(horizon, beta, beta, l.sigma, gaussian_max_bound(l.sigma, space.len())),
            kind: "thompson_white",
        }),
        (LearnerKind::Thompson, KernelFamily::MaternHalf) if config.adversary.kind == AdversaryKind::Zigzag => {
            let (lambda, prior) = (config.adversary.lambda, l.prior()?);
            Some(Bound {
                value: thompson_regret_bound(
                    horizon,
                    beta,
                    analytic_c(beta, lambda, l.kappa),
                    l.sigma,
                    dudley_bound(&prior, space.dim()),
                ),
                kind: "thompson_matern",
            })
        }
        (LearnerKind::Ftpl, KernelFamily::DiagonalWhite) if l.eta == Some(Eta::SqrtHorizon) && space.is_finite() => {
            Some(Bound { value: beta * regret_bound_ftpl_finite(horizon, space.len()), kind: "ftpl_sqrt_t" })
        }
        _ => None,
    };
    Ok(bound)
}

pub fn simulate(config: &ExperimentConfig) -> Result<Simulation, CliError> {
    let space = ActionSpace::from_kind(config.space)?;
    let learner = Learner::new(&config.learner.spec(config.horizon)?, &space)?;
    let adversary = Adversary::new(&config.adversary.spec(space.len(), config.horizon), &space)?;
    let runs = run_replications(&learner, &adversary, &space, config.horizon, config.replications, config.seed)?;
    let prior_regret = match (config.learner.kind, learner.sampler()) {
        (LearnerKind::Thompson, Some(sampler)) if config.mc_samples >= 2 => {
            let seed = derive_seed(config.seed, u64::MAX);
            let scale = (config.horizon as f64).sqrt();
            let e = sup_mc(sampler, scale, config.mc_samples, &mut rng_from_seed(seed))?;
            Some(SeededEstimate::new(e, seed))
        }
        _ => None,
    };
    let bound = theoretical_bound(config, &space)?;
    let mean = runs.mean_regret;
    let summary = SimulationSummary {
        space: config.space,
        learner: learner_name(config.learner.kind).to_string(),
        adversary: format!(
            "{}{}",
            if config.adversary.centered { "centered_" } else { "" },
            adversary_name(config.adversary.kind)
        ),
        horizon: config.horizon,
        replications: config.replications,
        seed: config.seed,
        mean_regret: SeededEstimate::new(mean, config.seed),
        bound_satisfied: bound.as_ref().map(|b| mean.value + 3.0 * mean.stderr <= b.value),
        bound: bound.as_ref().map(|b| b.value),
        bound_kind: bound.map(|b| b.kind),
        prior_regret,
    };
    Ok(Simulation { summary, seeds: runs.seeds, regrets: runs.regrets })
}

/// Writes `replications.csv`, `summary.json` and, if requested, `trajectory.jsonl`
/// for the first replication.
pub fn write_simulation(config: &ExperimentConfig, sim: &Simulation, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("replications.csv"))?;
    w.write_record(["replication", "seed", "regret"])?;
    for (i, (seed, regret)) in sim.seeds.iter().zip(&sim.regrets).enumerate() {
        w.write_record([i.to_string(), seed.to_string(), regret.to_string()])?;
    }
    w.flush()?;
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&sim.summary)? + "\n")?;
    if config.write_trajectory {
        let space = ActionSpace::from_kind(config.space)?;
        let learner = Learner::new(&config.learner.spec(config.horizon)?, &space)?;
        let adversary = Adversary::new(&config.adversary.spec(space.len(), config.horizon), &space)?;
        let t = play_game(&learner, &adversary, &space, config.horizon, sim.seeds[0])?;
        fs::write(out.join("trajectory.jsonl"), t.to_jsonl())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    #[value(name = "T")]
    Horizon,
    #[value(name = "N")]
    Experts,
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "kappa")]
    Kappa,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Horizon => "T",
            SweepAxis::Experts => "N",
            SweepAxis::Lambda => "lambda",
            SweepAxis::Kappa => "kappa",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: String,
    pub mean_regret: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
}

fn with_value(config: &ExperimentConfig, axis: SweepAxis, raw: &str) -> Result<ExperimentConfig, CliError> {
    let bad = || CliError::usage(format!("invalid {} value `{raw}`", axis.name()));
    let mut c = config.clone();
    match axis {
        SweepAxis::Horizon => c.horizon = raw.parse().ok().filter(|v| *v >= 1).ok_or_else(bad)?,
        SweepAxis::Experts => {
            let SpaceKind::Finite { .. } = c.space else {
                return Err(CliError::usage("the N axis needs a finite action space"));
            };
            c.space = SpaceKind::Finite { n: raw.parse().ok().filter(|v| *v >= 1).ok_or_else(bad)? };
        }
        SweepAxis::Lambda => {
            if c.adversary.kind != AdversaryKind::Zigzag {
                return Err(CliError::usage("the lambda axis needs the zigzag adversary"));
            }
            c.adversary.lambda = crate::config::parse_real(raw).filter(|v| *v >= 0.0).ok_or_else(bad)?;
        }
        SweepAxis::Kappa => {
            if c.learner.kernel != KernelFamily::MaternHalf {
                return Err(CliError::usage("the kappa axis needs a matern_half prior"));
            }
            c.learner.kappa = crate::config::parse_real(raw).filter(|v| *v > 0.0).ok_or_else(bad)?;
        }
    }
    Ok(c)
}

/// One simulation per value, all with the template's seed.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[String]) -> Result<Vec<SweepRow>, CliError> {
    if values.is_empty() {
        return Err(CliError::usage("sweep needs at least one value"));
    }
    values
        .iter()
        .map(|raw| {
            let sim = simulate(&with_value(config, axis, raw)?)?;
            Ok(SweepRow {
                axis: axis.name(),
                value: raw.clone(),
                mean_regret: sim.summary.mean_regret.value,
                stderr: sim.summary.mean_regret.stderr,
                bound: sim.summary.bound,
            })
        })
        .collect()
}

pub fn write_sweep(rows: &[SweepRow], out: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)?;
    let path = out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["axis", "value", "mean_regret", "stderr", "bound"])?;
    for r in rows {
        let bound = r.bound.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([r.axis.to_string(), r.value.clone(), r.mean_regret.to_string(), r.stderr.to_string(), bound])?;
    }
    w.flush()?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub horizon: usize,
    pub n: usize,
    pub d: usize,
    pub beta: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub finite: f64,
    pub ftpl_finite: f64,
    pub gaussian_max: f64,
    pub dudley: f64,
    pub lipschitz: f64,
    pub lipschitz_sigma: f64,
    pub lipschitz_kappa: f64,
    pub lipschitz_c: f64,
    pub lipschitz_c_alternative: f64,
    pub modulus: Option<f64>,
    pub h: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn bounds(
    horizon: usize,
    n: usize,
    d: usize,
    beta: f64,
    lambda: f64,
    sigma: f64,
    kappa: f64,
    h: Option<f64>,
) -> Result<BoundsReport, CliError> {
    if n == 0 || d == 0 {
        return Err(CliError::usage("n and d must be at least 1"));
    }
    if !(beta > 0.0) || !(lambda > 0.0) {
        return Err(CliError::usage("beta and lambda must be positive"));
    }
    let spec = KernelSpec::matern_half(sigma, kappa)?;
    let p = lipschitz_parameters(beta, lambda);
    Ok(BoundsReport {
        horizon,
        n,
        d,
        beta,
        lambda,
        sigma,
        kappa,
        finite: regret_bound_finite(horizon, n),
        ftpl_finite: regret_bound_ftpl_finite(horizon, n),
        gaussian_max: gaussian_max_bound(sigma, n),
        dudley: dudley_bound(&spec, d),
        lipschitz: regret_bound_lipschitz(horizon, d, beta, lambda),
        lipschitz_sigma: p.sigma,
        lipschitz_kappa: p.kappa,
        lipschitz_c: p.c,
        lipschitz_c_alternative: p.c_alt,
        modulus: h.map(|h| modulus_bound(&spec, d, h)),
        h,
    })
}
