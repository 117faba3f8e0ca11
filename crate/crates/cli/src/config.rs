//! Flat `key = value` experiment configs with dotted section prefixes.
//!
//! ```text
//! # finite-expert setup
//! space.kind = finite
//! space.n = 10
//! learner.kind = thompson
//! learner.kernel = white
//! learner.sigma = sqrt(2)
//! adversary.kind = rademacher
//! game.horizon = 1000
//! game.replications = 200
//! game.seed = 7
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use gpts_core::{AdversarySpec, KernelFamily, KernelSpec, LearnerSpec, RewardFunction, SpaceKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    Fixed(f64),
    /// `sqrt(T)`, resolved against the horizon of each run.
    SqrtHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    Thompson,
    Ftpl,
    ExpWeights,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub kernel: KernelFamily,
    pub sigma: f64,
    pub kappa: f64,
    pub eta: Option<Eta>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Rademacher,
    Zigzag,
    AdaptiveGreedy,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    pub beta: f64,
    pub lambda: f64,
    pub bound: f64,
    pub centered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub space: SpaceKind,
    pub learner: LearnerConfig,
    pub adversary: AdversaryConfig,
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    pub mc_samples: usize,
    pub output_path: Option<PathBuf>,
    pub write_trajectory: bool,
}

impl LearnerConfig {
    pub fn prior(&self) -> Result<KernelSpec, CliError> {
        Ok(KernelSpec::new(self.kernel, self.sigma * self.sigma, self.kappa)?)
    }

    pub fn spec(&self, horizon: usize) -> Result<LearnerSpec, CliError> {
        let eta = self.eta.map(|e| match e {
            Eta::Fixed(v) => v,
            Eta::SqrtHorizon => (horizon as f64).sqrt(),
        });
        Ok(match self.kind {
            LearnerKind::Thompson => LearnerSpec::Thompson { prior: self.prior()? },
            LearnerKind::Ftpl => LearnerSpec::Ftpl {
                prior: self.prior()?,
                eta: eta.ok_or_else(|| CliError::usage("learner.eta is required for ftpl"))?,
            },
            LearnerKind::ExpWeights => LearnerSpec::ExpWeights { eta },
            LearnerKind::Uniform => LearnerSpec::Uniform,
        })
    }
}

impl AdversaryConfig {
    pub fn spec(&self, n_points: usize, horizon: usize) -> AdversarySpec {
        let base = match self.kind {
            AdversaryKind::Rademacher => AdversarySpec::Rademacher,
            AdversaryKind::Zigzag => AdversarySpec::LipschitzZigzag { beta: self.beta, lambda: self.lambda },
            AdversaryKind::AdaptiveGreedy => AdversarySpec::AdaptiveGreedy { bound: self.bound },
            AdversaryKind::Zero => AdversarySpec::fixed(vec![RewardFunction::zeros(n_points); horizon]),
        };
        if self.centered {
            AdversarySpec::centered(base)
        } else {
            base
        }
    }

    /// Sup-norm bound `beta` of the adversary's reward class.
    pub fn reward_bound(&self) -> f64 {
        let base = match self.kind {
            AdversaryKind::Rademacher => 1.0,
            AdversaryKind::Zigzag => self.beta,
            AdversaryKind::AdaptiveGreedy => self.bound,
            AdversaryKind::Zero => 0.0,
        };
        if self.centered && self.kind == AdversaryKind::AdaptiveGreedy {
            2.0 * base
        } else {
            base
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Entries {
    map: BTreeMap<String, Entry>,
    last_line: usize,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<Entry, CliError> {
        self.take(key).ok_or_else(|| CliError::config(self.last_line, format!("missing required key `{key}`")))
    }

    fn parse<T>(&mut self, key: &str, default: Option<T>, f: impl Fn(&str) -> Option<T>) -> Result<T, CliError> {
        match (self.take(key), default) {
            (Some(e), _) => f(&e.value).ok_or_else(|| CliError::config(e.line, format!("invalid value `{}` for `{key}`", e.value))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(CliError::config(self.last_line, format!("missing required key `{key}`"))),
        }
    }
}

/// Reals are plain literals or `sqrt(x)`.
pub fn parse_real(s: &str) -> Option<f64> {
    let v = match s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => inner.trim().parse::<f64>().ok().filter(|x| *x >= 0.0)?.sqrt(),
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_positive(s: &str) -> Option<f64> {
    parse_real(s).filter(|v| *v > 0.0)
}

fn parse_count(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|v| *v >= 1)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

const KEYS: &[&str] = &[
    "space.kind",
    "space.n",
    "space.d",
    "space.points_per_axis",
    "learner.kind",
    "learner.kernel",
    "learner.sigma",
    "learner.kappa",
    "learner.eta",
    "adversary.kind",
    "adversary.beta",
    "adversary.lambda",
    "adversary.bound",
    "adversary.centered",
    "game.horizon",
    "game.replications",
    "game.seed",
    "analysis.mc_samples",
    "output.path",
    "output.trajectory",
];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut map = BTreeMap::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::config(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::config(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(CliError::config(line, format!("empty value for `{key}`")));
        }
        if let Some(prev) = map.insert(key.to_string(), Entry { line, value: value.to_string() }) {
            return Err(CliError::config(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
        }
    }
    let mut e = Entries { map, last_line };

    let kind = e.required("space.kind")?;
    let space = match kind.value.as_str() {
        "finite" => SpaceKind::Finite { n: e.parse("space.n", None, parse_count)? },
        "cube_grid" => SpaceKind::CubeGrid {
            d: e.parse("space.d", Some(1), parse_count)?,
            points_per_axis: e.parse("space.points_per_axis", None, parse_count)?,
        },
        other => return Err(CliError::config(kind.line, format!("unknown space kind `{other}`"))),
    };

    let kind = e.required("learner.kind")?;
    let learner_kind = match kind.value.as_str() {
        "thompson" => LearnerKind::Thompson,
        "ftpl" => LearnerKind::Ftpl,
        "exp_weights" => LearnerKind::ExpWeights,
        "uniform" => LearnerKind::Uniform,
        other => return Err(CliError::config(kind.line, format!("unknown learner kind `{other}`"))),
    };
    if learner_kind == LearnerKind::ExpWeights && !matches!(space, SpaceKind::Finite { .. }) {
        return Err(CliError::config(kind.line, "exp_weights needs space.kind = finite"));
    }
    let perturbed = matches!(learner_kind, LearnerKind::Thompson | LearnerKind::Ftpl);
    let (kernel, sigma, kappa) = if perturbed {
        let kernel = e.parse("learner.kernel", Some(KernelFamily::DiagonalWhite), |s| match s {
            "white" => Some(KernelFamily::DiagonalWhite),
            "matern_half" => Some(KernelFamily::MaternHalf),
            _ => None,
        })?;
        (kernel, e.parse("learner.sigma", Some(1.0), parse_positive)?, e.parse("learner.kappa", Some(1.0), parse_positive)?)
    } else {
        (KernelFamily::DiagonalWhite, 1.0, 1.0)
    };
    let eta = if matches!(learner_kind, LearnerKind::Ftpl | LearnerKind::ExpWeights) {
        match e.take("learner.eta") {
            None => None,
            Some(entry) if entry.value == "sqrt_t" => Some(Eta::SqrtHorizon),
            Some(entry) => Some(Eta::Fixed(parse_positive(&entry.value).ok_or_else(|| {
                CliError::config(
                    entry.line,
                    format!("learner.eta must be a positive real or `sqrt_t`, got `{}`", entry.value),
                )
            })?)),
        }
    } else {
        None
    };
    if learner_kind == LearnerKind::Ftpl && eta.is_none() {
        return Err(CliError::config(e.last_line, "missing required key `learner.eta` for ftpl"));
    }

    let kind = e.required("adversary.kind")?;
    let adversary_kind = match kind.value.as_str() {
        "rademacher" => AdversaryKind::Rademacher,
        "zigzag" => AdversaryKind::Zigzag,
        "adaptive_greedy" => AdversaryKind::AdaptiveGreedy,
        "zero" => AdversaryKind::Zero,
        other => return Err(CliError::config(kind.line, format!("unknown adversary kind `{other}`"))),
    };
    let finite = matches!(space, SpaceKind::Finite { .. });
    match adversary_kind {
        AdversaryKind::Zigzag if finite => {
            return Err(CliError::config(kind.line, "zigzag needs space.kind = cube_grid"));
        }
        AdversaryKind::Rademacher | AdversaryKind::AdaptiveGreedy if !finite => {
            return Err(CliError::config(kind.line, format!("{} needs space.kind = finite", kind.value)));
        }
        _ => {}
    }
    let zigzag = adversary_kind == AdversaryKind::Zigzag;
    let greedy = adversary_kind == AdversaryKind::AdaptiveGreedy;
    let adversary = AdversaryConfig {
        kind: adversary_kind,
        beta: if zigzag { e.parse("adversary.beta", Some(1.0), parse_positive)? } else { 1.0 },
        lambda: if zigzag { e.parse("adversary.lambda", Some(1.0), |s| parse_real(s).filter(|v| *v >= 0.0))? } else { 1.0 },
        bound: if greedy { e.parse("adversary.bound", Some(1.0), parse_positive)? } else { 1.0 },
        centered: e.parse("adversary.centered", Some(false), parse_bool)?,
    };

    let config = ExperimentConfig {
        space,
        learner: LearnerConfig { kind: learner_kind, kernel, sigma, kappa, eta },
        adversary,
        horizon: e.parse("game.horizon", None, parse_count)?,
        replications: e.parse("game.replications", Some(1), parse_count)?,
        seed: e.parse("game.seed", Some(0), |s| s.parse::<u64>().ok())?,
        mc_samples: e.parse("analysis.mc_samples", Some(10_000), |s| s.parse::<usize>().ok())?,
        output_path: e.take("output.path").map(|p| PathBuf::from(p.value)),
        write_trajectory: e.parse("output.trajectory", Some(false), parse_bool)?,
    };
    if let Some((key, entry)) = e.map.iter().next() {
        return Err(CliError::config(entry.line, format!("key `{key}` does not apply to this configuration")));
    }
    Ok(config)
}
