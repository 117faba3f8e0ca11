//! Closed-form regret bounds and the discretization budget of a grid cover.

use serde::{Deserialize, Serialize};

use crate::game::Trajectory;
use crate::gp::{modulus_bound, KernelSpec};
use crate::space::ActionSpace;

/// `4 sqrt(T ln N)`: Thompson sampling with a white prior of variance 2.
pub fn regret_bound_finite(horizon: usize, n: usize) -> f64 {
    4.0 * (horizon as f64 * (n as f64).ln()).sqrt()
}

/// `2 sqrt(T ln N)`: FTPL with learning rate `sqrt(T)`.
pub fn regret_bound_ftpl_finite(horizon: usize, n: usize) -> f64 {
    2.0 * (horizon as f64 * (n as f64).ln()).sqrt()
}

/// `beta (32 + 32 / (1 - 1/e)) sqrt(T d ln(1 + sqrt(d) lambda / beta))` on `[0,1]^d`.
pub fn regret_bound_lipschitz(horizon: usize, d: usize, beta: f64, lambda: f64) -> f64 {
    let d = d as f64;
    let coef = 32.0 + 32.0 / (1.0 - (-1f64).exp());
    beta * coef * (horizon as f64 * d * (1.0 + d.sqrt() * lambda / beta).ln()).sqrt()
}

/// `sqrt(T) (1 + beta (beta + C) / sigma^2) E sup gamma`.
pub fn thompson_regret_bound(horizon: usize, beta: f64, c: f64, sigma: f64, expected_sup: f64) -> f64 {
    (horizon as f64).sqrt() * (1.0 + beta * (beta + c) / (sigma * sigma)) * expected_sup
}

/// Prior and class constant used for bounded Lipschitz adversaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzParameters {
    pub sigma: f64,
    pub kappa: f64,
    /// `2 beta / (1 - e^{-2 beta / (lambda kappa + beta)})`.
    pub c: f64,
    /// `beta (lambda + 1/kappa) / ((1/kappa)(1 - e^{-2 / (lambda kappa + 1)}))`, reported for comparison.
    pub c_alt: f64,
}

/// `sigma = beta`, `kappa = beta / lambda` and the matching class constant.
pub fn lipschitz_parameters(beta: f64, lambda: f64) -> LipschitzParameters {
    let kappa = beta / lambda;
    LipschitzParameters {
        sigma: beta,
        kappa,
        c: crate::analysis::hessian::analytic_c(beta, lambda, kappa),
        c_alt: crate::analysis::hessian::alternative_c(beta, lambda, kappa),
    }
}

/// `sum_t [2 omega_t + 2 sqrt(T - t + 1) psi(h)]` where `psi` is the chaining
/// modulus of the prior and `omega[t-1]` the modulus of `y_{1:t}` at radius `h`.
pub fn cover_error_budget(h: f64, spec: &KernelSpec, d: usize, omega: &[f64], horizon: usize) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    let psi = modulus_bound(spec, d, h);
    (1..=horizon)
        .map(|t| 2.0 * omega.get(t - 1).copied().unwrap_or(0.0) + 2.0 * ((horizon - t + 1) as f64).sqrt() * psi)
        .sum()
}

/// `omega_t(h)` for each round: grid Lipschitz constant of `y_{1:t}` times `h`.
pub fn trajectory_moduli(trajectory: &Trajectory, space: &ActionSpace, h: f64) -> Vec<f64> {
    (1..=trajectory.horizon)
        .map(|t| crate::game::RewardFunction(trajectory.cumulative[t].clone()).grid_lipschitz(space) * h)
        .collect()
}
