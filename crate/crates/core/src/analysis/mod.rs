//! Estimators for the regret decomposition, Bregman bounds, the Hessian
//! condition and the closed-form rates.

pub mod bounds;
pub mod decomposition;
pub mod hessian;
pub mod truncnorm;

pub use bounds::{
    cover_error_budget, lipschitz_parameters, regret_bound_finite, regret_bound_ftpl_finite, regret_bound_lipschitz,
    thompson_regret_bound, trajectory_moduli, LipschitzParameters,
};
pub use decomposition::{
    bregman_divergence_mc, decompose_regret, gamma_star_mc, verify_bregman_bound, BregmanReport, DecompositionEstimate,
};
pub use hessian::{check_hessian_condition, HessianConditionReport};
pub use truncnorm::{mvn_cdf, truncated_normal_mean};
