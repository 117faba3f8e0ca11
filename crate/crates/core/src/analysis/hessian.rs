//! The kernel/class inequality `sup_y y(x) - y(x') k(x,x')/k(x',x') <= C (1 - k(x,x')/k(x',x'))`
//! for bounded Lipschitz rewards and the Matérn-1/2 kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{KernelFamily, KernelSpec};
use crate::space::{distance, Point};

/// Exact-arithmetic tolerance for the condition.
pub const HESSIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianConditionReport {
    /// `max_{x,x'} LHS - RHS` at the analytic constant.
    pub max_lhs_minus_rhs: f64,
    /// Smallest `C` for which the inequality holds on the given points.
    pub empirical_c: f64,
    pub analytic_c: f64,
    /// The alternative closed form, for comparison only.
    pub alternative_c: f64,
    /// Distance at which the envelope touches the right-hand side.
    pub equality_distance: f64,
    pub satisfied: bool,
    pub pairs: usize,
}

/// Supremum of the left-hand side over the class: `min(2 beta, (lambda + beta/kappa) r)`.
pub fn lipschitz_envelope(beta: f64, lambda: f64, kappa: f64, r: f64) -> f64 {
    (2.0 * beta).min((lambda + beta / kappa) * r)
}

/// `C (1 - e^{-r/kappa})`.
pub fn hessian_rhs(c: f64, kappa: f64, r: f64) -> f64 {
    c * -(-r / kappa).exp_m1()
}

/// `2 beta / (1 - e^{-2 beta / (lambda kappa + beta)})`.
pub fn analytic_c(beta: f64, lambda: f64, kappa: f64) -> f64 {
    2.0 * beta / -(-2.0 * beta / (lambda * kappa + beta)).exp_m1()
}

/// `beta (lambda + 1/kappa) / ((1/kappa)(1 - e^{-2/(lambda kappa + 1)}))`. At
/// `kappa = beta / lambda` it agrees with [`analytic_c`] only when `beta = 1`.
pub fn alternative_c(beta: f64, lambda: f64, kappa: f64) -> f64 {
    beta * (lambda + 1.0 / kappa) / ((1.0 / kappa) * -(-2.0 / (lambda * kappa + 1.0)).exp_m1())
}

/// Where the two branches of the envelope meet the right-hand side:
/// `r* = 2 beta kappa / (lambda kappa + beta)`.
pub fn equality_distance(beta: f64, lambda: f64, kappa: f64) -> f64 {
    2.0 * beta * kappa / (lambda * kappa + beta)
}

/// Evaluates both sides at every ordered pair of points.
pub fn check_hessian_condition(
    beta: f64,
    lambda: f64,
    spec: &KernelSpec,
    points: &[Point],
) -> Result<HessianConditionReport> {
    if spec.family != KernelFamily::MaternHalf {
        return Err(Error::invalid("the Hessian condition is checked for the Matérn-1/2 kernel"));
    }
    if points.is_empty() || !(beta > 0.0) || !(lambda >= 0.0) {
        return Err(Error::invalid("need points, beta > 0 and lambda >= 0"));
    }
    let kappa = spec.lengthscale;
    let c = analytic_c(beta, lambda, kappa);
    let mut worst = f64::NEG_INFINITY;
    let mut empirical_c: f64 = 0.0;
    let mut pairs = 0;
    for x in points {
        for x2 in points {
            let r = distance(x, x2);
            let lhs = lipschitz_envelope(beta, lambda, kappa, r);
            worst = worst.max(lhs - hessian_rhs(c, kappa, r));
            if r > 0.0 {
                empirical_c = empirical_c.max(lhs / -(-r / kappa).exp_m1());
            }
            pairs += 1;
        }
    }
    Ok(HessianConditionReport {
        max_lhs_minus_rhs: worst,
        empirical_c,
        analytic_c: c,
        alternative_c: alternative_c(beta, lambda, kappa),
        equality_distance: equality_distance(beta, lambda, kappa),
        satisfied: worst <= HESSIAN_TOLERANCE,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ActionSpace;

    #[test]
    fn identical_points_give_zero_on_both_sides() {
        assert_eq!(lipschitz_envelope(1.0, 1.0, 1.0, 0.0), 0.0);
        assert_eq!(hessian_rhs(5.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn equality_at_unit_distance_for_unit_parameters() {
        let c = analytic_c(1.0, 1.0, 1.0);
        assert!((c - 2.0 / (1.0 - (-1f64).exp())).abs() < 1e-12);
        assert_eq!(lipschitz_envelope(1.0, 1.0, 1.0, 1.0), 2.0);
        assert!((hessian_rhs(c, 1.0, 1.0) - 2.0).abs() < 1e-12);
        assert_eq!(equality_distance(1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn sixty_four_point_grid_satisfies_condition() {
        let space = ActionSpace::cube_grid(1, 64).unwrap();
        let spec = KernelSpec::matern_half(1.0, 1.0).unwrap();
        let report = check_hessian_condition(1.0, 1.0, &spec, space.points()).unwrap();
        assert!(report.max_lhs_minus_rhs <= 1e-10);
        assert!(report.satisfied);
        assert!(report.empirical_c <= report.analytic_c + 1e-12);
        assert_eq!(report.pairs, 64 * 64);
    }

    #[test]
    fn envelope_touches_rhs_only_at_equality_distance() {
        for &(beta, lambda, kappa) in &[(0.5, 2.0, 0.3), (2.0, 0.5, 4.0), (1.0, 3.0, 1.0)] {
            let c = analytic_c(beta, lambda, kappa);
            let r = equality_distance(beta, lambda, kappa);
            let gap = |r: f64| hessian_rhs(c, kappa, r) - lipschitz_envelope(beta, lambda, kappa, r);
            assert!(gap(r).abs() < 1e-12);
            assert!(gap(0.5 * r) > 0.0 && gap(2.0 * r) > 0.0);
        }
    }

    #[test]
    fn alternative_constant_matches_only_at_unit_beta() {
        assert!((alternative_c(1.0, 2.0, 0.5) - analytic_c(1.0, 2.0, 0.5)).abs() < 1e-12);
        assert!((alternative_c(2.0, 1.0, 2.0) - analytic_c(2.0, 1.0, 2.0)).abs() > 1e-3);
        assert!((alternative_c(0.5, 1.0, 0.5) - analytic_c(0.5, 1.0, 0.5)).abs() > 1e-3);
    }

    #[test]
    fn rejects_white_kernel() {
        let spec = KernelSpec::diagonal_white(1.0).unwrap();
        assert!(check_hessian_condition(1.0, 1.0, &spec, &[vec![0.0]]).is_err());
    }
}
