//! Mean of an upper-truncated multivariate normal, `E[z | z <= alpha]`, for `d <= 3`.

use crate::error::{Error, Result};
use crate::gp::kernel::cholesky;
use crate::gp::SquareMatrix;
use crate::stats::{normal_cdf, normal_pdf};

/// Truncation regions with less probability than this are rejected.
pub const MIN_REGION_PROBABILITY: f64 = 1e-12;

const MAX_DIM: usize = 3;
const TAIL: f64 = 9.0;
const PANELS: usize = 16;

/// `P(z <= alpha)` for `z ~ N(mu, sigma)` by recursive conditioning on the first
/// coordinate and adaptive quadrature.
pub fn mvn_cdf(mu: &[f64], sigma: &SquareMatrix, alpha: &[f64]) -> Result<f64> {
    validate(mu, sigma, alpha)?;
    Ok(cdf(mu, &to_rows(sigma), alpha, 1e-14))
}

/// `mu - Sigma g`, where `g_i` is the density of the `i`-th marginal of the
/// truncated vector at `alpha_i`:
/// `g_i = phi_i(alpha_i) P(z_{-i} <= alpha_{-i} | z_i = alpha_i) / P(z <= alpha)`.
pub fn truncated_normal_mean(mu: &[f64], sigma: &SquareMatrix, alpha: &[f64]) -> Result<Vec<f64>> {
    validate(mu, sigma, alpha)?;
    let d = mu.len();
    let cov = to_rows(sigma);
    let total = cdf(mu, &cov, alpha, 1e-14);
    if !(total >= MIN_REGION_PROBABILITY) {
        return Err(Error::DegenerateTruncation(total));
    }
    let mut g = vec![0.0; d];
    for i in 0..d {
        if alpha[i].is_infinite() {
            continue;
        }
        let s = cov[i][i].sqrt();
        let density = normal_pdf((alpha[i] - mu[i]) / s) / s;
        let (m, c) = condition(mu, &cov, i, alpha[i]);
        let rest: Vec<f64> = (0..d).filter(|&j| j != i).map(|j| alpha[j]).collect();
        g[i] = density * cdf(&m, &c, &rest, 1e-14) / total;
    }
    Ok((0..d).map(|i| mu[i] - (0..d).map(|j| cov[i][j] * g[j]).sum::<f64>()).collect())
}

fn validate(mu: &[f64], sigma: &SquareMatrix, alpha: &[f64]) -> Result<()> {
    let d = mu.len();
    if d == 0 || d > MAX_DIM {
        return Err(Error::invalid(format!("truncated normal supports 1 to {MAX_DIM} dimensions, got {d}")));
    }
    if sigma.dim() != d || alpha.len() != d {
        return Err(Error::invalid("mean, covariance and truncation point dimensions differ"));
    }
    if alpha.iter().any(|a| a.is_nan()) || mu.iter().any(|m| !m.is_finite()) {
        return Err(Error::invalid("mean and truncation point must not be NaN"));
    }
    for i in 0..d {
        for j in 0..i {
            if (sigma.get(i, j) - sigma.get(j, i)).abs() > 1e-12 * (sigma.get(i, i) * sigma.get(j, j)).sqrt() {
                return Err(Error::invalid("covariance must be symmetric"));
            }
        }
    }
    if cholesky(sigma, 0.0).is_none() {
        return Err(Error::DegenerateMatrix("covariance is not strictly positive definite".into()));
    }
    Ok(())
}

fn to_rows(sigma: &SquareMatrix) -> Vec<Vec<f64>> {
    (0..sigma.dim()).map(|i| sigma.row(i).to_vec()).collect()
}

/// Law of `z_{-i}` given `z_i = x`.
fn condition(mu: &[f64], cov: &[Vec<f64>], i: usize, x: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let rest: Vec<usize> = (0..mu.len()).filter(|&j| j != i).collect();
    let m = rest.iter().map(|&j| mu[j] + cov[j][i] / cov[i][i] * (x - mu[i])).collect();
    let c = rest
        .iter()
        .map(|&j| rest.iter().map(|&k| cov[j][k] - cov[j][i] * cov[k][i] / cov[i][i]).collect())
        .collect();
    (m, c)
}

fn cdf(mu: &[f64], cov: &[Vec<f64>], alpha: &[f64], tol: f64) -> f64 {
    match mu.len() {
        0 => 1.0,
        1 => normal_cdf((alpha[0] - mu[0]) / cov[0][0].sqrt()),
        _ => {
            let s = cov[0][0].sqrt();
            let a = (alpha[0] - mu[0]) / s;
            let hi = a.min(TAIL);
            let lo = (a - TAIL).min(-TAIL);
            if hi <= lo {
                return 0.0;
            }
            let f = |u: f64| {
                let (m, c) = condition(mu, cov, 0, mu[0] + s * u);
                normal_pdf(u) * cdf(&m, &c, &alpha[1..], tol)
            };
            let width = (hi - lo) / PANELS as f64;
            (0..PANELS)
                .map(|k| {
                    let (x0, x1) = (lo + k as f64 * width, lo + (k + 1) as f64 * width);
                    adaptive_simpson(&f, x0, x1, tol / PANELS as f64)
                })
                .sum::<f64>()
                .clamp(0.0, 1.0)
        }
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
