//! Exact joint samplers for Gaussian-process priors on a finite set of points.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kernel::{cholesky_jittered, kernel_matrix, CholeskyFactor, KernelFamily, KernelSpec};
use crate::error::{Error, Result};
use crate::space::Point;

/// Largest point set sampled through a dense Cholesky factor.
pub const MAX_DENSE_POINTS: usize = 4096;

/// One joint draw of a GP on the evaluation points, already multiplied by `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSample {
    pub values: Vec<f64>,
    pub scale: f64,
}

/// Precomputed sampler for a kernel restricted to a fixed list of points.
#[derive(Debug, Clone)]
pub enum GpSampler {
    /// Independent coordinates.
    White { sigma: f64, n: usize },
    /// Exact AR(1) recursion of the exponential kernel on an ascending 1-d grid.
    Markov { sigma: f64, rho: Vec<f64>, innovation: Vec<f64> },
    /// `L z` with `L` the jittered Cholesky factor of the Gram matrix.
    Dense(CholeskyFactor),
}

impl GpSampler {
    /// Picks the cheapest exact sampler: white noise, the Markov recursion for
    /// Matérn-1/2 on ascending 1-d points, and a dense factor otherwise.
    pub fn new(spec: &KernelSpec, points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot sample a GP on zero points"));
        }
        match spec.family {
            KernelFamily::DiagonalWhite => Ok(GpSampler::White { sigma: spec.sigma(), n: points.len() }),
            KernelFamily::MaternHalf => {
                if let Some(grid) = ascending_1d(points) {
                    Self::markov_1d(spec, &grid)
                } else {
                    Self::dense(spec, points)
                }
            }
        }
    }

    pub fn dense(spec: &KernelSpec, points: &[Point]) -> Result<Self> {
        if points.len() > MAX_DENSE_POINTS {
            return Err(Error::invalid(format!(
                "{} points exceed the dense sampling cap of {MAX_DENSE_POINTS}",
                points.len()
            )));
        }
        let k = kernel_matrix(spec, points)?;
        Ok(GpSampler::Dense(cholesky_jittered(&k, spec.variance)?))
    }

    pub fn markov_1d(spec: &KernelSpec, grid: &[f64]) -> Result<Self> {
        if spec.family != KernelFamily::MaternHalf {
            return Err(Error::invalid("the Markov sampler needs the Matérn-1/2 kernel"));
        }
        if grid.is_empty() {
            return Err(Error::invalid("cannot sample a GP on zero points"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid must be sorted strictly ascending"));
        }
        let rho: Vec<f64> = grid.windows(2).map(|w| (-(w[1] - w[0]) / spec.lengthscale).exp()).collect();
        let innovation = rho.iter().map(|r| (1.0 - r * r).sqrt()).collect();
        Ok(GpSampler::Markov { sigma: spec.sigma(), rho, innovation })
    }

    pub fn len(&self) -> usize {
        match self {
            GpSampler::White { n, .. } => *n,
            GpSampler::Markov { rho, .. } => rho.len() + 1,
            GpSampler::Dense(f) => f.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `scale * gamma` into `out`. A zero scale yields zeros without touching `rng`.
    pub fn sample_into<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        if scale == 0.0 {
            out.fill(0.0);
            return;
        }
        match self {
            GpSampler::White { sigma, .. } => {
                let s = scale * sigma;
                for o in out.iter_mut() {
                    *o = s * rng.sample::<f64, _>(StandardNormal);
                }
            }
            GpSampler::Markov { sigma, rho, innovation } => {
                let s = scale * sigma;
                let mut prev: f64 = rng.sample(StandardNormal);
                out[0] = s * prev;
                for i in 0..rho.len() {
                    let z: f64 = rng.sample(StandardNormal);
                    prev = rho[i] * prev + innovation[i] * z;
                    out[i + 1] = s * prev;
                }
            }
            GpSampler::Dense(factor) => {
                let z: Vec<f64> = (0..factor.dim()).map(|_| rng.sample(StandardNormal)).collect();
                factor.mul_lower(&z, out);
                for o in out.iter_mut() {
                    *o *= scale;
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> GpSample {
        let mut values = vec![0.0; self.len()];
        self.sample_into(scale, rng, &mut values);
        GpSample { values, scale }
    }
}

fn ascending_1d(points: &[Point]) -> Option<Vec<f64>> {
    if points.iter().any(|p| p.len() != 1) {
        return None;
    }
    let grid: Vec<f64> = points.iter().map(|p| p[0]).collect();
    grid.windows(2).all(|w| w[1] > w[0]).then_some(grid)
}

/// Draws `scale * gamma` with `gamma ~ GP(0, k)` through the dense Cholesky route.
pub fn sample_gp<R: Rng + ?Sized>(
    spec: &KernelSpec,
    points: &[Point],
    scale: f64,
    rng: &mut R,
) -> Result<GpSample> {
    Ok(GpSampler::dense(spec, points)?.sample(scale, rng))
}

/// Draws `scale * gamma` on an ascending 1-d grid through the exact AR(1) recursion
/// `g[i+1] = rho_i g[i] + sigma sqrt(1 - rho_i^2) z_i`, `rho_i = exp(-(x[i+1] - x[i]) / kappa)`.
pub fn sample_gp_ou_1d<R: Rng + ?Sized>(
    spec: &KernelSpec,
    grid: &[f64],
    scale: f64,
    rng: &mut R,
) -> Result<GpSample> {
    Ok(GpSampler::markov_1d(spec, grid)?.sample(scale, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::stats::ks_two_sample;

    fn sample_cov(draws: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let n = draws.len() as f64;
        let mi = draws.iter().map(|d| d[i]).sum::<f64>() / n;
        let mj = draws.iter().map(|d| d[j]).sum::<f64>() / n;
        draws.iter().map(|d| (d[i] - mi) * (d[j] - mj)).sum::<f64>() / (n - 1.0)
    }

    fn corr(draws: &[Vec<f64>], i: usize, j: usize) -> f64 {
        sample_cov(draws, i, j) / (sample_cov(draws, i, i) * sample_cov(draws, j, j)).sqrt()
    }

    #[test]
    fn zero_scale_is_zero_vector() {
        let spec = KernelSpec::matern_half(1.0, 1.0).unwrap();
        let mut rng = rng_from_seed(1);
        let s = sample_gp(&spec, &[vec![0.0], vec![0.5]], 0.0, &mut rng).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn white_noise_moments() {
        let spec = KernelSpec::diagonal_white(1.0).unwrap();
        let pts: Vec<Point> = (0..3).map(|i| vec![i as f64]).collect();
        let sampler = GpSampler::dense(&spec, &pts).unwrap();
        let mut rng = rng_from_seed(7);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sampler.sample(1.0, &mut rng).values).collect();
        for i in 0..3 {
            assert!((sample_cov(&draws, i, i) - 1.0).abs() < 0.05);
        }
        assert!(sample_cov(&draws, 0, 1).abs() < 0.02);
        assert!(sample_cov(&draws, 1, 2).abs() < 0.02);
    }

    #[test]
    fn matern_pair_correlation() {
        let spec = KernelSpec::matern_half(1.0, 1.0).unwrap();
        let pts = vec![vec![0.0], vec![1.0]];
        let sampler = GpSampler::dense(&spec, &pts).unwrap();
        let mut rng = rng_from_seed(11);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sampler.sample(1.0, &mut rng).values).collect();
        assert!((corr(&draws, 0, 1) - (-1f64).exp()).abs() < 0.02);
    }

    #[test]
    fn markov_pair_correlation_and_single_point() {
        let spec = KernelSpec::matern_half(1.5, 0.7).unwrap();
        let mut rng = rng_from_seed(3);
        let single: Vec<f64> =
            (0..20_000).map(|_| sample_gp_ou_1d(&spec, &[0.2], 1.0, &mut rng).unwrap().values[0]).collect();
        let var = single.iter().map(|v| v * v).sum::<f64>() / single.len() as f64;
        assert!((var - 2.25).abs() < 0.1);

        let sampler = GpSampler::markov_1d(&spec, &[0.1, 0.4]).unwrap();
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sampler.sample(1.0, &mut rng).values).collect();
        assert!((corr(&draws, 0, 1) - (-0.3f64 / 0.7).exp()).abs() < 0.02);
    }

    #[test]
    fn unsorted_grid_rejected() {
        let spec = KernelSpec::matern_half(1.0, 1.0).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            sample_gp_ou_1d(&spec, &[0.5, 0.2], 1.0, &mut rng),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn empirical_covariance_converges_to_scaled_kernel() {
        let spec = KernelSpec::matern_half(1.0, 0.5).unwrap();
        let pts: Vec<Point> = vec![vec![0.0, 0.0], vec![0.3, 0.1], vec![0.9, 0.5], vec![0.2, 0.8]];
        let sampler = GpSampler::dense(&spec, &pts).unwrap();
        let k = kernel_matrix(&spec, &pts).unwrap();
        let scale = 1.7;
        let mut rng = rng_from_seed(5);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| sampler.sample(scale, &mut rng).values).collect();
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let target = scale * scale * k.get(i, j);
                diff += (sample_cov(&draws, i, j) - target).powi(2);
                norm += target * target;
            }
        }
        assert!(diff.sqrt() <= 0.05 * norm.sqrt());
    }

    #[test]
    fn markov_matches_dense_in_distribution() {
        let spec = KernelSpec::matern_half(1.0, 0.3).unwrap();
        let grid: Vec<f64> = (0..16).map(|i| (2 * i + 1) as f64 / 32.0).collect();
        let pts: Vec<Point> = grid.iter().map(|&x| vec![x]).collect();
        let dense = GpSampler::dense(&spec, &pts).unwrap();
        let markov = GpSampler::markov_1d(&spec, &grid).unwrap();
        let mut rng_a = rng_from_seed(21);
        let mut rng_b = rng_from_seed(22);
        let n = 5000;
        let sup = |s: &GpSampler, rng: &mut crate::rng::SimRng| {
            (0..n)
                .map(|_| s.sample(1.0, rng).values.into_iter().fold(f64::NEG_INFINITY, f64::max))
                .collect::<Vec<_>>()
        };
        let (_, p) = ks_two_sample(&sup(&dense, &mut rng_a), &sup(&markov, &mut rng_b));
        assert!(p > 0.01, "KS p-value on sup statistic {p}");
        let pointwise = |s: &GpSampler, rng: &mut crate::rng::SimRng, idx: usize| {
            (0..n).map(|_| s.sample(1.0, rng).values[idx]).collect::<Vec<_>>()
        };
        for idx in [0, 7, 15] {
            let (_, p) = ks_two_sample(&pointwise(&dense, &mut rng_a, idx), &pointwise(&markov, &mut rng_b, idx));
            assert!(p > 0.01, "KS p-value at point {idx}: {p}");
        }
    }

    #[test]
    fn sampler_selection() {
        let m = KernelSpec::matern_half(1.0, 1.0).unwrap();
        let line: Vec<Point> = (0..5).map(|i| vec![i as f64 * 0.2]).collect();
        assert!(matches!(GpSampler::new(&m, &line).unwrap(), GpSampler::Markov { .. }));
        let plane: Vec<Point> = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert!(matches!(GpSampler::new(&m, &plane).unwrap(), GpSampler::Dense(_)));
        let w = KernelSpec::diagonal_white(1.0).unwrap();
        assert!(matches!(GpSampler::new(&w, &plane).unwrap(), GpSampler::White { .. }));
    }
}
