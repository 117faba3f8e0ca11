//! Monte-Carlo estimators of GP suprema and moduli of continuity.

use rand::Rng;

use super::kernel::KernelSpec;
use super::sampler::GpSampler;
use crate::error::{Error, Result};
use crate::space::{distance, Point};
use crate::stats::{Estimate, MeanAccumulator};

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Mean and standard error of `max_x gamma(x)` over `n_samples` independent draws.
pub fn expected_sup_mc<R: Rng + ?Sized>(
    spec: &KernelSpec,
    points: &[Point],
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let sampler = GpSampler::new(spec, points)?;
    sup_mc(&sampler, 1.0, n_samples, rng)
}

/// Same as [`expected_sup_mc`] with a prebuilt sampler and a scale on each draw.
pub fn sup_mc<R: Rng + ?Sized>(
    sampler: &GpSampler,
    scale: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    let mut buf = vec![0.0; sampler.len()];
    let mut acc = MeanAccumulator::new();
    for _ in 0..n_samples {
        sampler.sample_into(scale, rng, &mut buf);
        acc.push(max_of(&buf));
    }
    Ok(acc.estimate())
}

/// `E max_x sum_{t=1}^T gamma_t(x)` with each `gamma_t` drawn independently.
pub fn sup_of_sum_mc<R: Rng + ?Sized>(
    sampler: &GpSampler,
    horizon: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    let mut buf = vec![0.0; sampler.len()];
    let mut sum = vec![0.0; sampler.len()];
    let mut acc = MeanAccumulator::new();
    for _ in 0..n_samples {
        sum.fill(0.0);
        for _ in 0..horizon {
            sampler.sample_into(1.0, rng, &mut buf);
            for (s, b) in sum.iter_mut().zip(&buf) {
                *s += b;
            }
        }
        acc.push(max_of(&sum));
    }
    Ok(acc.estimate())
}

/// Pairs of distinct points at distance at most `h`.
pub fn pairs_within(points: &[Point], h: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if distance(&points[i], &points[j]) <= h + 1e-12 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Estimate of `E sup_{|x - x'| <= h} |gamma(x) - gamma(x')|` over the given points.
pub fn modulus_of_continuity_mc<R: Rng + ?Sized>(
    spec: &KernelSpec,
    points: &[Point],
    h: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let sampler = GpSampler::new(spec, points)?;
    modulus_mc(&sampler, points, h, n_samples, rng)
}

pub fn modulus_mc<R: Rng + ?Sized>(
    sampler: &GpSampler,
    points: &[Point],
    h: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(Error::invalid("Monte-Carlo estimates need at least two samples"));
    }
    let pairs = pairs_within(points, h);
    let mut buf = vec![0.0; sampler.len()];
    let mut acc = MeanAccumulator::new();
    for _ in 0..n_samples {
        sampler.sample_into(1.0, rng, &mut buf);
        let sup = pairs.iter().map(|&(i, j)| (buf[i] - buf[j]).abs()).fold(0.0, f64::max);
        acc.push(sup);
    }
    Ok(acc.estimate())
}
