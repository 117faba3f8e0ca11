use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `k(x, x') = s2 * exp(-|x - x'| / kappa)`
    MaternHalf,
    /// `k(x, x') = s2 * 1[x = x']`
    DiagonalWhite,
}

/// Covariance of a zero-mean Gaussian-process prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Marginal variance `sigma^2`.
    pub variance: f64,
    /// Length scale `kappa`; unused by the white kernel.
    pub lengthscale: f64,
}

impl KernelSpec {
    /// Matérn-1/2 kernel with standard deviation `sigma` and length scale `kappa`.
    pub fn matern_half(sigma: f64, kappa: f64) -> Result<Self> {
        Self::new(KernelFamily::MaternHalf, sigma * sigma, kappa)
    }

    /// Independent coordinates with standard deviation `sigma`.
    pub fn diagonal_white(sigma: f64) -> Result<Self> {
        Self::new(KernelFamily::DiagonalWhite, sigma * sigma, 1.0)
    }

    pub fn new(family: KernelFamily, variance: f64, lengthscale: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid(format!("kernel variance must be positive, got {variance}")));
        }
        if !(lengthscale > 0.0 && lengthscale.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel length scale must be positive, got {lengthscale}"
            )));
        }
        Ok(Self { family, variance, lengthscale })
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        kernel_eval(self, x, y)
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> f64 {
    match spec.family {
        KernelFamily::MaternHalf => spec.variance * (-distance(x, y) / spec.lengthscale).exp(),
        KernelFamily::DiagonalWhite => {
            if x == y {
                spec.variance
            } else {
                0.0
            }
        }
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must all have length n"));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Gram matrix `K_ij = k(x_i, x_j)`. Points must be distinct.
pub fn kernel_matrix(spec: &KernelSpec, points: &[Vec<f64>]) -> Result<SquareMatrix> {
    let n = points.len();
    let mut k = SquareMatrix::zeros(n);
    for i in 0..n {
        k.set(i, i, spec.variance);
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::DegenerateMatrix(format!(
                    "points {j} and {i} coincide; kernel matrix is singular"
                )));
            }
            let v = kernel_eval(spec, &points[i], &points[j]);
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    Ok(k)
}

/// Relative diagonal jitter schedule: 1e-10, 1e-9, ..., 1e-6 times `sigma^2`.
pub const JITTER_SCHEDULE: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Lower-triangular Cholesky factor of `K + jitter * I`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub(crate) lower: SquareMatrix,
    pub jitter: f64,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &SquareMatrix {
        &self.lower
    }

    /// `L z`, reading only the lower triangle.
    pub fn mul_lower(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.lower.row(i)[..=i];
            *o = row.iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
        }
    }
}

/// Factorizes `k` with the escalating jitter policy, failing after `1e-6 * variance`.
pub fn cholesky_jittered(k: &SquareMatrix, variance: f64) -> Result<CholeskyFactor> {
    for rel in JITTER_SCHEDULE {
        let jitter = rel * variance;
        if let Some(lower) = cholesky(k, jitter) {
            return Ok(CholeskyFactor { lower, jitter });
        }
    }
    Err(Error::Numerical(format!(
        "Cholesky factorization of {n}x{n} kernel matrix failed at maximum jitter",
        n = k.dim()
    )))
}

pub(crate) fn cholesky(k: &SquareMatrix, jitter: f64) -> Option<SquareMatrix> {
    let n = k.dim();
    let mut l = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = {
                let (ri, rj) = (&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
                ri.iter().zip(rj).map(|(a, b)| a * b).sum()
            };
            if i == j {
                let s = k.get(i, i) + jitter - dot;
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l.data[i * n + i] = s.sqrt();
            } else {
                l.data[i * n + j] = (k.get(i, j) - dot) / l.data[j * n + j];
            }
        }
    }
    Some(l)
}
