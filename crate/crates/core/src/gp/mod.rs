//! Gaussian-process virtual adversaries: kernels, samplers and supremum bounds.

pub mod bounds;
pub mod kernel;
pub mod mc;
pub mod sampler;

pub use bounds::{dudley_bound, gaussian_max_bound, modulus_bound};
pub use kernel::{cholesky_jittered, kernel_eval, kernel_matrix, CholeskyFactor, KernelFamily, KernelSpec, SquareMatrix};
pub use mc::{expected_sup_mc, modulus_of_continuity_mc, sup_mc, sup_of_sum_mc};
pub use sampler::{sample_gp, sample_gp_ou_1d, GpSample, GpSampler, MAX_DENSE_POINTS};
