//! Closed-form expected-supremum and modulus-of-continuity bounds.

use super::kernel::KernelSpec;

/// Chaining bound `16 sigma sqrt(d ln(1 + sqrt(d) / kappa))` on `E sup gamma` over `[0,1]^d`
/// for the Matérn-1/2 kernel. Natural logarithm.
pub fn dudley_bound(spec: &KernelSpec, d: usize) -> f64 {
    let d = d as f64;
    16.0 * spec.sigma() * (d * (1.0 + d.sqrt() / spec.lengthscale).ln()).sqrt()
}

/// Maximal inequality `sigma sqrt(2 ln n)` for `n` equal-variance Gaussians.
pub fn gaussian_max_bound(sigma: f64, n: usize) -> f64 {
    sigma * (2.0 * (n.max(1) as f64).ln()).sqrt()
}

/// Expected global modulus of continuity of a Matérn-1/2 GP on `[0,1]^d`:
/// `32 sigma sqrt(d h / (2 kappa) ln(20 sqrt(d) / h))`.
pub fn modulus_bound(spec: &KernelSpec, d: usize, h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    let d = d as f64;
    32.0 * spec.sigma() * (d * h / (2.0 * spec.lengthscale) * (20.0 * d.sqrt() / h).ln()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dudley_reference_values() {
        let k = KernelSpec::matern_half(1.0, 1.0).unwrap();
        assert!((dudley_bound(&k, 1) - 16.0 * 2f64.ln().sqrt()).abs() < 1e-12);
        assert!((dudley_bound(&k, 1) - 13.3209).abs() < 1e-4);
        assert!((dudley_bound(&k, 4) - 16.0 * (4.0 * 3f64.ln()).sqrt()).abs() < 1e-12);
        assert!((dudley_bound(&k, 4) - 33.54).abs() < 0.01);
        let k2 = KernelSpec::matern_half(2.0, 1.0).unwrap();
        assert_eq!(dudley_bound(&k2, 3), 2.0 * dudley_bound(&KernelSpec::matern_half(1.0, 1.0).unwrap(), 3));
    }

    #[test]
    fn gaussian_max_reference_values() {
        assert_eq!(gaussian_max_bound(1.0, 1), 0.0);
        assert!((gaussian_max_bound(2f64.sqrt(), 10) - 3.0349).abs() < 1e-3);
        assert!((gaussian_max_bound(1.0, 10) - 2.1460).abs() < 1e-3);
    }

    #[test]
    fn modulus_vanishes_at_zero_and_grows() {
        let k = KernelSpec::matern_half(1.0, 1.0).unwrap();
        assert_eq!(modulus_bound(&k, 1, 0.0), 0.0);
        let mut prev = 0.0;
        for h in [1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0, 1.0 / 8.0] {
            let v = modulus_bound(&k, 1, h);
            assert!(v > prev);
            prev = v;
        }
    }
}
