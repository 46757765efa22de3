//! Named kernels and families used throughout the examples and tests.

use crate::error::{Error, Result};
use crate::kernel::{EdgeMeasure, Kernel, kernel_from_edge_measure};
use crate::reversibility::{EFamilySpec, EdgeFunction};
use crate::support::EdgeSet;
use nalgebra::DMatrix;

/// Biased lazy random walk on the `m`-cycle:
/// stay with weight `e^{θ₁}`, step forward with `e^{θ₂}`, back with `e^{−θ₂}`.
pub fn lazy_cycle(m: usize, theta1: f64, theta2: f64) -> Result<Kernel> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    let (stay, fwd, back) = (theta1.exp(), theta2.exp(), (-theta2).exp());
    let z = stay + fwd + back;
    let mut p = DMatrix::zeros(m, m);
    for x in 0..m {
        p[(x, x)] = stay / z;
        p[(x, (x + 1) % m)] = fwd / z;
        p[((x + 1) % m, x)] = back / z;
    }
    Kernel::new(p)
}

/// The lazy-cycle family: zero carrier, generators
/// `g₁ = Σ δᵢᵀδᵢ` and `g₂ = Σ (δᵢᵀδᵢ₊₁ − δᵢ₊₁ᵀδᵢ)`.
pub fn lazy_cycle_family(m: usize, theta: Vec<f64>) -> Result<EFamilySpec> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    let e = EdgeSet::lazy_cycle(m);
    let stay = EdgeFunction::from_fn(&e, |x, y| if x == y { 1.0 } else { 0.0 })?;
    let drift = EdgeFunction::from_fn(&e, |x, y| {
        if (x + 1) % m == y {
            1.0
        } else if (y + 1) % m == x {
            -1.0
        } else {
            0.0
        }
    })?;
    EFamilySpec::new(EdgeFunction::zero(&e)?, vec![stay, drift], theta)
}

/// Memoryless kernel `P(x, x') = π(x')`.
pub fn memoryless(pi: &[f64]) -> Result<Kernel> {
    let m = pi.len();
    Kernel::new(DMatrix::from_fn(m, m, |_, y| pi[y]))
}

/// Simple random walk on a symmetric support: `Q` uniform on the edges.
pub fn edge_walk(support: &EdgeSet) -> Result<Kernel> {
    if !support.is_symmetric() {
        return Err(Error::AsymmetricSupport);
    }
    let m = support.size();
    let n = support.len() as f64;
    let q = DMatrix::from_fn(m, m, |x, y| if support.contains(x, y) { 1.0 / n } else { 0.0 });
    kernel_from_edge_measure(&EdgeMeasure::new(q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_matches_family_member() {
        for m in 3..7 {
            let direct = lazy_cycle(m, 0.4, -0.7).unwrap();
            let member = lazy_cycle_family(m, vec![0.4, -0.7]).unwrap().member().unwrap();
            assert!(direct.max_abs_diff(&member) < 1e-12);
        }
    }

    #[test]
    fn edge_walk_on_path() {
        let p = edge_walk(&EdgeSet::birth_death(3)).unwrap();
        assert_abs_diff_eq!(p.get(1, 0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn log_two_drift_entries() {
        let p = lazy_cycle(3, 0.0, 2f64.ln()).unwrap();
        assert_abs_diff_eq!(p.get(0, 0), 2.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 1), 4.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1, 0), 1.0 / 7.0, epsilon = 1e-15);
    }
}
