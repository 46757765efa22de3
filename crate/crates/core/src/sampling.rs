//! Seeded random kernels and positive functions for property sweeps and
//! experiments.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{EdgeMeasure, Kernel, kernel_from_edge_measure};
use crate::perron::PositiveEdgeFunction;
use crate::support::EdgeSet;

/// Range of the i.i.d. uniform weights behind every sampler.
pub const WEIGHT_RANGE: (f64, f64) = (0.1, 1.0);
const SINKHORN_TOL: f64 = 1e-15;
const SINKHORN_MAX_ITER: usize = 10_000;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(WEIGHT_RANGE.0..WEIGHT_RANGE.1)
}

fn normalize_rows(mut w: DMatrix<f64>) -> DMatrix<f64> {
    for x in 0..w.nrows() {
        let s = w.row(x).sum();
        w.row_mut(x).unscale_mut(s);
    }
    w
}

/// Random probability vector with positive entries.
pub fn random_distribution<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| weight(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Fully supported kernel with i.i.d. uniform rows, renormalized.
pub fn random_kernel<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Kernel> {
    Kernel::new(normalize_rows(DMatrix::from_fn(m, m, |_, _| weight(rng))))
}

/// Kernel supported exactly on `support`.
pub fn random_kernel_on<R: Rng + ?Sized>(support: &EdgeSet, rng: &mut R) -> Result<Kernel> {
    let m = support.size();
    let w = DMatrix::from_fn(m, m, |x, y| if support.contains(x, y) { weight(rng) } else { 0.0 });
    Kernel::new(normalize_rows(w))
}

/// Random strongly connected support: a random Hamiltonian cycle plus each
/// other pair with probability `density`.
pub fn random_support<R: Rng + ?Sized>(m: usize, density: f64, rng: &mut R) -> EdgeSet {
    let mut order: Vec<usize> = (0..m).collect();
    for k in (1..m).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut e = EdgeSet::from_fn(m, |_, _| rng.random_bool(density));
    for k in 0..m {
        e.insert(order[k], order[(k + 1) % m]);
    }
    e
}

/// Random connected symmetric support: a random spanning tree plus each
/// other pair, self-loops included, with probability `density`.
pub fn random_symmetric_support<R: Rng + ?Sized>(m: usize, density: f64, rng: &mut R) -> EdgeSet {
    let mut order: Vec<usize> = (0..m).collect();
    for k in (1..m).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut e = EdgeSet::empty(m);
    for k in 1..m {
        let parent = order[rng.random_range(0..k)];
        e.insert(order[k], parent);
        e.insert(parent, order[k]);
    }
    for x in 0..m {
        for y in x..m {
            if rng.random_bool(density) {
                e.insert(x, y);
                e.insert(y, x);
            }
        }
    }
    e
}

/// Reversible kernel on a symmetric support, from random symmetric weights.
pub fn random_reversible_on<R: Rng + ?Sized>(support: &EdgeSet, rng: &mut R) -> Result<Kernel> {
    if !support.is_symmetric() {
        return Err(Error::AsymmetricSupport);
    }
    let m = support.size();
    let mut w = DMatrix::zeros(m, m);
    for x in 0..m {
        for y in x..m {
            if support.contains(x, y) {
                let v = weight(rng);
                w[(x, y)] = v;
                w[(y, x)] = v;
            }
        }
    }
    let total = w.sum();
    kernel_from_edge_measure(&EdgeMeasure::new(w / total)?)
}

/// Reversible kernel from a random symmetric edge measure.
pub fn random_reversible<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Kernel> {
    random_reversible_on(&EdgeSet::full(m), rng)
}

/// Symmetric doubly stochastic kernel `D W D` for a random symmetric `W`.
pub fn random_symmetric<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Kernel> {
    let mut w = DMatrix::zeros(m, m);
    for x in 0..m {
        for y in x..m {
            let v = weight(rng);
            w[(x, y)] = v;
            w[(y, x)] = v;
        }
    }
    let mut d = DVector::from_element(m, 1.0);
    for _ in 0..SINKHORN_MAX_ITER {
        let wd = &w * &d;
        let err = d.component_mul(&wd).map(|v| (v - 1.0).abs()).max();
        if err < SINKHORN_TOL * m as f64 {
            let p = DMatrix::from_fn(m, m, |x, y| d[x] * w[(x, y)] * d[y]);
            let p = (&p + p.transpose()) * 0.5;
            return Kernel::new(normalize_rows(p));
        }
        d = d.zip_map(&wd, |a, b| (a / b).sqrt());
    }
    Err(Error::ConvergenceFailure(SINKHORN_MAX_ITER))
}

/// Doubly stochastic kernel by alternating row and column scaling.
pub fn random_bistochastic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Kernel> {
    let mut p = DMatrix::from_fn(m, m, |_, _| weight(rng));
    for _ in 0..SINKHORN_MAX_ITER {
        p = normalize_rows(p);
        let col_err = (0..m)
            .map(|y| (p.column(y).sum() - 1.0).abs())
            .fold(0.0, f64::max);
        if col_err < SINKHORN_TOL * m as f64 {
            return Kernel::new(p);
        }
        for y in 0..m {
            let s = p.column(y).sum();
            p.column_mut(y).unscale_mut(s);
        }
    }
    Err(Error::ConvergenceFailure(SINKHORN_MAX_ITER))
}

/// Memoryless kernel `1ᵀπ` with random `π`.
pub fn random_memoryless<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Kernel> {
    crate::models::memoryless(&random_distribution(m, rng))
}

/// Fully supported positive function with log-uniform entries in `[e^{-2}, e^2]`.
pub fn random_positive_function<R: Rng + ?Sized>(
    m: usize,
    rng: &mut R,
) -> Result<PositiveEdgeFunction> {
    PositiveEdgeFunction::new(DMatrix::from_fn(m, m, |_, _| rng.random_range(-2.0..2.0f64).exp()))
}

/// Positive function `exp[s(x,x') + f(x') − f(x) + c]` with `s` symmetric,
/// hence reversible.
pub fn random_reversible_function<R: Rng + ?Sized>(
    m: usize,
    rng: &mut R,
) -> Result<PositiveEdgeFunction> {
    let mut s = DMatrix::zeros(m, m);
    for x in 0..m {
        for y in x..m {
            let v = rng.random_range(-1.5..1.5);
            s[(x, y)] = v;
            s[(y, x)] = v;
        }
    }
    let f: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c = rng.random_range(-1.0..1.0);
    PositiveEdgeFunction::new(DMatrix::from_fn(m, m, |x, y| (s[(x, y)] + f[y] - f[x] + c).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{FamilyTag, family_membership};

    #[test]
    fn samplers_land_in_their_families() {
        let mut rng = seeded(7);
        for m in 2..6 {
            let s = random_symmetric(m, &mut rng).unwrap();
            assert!(family_membership(&s, FamilyTag::Symmetric, 1e-12).unwrap());
            assert!(family_membership(&s, FamilyTag::Bistochastic, 1e-12).unwrap());
            let b = random_bistochastic(m, &mut rng).unwrap();
            assert!(family_membership(&b, FamilyTag::Bistochastic, 1e-12).unwrap());
            let r = random_reversible(m, &mut rng).unwrap();
            assert!(family_membership(&r, FamilyTag::Reversible, 1e-12).unwrap());
            let i = random_memoryless(m, &mut rng).unwrap();
            assert!(family_membership(&i, FamilyTag::Memoryless, 0.0).unwrap());
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_kernel(4, &mut seeded(3)).unwrap();
        let b = random_kernel(4, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_supports_are_connected() {
        let mut rng = seeded(11);
        for _ in 0..50 {
            let e = random_support(6, 0.2, &mut rng);
            assert!(e.is_strongly_connected());
            assert!(random_kernel_on(&e, &mut rng).unwrap().support() == &e);
            let s = random_symmetric_support(6, 0.2, &mut rng);
            assert!(s.is_symmetric() && s.is_strongly_connected());
            let r = random_reversible_on(&s, &mut rng).unwrap();
            assert!(family_membership(&r, FamilyTag::Reversible, 1e-12).unwrap());
        }
    }
}
