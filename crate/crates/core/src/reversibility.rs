//! Reversibility of kernels and positive functions, log-reversibility of
//! edge functions, and reversibility of exponential families.
//!
//! Three independent tests are provided for positive functions and kernels:
//! detailed balance (kernels only), the Kolmogorov cycle criterion, and the
//! symmetry of `Π ∘ hᵀ` where `Π` is the PF projection. They agree on every
//! irreducible input with symmetric support; supports that are not symmetric
//! are never reversible.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, stationary_distribution};
use crate::linalg::quotient_rank;
use crate::perron::{PositiveEdgeFunction, pf_data, rescale_with};
use crate::support::EdgeSet;

/// Default tolerance for reversibility verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest state space accepted by the cycle enumeration.
pub const KOLMOGOROV_MAX_STATES: usize = 8;

/// A real function on a symmetric, strongly connected edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction {
    matrix: DMatrix<f64>,
    support: EdgeSet,
}

impl EdgeFunction {
    pub fn new(matrix: DMatrix<f64>, support: EdgeSet) -> Result<Self> {
        if matrix.nrows() != support.size() || matrix.ncols() != support.size() {
            return Err(Error::SupportMismatch(format!(
                "{}x{} function on {} states",
                matrix.nrows(),
                matrix.ncols(),
                support.size()
            )));
        }
        if !support.is_symmetric() {
            return Err(Error::AsymmetricSupport);
        }
        if !support.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        let m = support.size();
        for x in 0..m {
            for y in 0..m {
                let v = matrix[(x, y)];
                if !v.is_finite() {
                    return Err(Error::InvalidEntry {
                        row: x,
                        col: y,
                        value: v,
                    });
                }
                if !support.contains(x, y) && v != 0.0 {
                    return Err(Error::SupportMismatch(format!(
                        "nonzero value at ({}, {}) outside the support",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        Ok(Self { matrix, support })
    }

    /// `f(x, x')` on the support, zero elsewhere.
    pub fn from_fn(support: &EdgeSet, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let m = support.size();
        let matrix = DMatrix::from_fn(m, m, |x, y| {
            if support.contains(x, y) { f(x, y) } else { 0.0 }
        });
        Self::new(matrix, support.clone())
    }

    pub fn zero(support: &EdgeSet) -> Result<Self> {
        Self::from_fn(support, |_, _| 0.0)
    }

    pub fn size(&self) -> usize {
        self.support.size()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn support(&self) -> &EdgeSet {
        &self.support
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.matrix[(x, y)]
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            support: self.support.clone(),
        }
    }

    /// `exp[h]` as a positive function on the same support.
    pub fn exp(&self) -> Result<PositiveEdgeFunction> {
        PositiveEdgeFunction::exp_on(&self.matrix, &self.support)
    }
}

/// Split `g = s + (f(x') − f(x))` with `s` symmetric; `valid` is false when
/// the antisymmetric part of `g` is not a gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct LogReversibleDecomposition {
    pub symmetric_part: EdgeFunction,
    pub potential: DVector<f64>,
    pub valid: bool,
}

/// Carrier `K`, generators `g_1..g_d` and parameter `θ` of the tilted family
/// `P_θ = 𝔰(exp[K + Σ θ^i g_i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct EFamilySpec {
    carrier: EdgeFunction,
    generators: Vec<EdgeFunction>,
    theta: Vec<f64>,
}

impl EFamilySpec {
    pub fn new(carrier: EdgeFunction, generators: Vec<EdgeFunction>, theta: Vec<f64>) -> Result<Self> {
        if generators.len() != theta.len() {
            return Err(Error::InvalidFamily(format!(
                "{} generators but {} parameters",
                generators.len(),
                theta.len()
            )));
        }
        if generators.iter().any(|g| g.support != carrier.support) {
            return Err(Error::InvalidFamily(
                "generators and carrier must share one support".into(),
            ));
        }
        let mats: Vec<_> = generators.iter().map(|g| g.matrix.clone()).collect();
        let rank = quotient_rank(&mats, &carrier.support);
        if rank != generators.len() {
            return Err(Error::InvalidFamily(format!(
                "generators have rank {rank} modulo the shift space, expected {}",
                generators.len()
            )));
        }
        Ok(Self {
            carrier,
            generators,
            theta,
        })
    }

    pub fn carrier(&self) -> &EdgeFunction {
        &self.carrier
    }

    pub fn generators(&self) -> &[EdgeFunction] {
        &self.generators
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn support(&self) -> &EdgeSet {
        &self.carrier.support
    }

    /// Same family at another parameter.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.generators.len() {
            return Err(Error::InvalidFamily(format!(
                "expected {} parameters, got {}",
                self.generators.len(),
                theta.len()
            )));
        }
        Ok(Self {
            theta,
            ..self.clone()
        })
    }

    /// `K + Σ θ^i g_i` at parameter `theta`.
    pub fn log_unnormalized(&self, theta: &[f64]) -> DMatrix<f64> {
        let mut out = self.carrier.matrix.clone();
        for (g, t) in self.generators.iter().zip(theta) {
            out += &g.matrix * *t;
        }
        out
    }

    fn tilted(&self, theta: &[f64]) -> Result<PositiveEdgeFunction> {
        PositiveEdgeFunction::exp_on(&self.log_unnormalized(theta), self.support())
    }

    /// The member `P_θ` at parameter `theta`.
    pub fn member_at(&self, theta: &[f64]) -> Result<Kernel> {
        let h = self.tilted(theta)?;
        let pf = pf_data(&h)?;
        rescale_with(&h, &pf)
    }

    /// The member at the spec's own parameter.
    pub fn member(&self) -> Result<Kernel> {
        self.member_at(&self.theta)
    }

    /// Log-partition `ψ(θ) = log ρ(exp[K + Σ θ^i g_i])`.
    pub fn log_partition(&self, theta: &[f64]) -> Result<f64> {
        Ok(pf_data(&self.tilted(theta)?)?.rho.ln())
    }
}

/// `max |π(x)P(x, x') − π(x')P(x', x)|`.
pub fn balance_residual(kernel: &Kernel) -> Result<f64> {
    let pi = stationary_distribution(kernel)?;
    let p = kernel.matrix();
    let m = kernel.size();
    let mut worst = 0.0f64;
    for x in 0..m {
        for y in (x + 1)..m {
            worst = worst.max((pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs());
        }
    }
    Ok(worst)
}

/// Detailed balance test.
pub fn is_reversible_balance(kernel: &Kernel, tol: f64) -> Result<bool> {
    Ok(balance_residual(kernel)? <= tol)
}

/// Visits every simple cycle of length ≥ 3 of a symmetric graph once, in one
/// orientation. Returns early when `visit` returns false.
fn for_each_simple_cycle(support: &EdgeSet, mut visit: impl FnMut(&[usize]) -> bool) {
    fn extend(
        support: &EdgeSet,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        for next in support.successors(last) {
            if next == start && path.len() >= 3 && path[1] < last {
                if !visit(path) {
                    return false;
                }
            } else if next > start && !on_path[next] {
                path.push(next);
                on_path[next] = true;
                let go_on = extend(support, start, path, on_path, visit);
                on_path[next] = false;
                path.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    let m = support.size();
    let mut on_path = vec![false; m];
    for start in 0..m {
        let mut path = vec![start];
        on_path[start] = true;
        let go_on = extend(support, start, &mut path, &mut on_path, &mut visit);
        on_path[start] = false;
        if !go_on {
            return;
        }
    }
}

/// Number of simple cycles of length ≥ 3 in a symmetric graph, counting each
/// cycle once regardless of orientation.
pub fn simple_cycle_count(support: &EdgeSet) -> usize {
    let mut n = 0;
    for_each_simple_cycle(support, |_| {
        n += 1;
        true
    });
    n
}

/// Largest `|log Π h(γ) − log Π h(γ*)|` over simple cycles of length ≥ 3.
///
/// Infinite when the support is not symmetric.
pub fn kolmogorov_residual(h: &PositiveEdgeFunction) -> Result<f64> {
    let m = h.size();
    if m > KOLMOGOROV_MAX_STATES {
        return Err(Error::TooLarge {
            got: m,
            max: KOLMOGOROV_MAX_STATES,
        });
    }
    if !h.support().is_symmetric() {
        return Ok(f64::INFINITY);
    }
    let log_h = h.matrix().map(|v| if v > 0.0 { v.ln() } else { 0.0 });
    let mut worst = 0.0f64;
    for_each_simple_cycle(h.support(), |cycle| {
        let n = cycle.len();
        let mut forward = 0.0;
        let mut backward = 0.0;
        for k in 0..n {
            let (a, b) = (cycle[k], cycle[(k + 1) % n]);
            forward += log_h[(a, b)];
            backward += log_h[(b, a)];
        }
        worst = worst.max((forward - backward).abs());
        true
    });
    Ok(worst)
}

/// Kolmogorov criterion over all simple cycles (at most 8 states).
pub fn kolmogorov_cycle_check(h: &PositiveEdgeFunction, tol: f64) -> Result<bool> {
    Ok(kolmogorov_residual(h)? <= tol)
}

/// `‖Π∘hᵀ − (Π∘hᵀ)ᵀ‖ / ‖Π∘hᵀ‖` in the entrywise max norm.
pub fn pf_symmetry_residual(h: &PositiveEdgeFunction) -> Result<f64> {
    let pf = pf_data(h)?;
    let a = pf.projection.component_mul(&h.matrix().transpose());
    Ok((&a - a.transpose()).amax() / a.amax())
}

/// Reversibility through the symmetry of `Π ∘ hᵀ`; `O(m³)` overall.
pub fn is_reversible_pf(h: &PositiveEdgeFunction, tol: f64) -> Result<bool> {
    if !h.support().is_symmetric() {
        return Ok(false);
    }
    Ok(pf_symmetry_residual(h)? <= tol)
}

/// Recovers the potential along a BFS tree rooted at state 0 (`f(0) = 0`)
/// and checks every remaining edge.
pub fn log_reversible_decompose(g: &EdgeFunction, tol: f64) -> LogReversibleDecomposition {
    let m = g.size();
    let a = &g.matrix;
    let symmetric = (a + a.transpose()) * 0.5;
    let skew = (a - a.transpose()) * 0.5;

    let mut potential = DVector::<f64>::zeros(m);
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for y in g.support.successors(x) {
            if !seen[y] {
                seen[y] = true;
                potential[y] = potential[x] + skew[(x, y)];
                queue.push_back(y);
            }
        }
    }

    let scale = 1.0f64.max(a.amax());
    let valid = g
        .support
        .edges()
        .all(|(x, y)| (skew[(x, y)] - (potential[y] - potential[x])).abs() <= tol * scale);

    LogReversibleDecomposition {
        symmetric_part: EdgeFunction {
            matrix: symmetric,
            support: g.support.clone(),
        },
        potential,
        valid,
    }
}

/// A tilted family is reversible iff its support is symmetric and the
/// carrier and every generator are log-reversible.
pub fn is_reversible_efamily(spec: &EFamilySpec, tol: f64) -> bool {
    spec.support().is_symmetric()
        && std::iter::once(&spec.carrier)
            .chain(spec.generators.iter())
            .all(|f| log_reversible_decompose(f, tol).valid)
}
