//! Exponential tilting, e/m-geodesics, the natural and expectation charts of
//! the reversible family, its dimension, and the Fisher metric of tilted
//! families.
//!
//! Both charts are indexed by `T(E)`: the edges `(i, j)` with `j ≤ i`, minus
//! the pair `(m, x_star)` whose coordinate is fixed by normalization. The
//! basis of reversible generators is `g_ij = δᵢᵀδⱼ + δⱼᵀδᵢ`, so `g_ii` takes
//! the value 2 on `(i, i)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{
    EdgeMeasure, Kernel, edge_measure, kernel_from_edge_measure, stationary_distribution,
};
use crate::perron::{PositiveEdgeFunction, stochastic_rescale};
use crate::reversibility::{DEFAULT_TOL, EFamilySpec, EdgeFunction, balance_residual};
use crate::support::EdgeSet;

/// Central finite-difference step for the Fisher metric.
pub const FD_STEP: f64 = 1e-5;

/// Coordinates indexed by `T(E)` in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoords {
    support: EdgeSet,
    index: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl ChartCoords {
    fn new(support: EdgeSet, values: Vec<f64>) -> Result<Self> {
        let index = support.chart_index()?;
        if !support.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        if index.len() != values.len() {
            return Err(Error::InfeasibleCoords(format!(
                "expected {} coordinates, got {}",
                index.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InfeasibleCoords(format!("non-finite coordinate {v}")));
        }
        Ok(Self {
            support,
            index,
            values,
        })
    }

    pub fn support(&self) -> &EdgeSet {
        &self.support
    }

    pub fn index(&self) -> &[(usize, usize)] {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.index
            .iter()
            .position(|&p| p == (i, j))
            .map(|k| self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.index.iter().copied().zip(self.values.iter().copied())
    }

    pub fn max_abs_diff(&self, other: &ChartCoords) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Natural (e-) coordinates `θ^{ij}` of a reversible kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCoords(pub ChartCoords);

/// Expectation (m-) coordinates `η_ij = Q(i, j) + Q(j, i)` of a reversible kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationCoords(pub ChartCoords);

impl NaturalCoords {
    pub fn new(support: EdgeSet, theta: Vec<f64>) -> Result<Self> {
        ChartCoords::new(support, theta).map(Self)
    }
}

impl ExpectationCoords {
    pub fn new(support: EdgeSet, eta: Vec<f64>) -> Result<Self> {
        ChartCoords::new(support, eta).map(Self)
    }
}

impl std::ops::Deref for NaturalCoords {
    type Target = ChartCoords;
    fn deref(&self) -> &ChartCoords {
        &self.0
    }
}

impl std::ops::Deref for ExpectationCoords {
    type Target = ChartCoords;
    fn deref(&self) -> &ChartCoords {
        &self.0
    }
}

#[inline]
fn kron(i: usize, j: usize) -> f64 {
    if i == j { 1.0 } else { 0.0 }
}

/// Basis function `g_ij = δᵢᵀδⱼ + δⱼᵀδᵢ` on `support`.
pub fn basis_element(support: &EdgeSet, i: usize, j: usize) -> Result<EdgeFunction> {
    if !support.contains(i, j) {
        return Err(Error::SupportMismatch(format!(
            "({}, {}) is not an edge",
            i + 1,
            j + 1
        )));
    }
    EdgeFunction::from_fn(support, |x, y| {
        kron(x, i) * kron(y, j) + kron(x, j) * kron(y, i)
    })
}

/// The full basis `{g_ij : (i, j) ∈ T(E)}` of reversible generators.
pub fn reversible_basis(support: &EdgeSet) -> Result<Vec<EdgeFunction>> {
    support
        .chart_index()?
        .into_iter()
        .map(|(i, j)| basis_element(support, i, j))
        .collect()
}

/// `dim W_rev(X, E) = (|E| + |T0(E)|)/2 − 1`.
pub fn reversible_dimension(support: &EdgeSet) -> Result<usize> {
    if !support.is_symmetric() {
        return Err(Error::AsymmetricSupport);
    }
    if !support.is_strongly_connected() {
        return Err(Error::NotIrreducible);
    }
    Ok((support.len() + support.t0().len()) / 2 - 1)
}

/// `𝔰(P ∘ exp[θ g])`.
pub fn tilt(kernel: &Kernel, g: &EdgeFunction, theta: f64) -> Result<Kernel> {
    let m = kernel.size();
    if g.size() != m {
        return Err(Error::SupportMismatch("size mismatch".into()));
    }
    let outside = (0..m)
        .flat_map(|x| (0..m).map(move |y| (x, y)))
        .any(|(x, y)| !kernel.support().contains(x, y) && g.get(x, y) != 0.0);
    if outside {
        return Err(Error::SupportMismatch(
            "generator is nonzero outside the kernel's support".into(),
        ));
    }
    let p = kernel.matrix();
    let h = DMatrix::from_fn(m, m, |x, y| p[(x, y)] * (theta * g.get(x, y)).exp());
    stochastic_rescale(&PositiveEdgeFunction::new(h)?)
}

/// Point at `t` on the e-geodesic: `𝔰(P0^{1−t} ∘ P1^t)`.
pub fn e_geodesic(p0: &Kernel, p1: &Kernel, t: f64) -> Result<Kernel> {
    if p0.support() != p1.support() {
        return Err(Error::SupportMismatch(
            "e-geodesic endpoints must share one support".into(),
        ));
    }
    let m = p0.size();
    let (a, b) = (p0.matrix(), p1.matrix());
    let log_h = DMatrix::from_fn(m, m, |x, y| {
        if p0.support().contains(x, y) {
            (1.0 - t) * a[(x, y)].ln() + t * b[(x, y)].ln()
        } else {
            0.0
        }
    });
    stochastic_rescale(&PositiveEdgeFunction::exp_on(&log_h, p0.support())?)
}

/// Point at `t` on the m-geodesic: the kernel of `(1 − t) Q0 + t Q1`.
///
/// Away from the endpoints the support is the union of both supports.
pub fn m_geodesic(p0: &Kernel, p1: &Kernel, t: f64) -> Result<Kernel> {
    if p0.size() != p1.size() {
        return Err(Error::SupportMismatch("size mismatch".into()));
    }
    let q0 = edge_measure(p0)?;
    let q1 = edge_measure(p1)?;
    let mix = q0.matrix() * (1.0 - t) + q1.matrix() * t;
    kernel_from_edge_measure(&EdgeMeasure::new(mix)?)
}

fn require_reversible(kernel: &Kernel) -> Result<()> {
    if !kernel.support().is_symmetric() {
        return Err(Error::AsymmetricSupport);
    }
    let residual = balance_residual(kernel)?;
    if residual > DEFAULT_TOL {
        return Err(Error::NotReversible(residual));
    }
    Ok(())
}

/// `θ^{ij} = log[P(i,j)P(j,i) / (P(m,x⋆)P(x⋆,m))] / (2(1 + δᵢ(j)))`.
pub fn natural_coords(kernel: &Kernel) -> Result<NaturalCoords> {
    require_reversible(kernel)?;
    let support = kernel.support();
    let (last, star) = support.excluded_pair()?;
    let reference = (kernel.get(last, star) * kernel.get(star, last)).ln();
    let theta = support
        .chart_index()?
        .into_iter()
        .map(|(i, j)| {
            ((kernel.get(i, j) * kernel.get(j, i)).ln() - reference) / (2.0 * (1.0 + kron(i, j)))
        })
        .collect();
    NaturalCoords::new(support.clone(), theta)
}

/// `exp(Σ θ^{ij} g_ij)` on the support, before rescaling.
pub fn natural_lift(coords: &NaturalCoords) -> Result<PositiveEdgeFunction> {
    let support = coords.support();
    let m = support.size();
    let mut log_h = DMatrix::zeros(m, m);
    for ((i, j), t) in coords.iter() {
        log_h[(i, j)] += t;
        log_h[(j, i)] += t;
    }
    PositiveEdgeFunction::exp_on(&log_h, support)
}

/// Inverse of [`natural_coords`]; the result is always reversible.
pub fn kernel_from_natural(coords: &NaturalCoords) -> Result<Kernel> {
    stochastic_rescale(&natural_lift(coords)?)
}

/// `η_ij = Q(i, j) + Q(j, i)`.
pub fn expectation_coords(kernel: &Kernel) -> Result<ExpectationCoords> {
    require_reversible(kernel)?;
    let q = edge_measure(kernel)?;
    let q = q.matrix();
    let support = kernel.support();
    let eta = support
        .chart_index()?
        .into_iter()
        .map(|(i, j)| q[(i, j)] + q[(j, i)])
        .collect();
    ExpectationCoords::new(support.clone(), eta)
}

/// Symmetric edge measure with the given expectation coordinates; the
/// excluded pair receives the residual mass.
pub fn edge_measure_from_expectation(coords: &ExpectationCoords) -> Result<EdgeMeasure> {
    let support = coords.support();
    let m = support.size();
    let mut q = DMatrix::zeros(m, m);
    let mut used = 0.0;
    for ((i, j), eta) in coords.iter() {
        if !(eta > 0.0) {
            return Err(Error::InfeasibleCoords(format!(
                "η({}, {}) = {eta} is not positive",
                i + 1,
                j + 1
            )));
        }
        q[(i, j)] = eta / 2.0;
        q[(j, i)] = eta / 2.0;
        used += eta / (1.0 + kron(i, j));
    }
    let residual = 1.0 - used;
    if residual <= 0.0 {
        return Err(Error::InfeasibleCoords(format!(
            "residual mass {residual} is not positive"
        )));
    }
    let (last, star) = support.excluded_pair()?;
    q[(last, star)] = residual / 2.0;
    q[(star, last)] = residual / 2.0;
    EdgeMeasure::new(q).map_err(|e| Error::InfeasibleCoords(e.to_string()))
}

/// Inverse of [`expectation_coords`].
pub fn kernel_from_expectation(coords: &ExpectationCoords) -> Result<Kernel> {
    kernel_from_edge_measure(&edge_measure_from_expectation(coords)?)
}

/// Expectations `Q_θ[g_i]` of the generators under the member's edge measure.
pub fn family_expectations(spec: &EFamilySpec) -> Result<Vec<f64>> {
    let q = edge_measure(&spec.member()?)?;
    Ok(spec.generators().iter().map(|g| q.expect(g.matrix())).collect())
}

/// `𝔤_ij(θ) = Σ Q_θ(x,x') ∂_i log P_θ(x,x') ∂_j log P_θ(x,x')`, with the
/// derivatives taken by central differences of step [`FD_STEP`].
pub fn fisher_metric(spec: &EFamilySpec) -> Result<DMatrix<f64>> {
    let theta = spec.theta();
    let d = spec.dimension();
    let member = spec.member()?;
    let pi = stationary_distribution(&member)?;
    let support = spec.support();
    let edges: Vec<_> = support.edges().collect();

    let mut derivatives = Vec::with_capacity(d);
    for i in 0..d {
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        plus[i] += FD_STEP;
        minus[i] -= FD_STEP;
        let (pp, pm) = (spec.member_at(&plus)?, spec.member_at(&minus)?);
        derivatives.push(
            edges
                .iter()
                .map(|&(x, y)| (pp.get(x, y).ln() - pm.get(x, y).ln()) / (2.0 * FD_STEP))
                .collect::<Vec<_>>(),
        );
    }

    let weights: Vec<f64> = edges.iter().map(|&(x, y)| pi[x] * member.get(x, y)).collect();
    let mut metric = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            metric[(i, j)] = weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * (derivatives[i][k] * derivatives[j][k]))
                .sum();
        }
    }
    Ok(metric)
}
