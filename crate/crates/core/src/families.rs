//! Membership tests for the reversible, symmetric, doubly stochastic and
//! memoryless families, the flattening of reversible edge measures onto a
//! simplex, and constructions and rank experiments around those families.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{Map, Value, json};

use crate::error::{Error, Result};
use crate::geometry::{basis_element, e_geodesic, m_geodesic};
use crate::kernel::{EdgeMeasure, Kernel, marginal_imbalance};
use crate::linalg::{RANK_TOL, numerical_rank, shift_space_basis, stack_on_support};
use crate::models::memoryless;
use crate::reversibility::balance_residual;
use crate::sampling::random_symmetric;
use crate::support::EdgeSet;

/// Tolerance on the total mass of a [`SimplexPoint`].
pub const SIMPLEX_TOL: f64 = 1e-12;
/// Default mixing weight of the m-hull experiment.
pub const MHULL_DEFAULT_EPSILON: f64 = 0.01;
/// Parameter `t` of the explicit symmetric kernels `P_{ij,t}`.
pub const EHULL_T: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    Reversible,
    Symmetric,
    Bistochastic,
    Memoryless,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [
        FamilyTag::Reversible,
        FamilyTag::Symmetric,
        FamilyTag::Bistochastic,
        FamilyTag::Memoryless,
    ];

    /// Dimension of the family of positive kernels on `m` states.
    pub fn dimension(self, m: usize) -> usize {
        match self {
            FamilyTag::Reversible => m * (m + 1) / 2 - 1,
            FamilyTag::Symmetric => m * (m - 1) / 2,
            FamilyTag::Bistochastic => (m - 1) * (m - 1),
            FamilyTag::Memoryless => m - 1,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            FamilyTag::Reversible => "rev",
            FamilyTag::Symmetric => "sym",
            FamilyTag::Bistochastic => "bis",
            FamilyTag::Memoryless => "iid",
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rev" | "reversible" => Ok(FamilyTag::Reversible),
            "sym" | "symmetric" => Ok(FamilyTag::Symmetric),
            "bis" | "bistochastic" => Ok(FamilyTag::Bistochastic),
            "iid" | "memoryless" => Ok(FamilyTag::Memoryless),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// Largest deviation from membership in `tag`; zero for exact members.
pub fn family_residual(kernel: &Kernel, tag: FamilyTag) -> Result<f64> {
    let p = kernel.matrix();
    let m = kernel.size();
    Ok(match tag {
        FamilyTag::Reversible => balance_residual(kernel)?,
        FamilyTag::Symmetric => (p - p.transpose()).amax(),
        FamilyTag::Bistochastic => (0..m)
            .map(|y| (p.column(y).sum() - 1.0).abs())
            .fold(0.0, f64::max),
        FamilyTag::Memoryless => (1..m)
            .map(|x| (p.row(x) - p.row(0)).amax())
            .fold(0.0, f64::max),
    })
}

pub fn family_membership(kernel: &Kernel, tag: FamilyTag, tol: f64) -> Result<bool> {
    Ok(family_residual(kernel, tag)? <= tol)
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if let Some(v) = probabilities.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Parse(format!("invalid probability {v}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Parse(format!("probabilities sum to {total}")));
        }
        Ok(Self(probabilities))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Diagonal of `Q`, then `2 Q(i, j)` for `i < j` in lexicographic order.
pub fn flatten_reversible(measure: &EdgeMeasure) -> Result<SimplexPoint> {
    if !measure.is_symmetric(SIMPLEX_TOL) {
        return Err(Error::NotSymmetric);
    }
    let q = measure.matrix();
    let m = measure.size();
    let mut out: Vec<f64> = (0..m).map(|i| q[(i, i)]).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            out.push(q[(i, j)] + q[(j, i)]);
        }
    }
    SimplexPoint::new(out)
}

/// Inverse of [`flatten_reversible`]; the number of states is recovered
/// from the length `m(m + 1)/2`.
pub fn unflatten_reversible(point: &SimplexPoint) -> Result<EdgeMeasure> {
    let n = point.len();
    let m = ((((8 * n + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    if m * (m + 1) / 2 != n || m < 2 {
        return Err(Error::Parse(format!(
            "length {n} is not m(m+1)/2 for any m ≥ 2"
        )));
    }
    let v = point.as_slice();
    let mut q = DMatrix::zeros(m, m);
    for i in 0..m {
        q[(i, i)] = v[i];
    }
    let mut k = m;
    for i in 0..m {
        for j in (i + 1)..m {
            q[(i, j)] = v[k] / 2.0;
            q[(j, i)] = v[k] / 2.0;
            k += 1;
        }
    }
    EdgeMeasure::new(q)
}

/// The two 3-state edge measures whose e-geodesic midpoint leaves the set
/// of edge measures.
#[derive(Debug, Clone)]
pub struct EdgeMeasureCounterexample {
    pub q0: EdgeMeasure,
    pub q1: EdgeMeasure,
    /// Normalized `sqrt(Q0 ∘ Q1)`.
    pub midpoint: DMatrix<f64>,
    /// Largest gap between row and column marginals of `midpoint`.
    pub imbalance: f64,
}

pub fn counterexample_edge_measures() -> Result<EdgeMeasureCounterexample> {
    let q0 = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 2.0, 2.0, 1.0, 2.0, 1.0, 3.0, 1.0]) / 14.0;
    let q1 = DMatrix::from_row_slice(3, 3, &[1.0, 3.0, 1.0, 2.0, 1.0, 2.0, 2.0, 1.0, 1.0]) / 14.0;
    let root = q0.component_mul(&q1).map(f64::sqrt);
    let midpoint = &root / root.sum();
    let imbalance = marginal_imbalance(&midpoint);
    Ok(EdgeMeasureCounterexample {
        q0: EdgeMeasure::new(q0)?,
        q1: EdgeMeasure::new(q1)?,
        midpoint,
        imbalance,
    })
}

/// Outcome of the e-hull experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EhullOutcome {
    pub rank: usize,
    pub expected: usize,
    /// Largest error of the basis functions rebuilt from the logs of `P_{ij,t}`.
    pub reconstruction_error: f64,
}

/// The symmetric kernel `P_{ij,t}`: `2(1−t)/m` on `(i,i), (j,j)`, `2t/m` on
/// `(i,j), (j,i)` and `1/m` elsewhere.
pub fn ehull_probe_kernel(m: usize, i: usize, j: usize, t: f64) -> Result<Kernel> {
    if i == j || i >= m || j >= m {
        return Err(Error::InvalidSize(m));
    }
    let n = m as f64;
    Kernel::new(DMatrix::from_fn(m, m, |x, y| {
        let pair = |a, b| (x, y) == (a, b);
        if pair(i, i) || pair(j, j) {
            2.0 * (1.0 - t) / n
        } else if pair(i, j) || pair(j, i) {
            2.0 * t / n
        } else {
            1.0 / n
        }
    }))
}

/// Rebuilds every `g_ij`, `(i, j) ∈ T(X²)`, from `log m + log P_{ij,t}` and
/// `log m + log P_{ij,1−t}`; returns the largest entrywise error.
pub fn ehull_reconstruction_error(m: usize, t: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    let n = m as f64;
    let (a, b) = ((2.0 * (1.0 - t)).ln(), (2.0 * t).ln());
    let full = EdgeSet::full(m);
    let log_probe = |i, j, s| -> Result<DMatrix<f64>> {
        Ok(ehull_probe_kernel(m, i, j, s)?.matrix().map(|v| n.ln() + v.ln()))
    };

    let mut worst = 0.0f64;
    let mut h = vec![vec![DMatrix::<f64>::zeros(m, m); m]; m];
    let mut off_diagonal = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..i {
            let hat = log_probe(i, j, t)?;
            let tilde = log_probe(i, j, 1.0 - t)?;
            let g = (&hat * b - &tilde * a) / (b * b - a * a);
            worst = worst.max((&g - basis_element(&full, i, j)?.matrix()).amax());
            off_diagonal += g;
            h[i][j] = (&hat * a - &tilde * b) / (a * a - b * b);
        }
    }
    let identity = DMatrix::from_element(m, m, 1.0) - off_diagonal;
    for j in 0..m {
        let mut sum = DMatrix::zeros(m, m);
        for i in 0..m {
            if i > j {
                sum += &h[i][j];
            } else if i < j {
                sum += &h[j][i];
            }
        }
        let g = (sum - &identity) * (2.0 / (n - 2.0));
        worst = worst.max((&g - basis_element(&full, j, j)?.matrix()).amax());
    }
    Ok(worst)
}

/// Rank of `{log P : P random symmetric} ∪ N` against `(m(m+1)/2 − 1) + m`,
/// together with the explicit reconstruction error at `t = 1/4`.
pub fn ehull_rank_experiment(m: usize, samples: usize, seed: u64) -> Result<EhullOutcome> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    let mut rng = crate::sampling::seeded(seed);
    let full = EdgeSet::full(m);
    let mut functions = Vec::with_capacity(samples + m);
    for _ in 0..samples {
        functions.push(random_symmetric(m, &mut rng)?.matrix().map(f64::ln));
    }
    functions.extend(shift_space_basis(&full));
    let rank = numerical_rank(&stack_on_support(&functions, &full), RANK_TOL);
    Ok(EhullOutcome {
        rank,
        expected: FamilyTag::Reversible.dimension(m) + m,
        reconstruction_error: ehull_reconstruction_error(m, EHULL_T)?,
    })
}

/// Outcome of the m-hull experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MhullOutcome {
    pub rank: usize,
    pub expected: usize,
}

impl MhullOutcome {
    pub fn full_rank(&self) -> bool {
        self.rank == self.expected
    }
}

/// Edge measure `π πᵀ` of the memoryless kernel with
/// `π = (ε/m) 1 + (1 − ε)(δᵢ + δⱼ)/2`.
pub fn mhull_edge_measure(m: usize, i: usize, j: usize, epsilon: f64) -> DMatrix<f64> {
    let pi: Vec<f64> = (0..m)
        .map(|x| {
            let hits = (x == i) as u8 + (x == j) as u8;
            epsilon / m as f64 + (1.0 - epsilon) * f64::from(hits) / 2.0
        })
        .collect();
    DMatrix::from_fn(m, m, |x, y| pi[x] * pi[y])
}

/// Numerical rank of the flattened `Q_{ij,ε}`, `i ≥ j`, against `m(m+1)/2`.
pub fn mhull_basis_experiment(m: usize, epsilon: f64) -> Result<MhullOutcome> {
    if m < 2 {
        return Err(Error::InvalidSize(m));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidFamily(format!("epsilon {epsilon} is outside [0, 1)")));
    }
    let mut rows = Vec::new();
    for i in 0..m {
        for j in 0..=i {
            let q = mhull_edge_measure(m, i, j, epsilon);
            let mut flat: Vec<f64> = (0..m).map(|x| q[(x, x)]).collect();
            for x in 0..m {
                for y in (x + 1)..m {
                    flat.push(q[(x, y)] + q[(y, x)]);
                }
            }
            rows.push(flat);
        }
    }
    let n = rows.len();
    let stacked = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    Ok(MhullOutcome {
        rank: numerical_rank(&stacked, RANK_TOL),
        expected: n,
    })
}

/// Coordinates `θⁱ`, `i < m`, and `θ^{ij}`, `i, j < m` (row-major), of a
/// fully supported kernel:
///
/// `θⁱ = log[P(m,i)P(i,m)/P(m,m)²]`, `θ^{ij} = log[P(i,j)P(m,m)/(P(m,j)P(i,m))]`.
pub fn iid_family_coordinates(kernel: &Kernel) -> Result<(Vec<f64>, Vec<f64>)> {
    if !kernel.support().is_full() {
        return Err(Error::SupportMismatch("full support required".into()));
    }
    let l = kernel.matrix().map(f64::ln);
    let last = kernel.size() - 1;
    let single = (0..last)
        .map(|i| l[(last, i)] + l[(i, last)] - 2.0 * l[(last, last)])
        .collect();
    let pair = (0..last)
        .flat_map(|i| (0..last).map(move |j| (i, j)))
        .map(|(i, j)| l[(i, j)] + l[(last, last)] - l[(last, j)] - l[(i, last)])
        .collect();
    Ok((single, pair))
}

/// Endpoints and m-geodesic midpoint of two memoryless kernels: rows
/// `π_p = (p, 1 − p, 1, …, 1)/(m − 1)` and `π_{1−p}`.
pub fn memoryless_mixture_counterexample(m: usize, p: f64) -> Result<(Kernel, Kernel, Kernel)> {
    if m < 2 {
        return Err(Error::InvalidSize(m));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidFamily(format!("p = {p} is outside (0, 1)")));
    }
    let row = |p: f64| -> Vec<f64> {
        let mut v = vec![1.0 / (m - 1) as f64; m];
        v[0] = p / (m - 1) as f64;
        v[1] = (1.0 - p) / (m - 1) as f64;
        v
    };
    let p0 = memoryless(&row(p))?;
    let p1 = memoryless(&row(1.0 - p))?;
    let mid = m_geodesic(&p0, &p1, 0.5)?;
    Ok((p0, p1, mid))
}

/// Endpoints and e-geodesic midpoint of two symmetric kernels, the uniform
/// one and `[[α, 2/3 − α, 1/3], [2/3 − α, α, 1/3], [1/3, 1/3, 1/3]]`,
/// padded to `m` states by `(1/m)[[3P, 1], [1, 1]]`.
pub fn symmetric_geodesic_counterexample(m: usize, alpha: f64) -> Result<(Kernel, Kernel, Kernel)> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    if !(alpha > 0.0 && alpha < 2.0 / 3.0) {
        return Err(Error::InvalidFamily(format!(
            "alpha = {alpha} is outside (0, 2/3)"
        )));
    }
    let third = 1.0 / 3.0;
    let core0 = DMatrix::from_row_slice(
        3,
        3,
        &[alpha, 2.0 * third - alpha, third, 2.0 * third - alpha, alpha, third, third, third, third],
    );
    let core1 = DMatrix::from_element(3, 3, third);
    let pad = |core: &DMatrix<f64>| {
        let n = m as f64;
        DMatrix::from_fn(m, m, |x, y| {
            if x < 3 && y < 3 { 3.0 * core[(x, y)] / n } else { 1.0 / n }
        })
    };
    let p0 = Kernel::new(pad(&core0))?;
    let p1 = Kernel::new(pad(&core1))?;
    let mid = e_geodesic(&p0, &p1, 0.5)?;
    Ok((p0, p1, mid))
}

/// JSON report of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    pub pass: bool,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, params: Value, pass: bool) -> Self {
        Self {
            experiment: experiment.into(),
            params: match params {
                Value::Object(map) => map,
                _ => Map::new(),
            },
            rank: None,
            expected: None,
            pass,
            extra: Map::new(),
        }
    }

    pub fn with_rank(mut self, rank: usize, expected: usize) -> Self {
        self.rank = Some(rank);
        self.expected = Some(expected);
        self
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.into(), value);
        self
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report fields are plain JSON")
    }
}

/// Runs the e-hull experiment and packages it.
pub fn ehull_report(m: usize, samples: usize, seed: u64) -> Result<ExperimentReport> {
    let out = ehull_rank_experiment(m, samples, seed)?;
    let pass = out.rank == out.expected && out.reconstruction_error <= 1e-9;
    Ok(ExperimentReport::new(
        "ehull",
        json!({"m": m, "samples": samples, "seed": seed, "t": EHULL_T}),
        pass,
    )
    .with_rank(out.rank, out.expected)
    .with("reconstruction_error", json!(out.reconstruction_error)))
}

/// Runs the m-hull experiment and packages it.
pub fn mhull_report(m: usize, epsilon: f64) -> Result<ExperimentReport> {
    let out = mhull_basis_experiment(m, epsilon)?;
    Ok(ExperimentReport::new("mhull", json!({"m": m, "epsilon": epsilon}), out.full_rank())
        .with_rank(out.rank, out.expected))
}

/// The 3-state edge-measure counterexample as a report.
pub fn counterexample_report() -> Result<ExperimentReport> {
    let c = counterexample_edge_measures()?;
    let rows = |q: &DMatrix<f64>| -> Value {
        (0..q.nrows())
            .map(|x| q.row(x).iter().copied().collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into()
    };
    let marginals = |v: Vec<f64>| json!(v);
    Ok(ExperimentReport::new("counterexample", json!({}), c.imbalance > 1e-3)
        .with("q0", rows(c.q0.matrix()))
        .with("q1", rows(c.q1.matrix()))
        .with("midpoint", rows(&c.midpoint))
        .with(
            "midpoint_row_marginal",
            marginals((0..3).map(|x| c.midpoint.row(x).sum()).collect()),
        )
        .with(
            "midpoint_column_marginal",
            marginals((0..3).map(|y| c.midpoint.column(y).sum()).collect()),
        )
        .with("imbalance", json!(c.imbalance)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::lazy_cycle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_belongs_everywhere() {
        let u = Kernel::uniform(4).unwrap();
        for tag in FamilyTag::ALL {
            assert!(family_membership(&u, tag, 1e-12).unwrap(), "{tag:?}");
        }
    }

    #[test]
    fn lazy_cycle_is_only_bistochastic() {
        let p = lazy_cycle(3, 0.0, 2f64.ln()).unwrap();
        assert!(family_membership(&p, FamilyTag::Bistochastic, 1e-9).unwrap());
        assert!(!family_membership(&p, FamilyTag::Reversible, 1e-9).unwrap());
        assert!(!family_membership(&p, FamilyTag::Symmetric, 1e-9).unwrap());
        assert!(!family_membership(&p, FamilyTag::Memoryless, 1e-9).unwrap());
    }

    #[test]
    fn memoryless_is_reversible() {
        let p = memoryless(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(family_membership(&p, FamilyTag::Memoryless, 1e-12).unwrap());
        assert!(family_membership(&p, FamilyTag::Reversible, 1e-12).unwrap());
    }

    #[test]
    fn flatten_uniform_two_state() {
        let q = EdgeMeasure::new(DMatrix::from_element(2, 2, 0.25)).unwrap();
        let flat = flatten_reversible(&q).unwrap();
        assert_eq!(flat.as_slice(), &[0.25, 0.25, 0.5]);
        let back = unflatten_reversible(&flat).unwrap();
        assert_eq!(back.matrix(), q.matrix());
    }

    #[test]
    fn flatten_rejects_asymmetric() {
        let c = counterexample_edge_measures().unwrap();
        assert_eq!(flatten_reversible(&c.q0), Err(Error::NotSymmetric));
    }

    #[test]
    fn counterexample_marginals() {
        let c = counterexample_edge_measures().unwrap();
        let r0 = c.q0.row_marginal() * 14.0;
        let r1 = c.q1.row_marginal() * 14.0;
        for (x, (a, b)) in [(4.0, 5.0), (5.0, 5.0), (5.0, 4.0)].into_iter().enumerate() {
            assert_abs_diff_eq!(r0[x], a, epsilon = 1e-12);
            assert_abs_diff_eq!(r1[x], b, epsilon = 1e-12);
        }
        assert!(c.imbalance > 1e-3);
    }

    #[test]
    fn probe_kernels_are_symmetric() {
        let p = ehull_probe_kernel(4, 2, 0, 0.25).unwrap();
        assert!(family_membership(&p, FamilyTag::Symmetric, 0.0).unwrap());
        assert_abs_diff_eq!(p.get(2, 2), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(2, 0), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn ehull_needs_three_states() {
        assert_eq!(ehull_rank_experiment(2, 10, 0), Err(Error::InvalidSize(2)));
        assert!(ehull_reconstruction_error(3, 0.25).unwrap() < 1e-12);
    }

    #[test]
    fn mhull_exact_basis() {
        assert!(mhull_basis_experiment(3, 0.0).unwrap().full_rank());
        assert!(mhull_basis_experiment(3, 0.01).unwrap().full_rank());
        assert!(!mhull_basis_experiment(3, 0.9999).unwrap().full_rank());
    }

    #[test]
    fn iid_coordinates_of_memoryless() {
        let pi = [0.1, 0.2, 0.3, 0.4];
        let (single, pair) = iid_family_coordinates(&memoryless(&pi).unwrap()).unwrap();
        assert_eq!(pair.len(), 9);
        assert!(pair.iter().all(|v| v.abs() < 1e-14));
        for i in 0..3 {
            assert_abs_diff_eq!(single[i], (pi[i] / pi[3]).ln(), epsilon = 1e-14);
        }
    }

    #[test]
    fn two_state_memoryless_mixture() {
        let (_, _, mid) = memoryless_mixture_counterexample(2, 0.2).unwrap();
        // P_{1/2} = [[p² + (1−p)², 2p(1−p)], ...]
        assert_abs_diff_eq!(mid.get(0, 0), 0.68, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.get(0, 1), 0.32, epsilon = 1e-12);
        assert!(!family_membership(&mid, FamilyTag::Memoryless, 1e-9).unwrap());
    }

    #[test]
    fn symmetric_midpoint_only_at_one_third() {
        let (_, _, mid) = symmetric_geodesic_counterexample(3, 1.0 / 3.0).unwrap();
        assert!(family_membership(&mid, FamilyTag::Symmetric, 1e-12).unwrap());
        let (p0, _, mid) = symmetric_geodesic_counterexample(4, 0.1).unwrap();
        assert!(family_membership(&p0, FamilyTag::Symmetric, 0.0).unwrap());
        assert!(!family_membership(&mid, FamilyTag::Symmetric, 1e-9).unwrap());
        assert!(family_membership(&mid, FamilyTag::Reversible, 1e-9).unwrap());
    }

    #[test]
    fn report_layout() {
        let v = mhull_report(2, 0.01).unwrap().to_value();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["experiment", "params", "rank", "expected", "pass"]);
    }
}
