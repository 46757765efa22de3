//! Markov kernels, stationary distributions, time reversal and edge measures.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::support::EdgeSet;

/// Entries at or below this magnitude are structural zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Accuracy of row sums (and total mass) after construction.
pub const ROW_TOL: f64 = 1e-12;
/// Input row sums farther than this from 1 are rejected rather than renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Bound on `‖πP − π‖∞` for an accepted stationary distribution.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Allowed gap between row and column marginals of an edge measure.
pub const MARGINAL_TOL: f64 = 1e-10;

/// An irreducible row-stochastic matrix together with its support graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    matrix: DMatrix<f64>,
    support: EdgeSet,
}

/// A strictly positive probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(DVector<f64>);

/// Stationary pair probabilities `Q = diag(π) P`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMeasure {
    matrix: DMatrix<f64>,
    support: EdgeSet,
}

fn check_square(matrix: &DMatrix<f64>) -> Result<usize> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::NotSquare {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
        });
    }
    let m = matrix.nrows();
    if m <= 1 {
        return Err(Error::InvalidSize(m));
    }
    Ok(m)
}

/// Rejects non-finite and clearly negative entries; zeroes anything within
/// `threshold` of zero.
fn clamp_entries(matrix: &DMatrix<f64>, threshold: f64) -> Result<DMatrix<f64>> {
    let mut out = matrix.clone();
    for x in 0..matrix.nrows() {
        for y in 0..matrix.ncols() {
            let v = matrix[(x, y)];
            if !v.is_finite() || v < -threshold {
                return Err(Error::InvalidEntry {
                    row: x,
                    col: y,
                    value: v,
                });
            }
            if v <= threshold {
                out[(x, y)] = 0.0;
            }
        }
    }
    Ok(out)
}

fn renormalize_rows(matrix: &mut DMatrix<f64>, tol: f64) -> Result<()> {
    for x in 0..matrix.nrows() {
        let sum: f64 = matrix.row(x).sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol {
            return Err(Error::NotStochastic { row: x, sum });
        }
        matrix.row_mut(x).unscale_mut(sum);
    }
    Ok(())
}

/// Validates a candidate transition matrix and infers its support.
///
/// Tiny negatives (at least `-zero_threshold`) are clamped to zero and rows
/// within [`RENORMALIZE_TOL`] of unit sum are renormalized.
pub fn validate_kernel(matrix: &DMatrix<f64>, zero_threshold: f64) -> Result<Kernel> {
    check_square(matrix)?;
    let mut m = clamp_entries(matrix, zero_threshold)?;
    renormalize_rows(&mut m, RENORMALIZE_TOL)?;
    let support = EdgeSet::from_fn(m.nrows(), |x, y| m[(x, y)] > 0.0);
    if !support.is_strongly_connected() {
        return Err(Error::NotIrreducible);
    }
    Ok(Kernel { matrix: m, support })
}

/// Like [`validate_kernel`] but checks the inferred support against a declared one.
pub fn validate_kernel_with_support(
    matrix: &DMatrix<f64>,
    support: &EdgeSet,
    zero_threshold: f64,
) -> Result<Kernel> {
    let m = check_square(matrix)?;
    if support.size() != m {
        return Err(Error::SupportMismatch(format!(
            "support has {} states, matrix has {m}",
            support.size()
        )));
    }
    for x in 0..m {
        for y in 0..m {
            let v = matrix[(x, y)];
            let declared = support.contains(x, y);
            if declared && v <= zero_threshold {
                return Err(Error::SupportMismatch(format!(
                    "declared edge ({}, {}) has entry {v}",
                    x + 1,
                    y + 1
                )));
            }
            if !declared && v > zero_threshold {
                return Err(Error::SupportMismatch(format!(
                    "entry ({}, {}) = {v} lies outside the declared support",
                    x + 1,
                    y + 1
                )));
            }
        }
    }
    validate_kernel(matrix, zero_threshold)
}

impl Kernel {
    /// Validates with the default [`ZERO_THRESHOLD`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        validate_kernel(&matrix, ZERO_THRESHOLD)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// The uniform kernel `U = (1/m) 11ᵀ`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m <= 1 {
            return Err(Error::InvalidSize(m));
        }
        Ok(Self {
            matrix: DMatrix::from_element(m, m, 1.0 / m as f64),
            support: EdgeSet::full(m),
        })
    }

    /// Builds a kernel from a computed matrix whose support is known to be
    /// strongly connected. Off-support entries are dropped and rows are
    /// renormalized; underflow on the support is a numerical failure.
    pub(crate) fn assemble(mut matrix: DMatrix<f64>, support: EdgeSet) -> Result<Self> {
        debug_assert!(support.is_strongly_connected());
        let m = support.size();
        for x in 0..m {
            for y in 0..m {
                if !support.contains(x, y) {
                    matrix[(x, y)] = 0.0;
                    continue;
                }
                let v = matrix[(x, y)];
                if !v.is_finite() || v <= ZERO_THRESHOLD {
                    return Err(Error::NumericalFailure(format!(
                        "entry ({}, {}) = {v} on the support",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        renormalize_rows(&mut matrix, RENORMALIZE_TOL).map_err(|e| {
            Error::NumericalFailure(format!("computed kernel lost stochasticity: {e}"))
        })?;
        Ok(Self { matrix, support })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
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

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn stationary(&self) -> Result<Distribution> {
        stationary_distribution(self)
    }

    /// Largest entrywise gap to another kernel of the same size.
    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

impl Distribution {
    pub fn new(probabilities: DVector<f64>) -> Result<Self> {
        if probabilities.len() <= 1 {
            return Err(Error::InvalidSize(probabilities.len()));
        }
        if let Some((i, &v)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidEntry {
                row: i,
                col: 0,
                value: v,
            });
        }
        let sum = probabilities.sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::NotStochastic { row: 0, sum });
        }
        Ok(Self(probabilities / sum))
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(DVector::from_element(m, 1.0 / m as f64))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Solves `πP = π`, `Σπ = 1` directly: the last equation of `(Pᵀ − I)πᵀ = 0`
/// is replaced by the normalization.
pub fn stationary_distribution(kernel: &Kernel) -> Result<Distribution> {
    let m = kernel.size();
    let mut a = kernel.matrix.transpose() - DMatrix::<f64>::identity(m, m);
    a.row_mut(m - 1).fill(1.0);
    let mut b = DVector::zeros(m);
    b[m - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NumericalFailure("singular stationary system".into()))?;
    if pi.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::NumericalFailure(
            "stationary solve produced a non-positive entry".into(),
        ));
    }
    let pi = &pi / pi.sum();
    let residual = (kernel.matrix.tr_mul(&pi) - &pi).amax();
    if residual > STATIONARY_TOL {
        return Err(Error::NumericalFailure(format!(
            "stationary residual {residual:e}"
        )));
    }
    Ok(Distribution(pi))
}

/// Adjoint kernel `P*(x, x') = π(x') P(x', x) / π(x)`.
pub fn time_reversal(kernel: &Kernel) -> Result<Kernel> {
    let pi = stationary_distribution(kernel)?;
    Ok(reversal_with(kernel, &pi))
}

pub(crate) fn reversal_with(kernel: &Kernel, pi: &Distribution) -> Kernel {
    let m = kernel.size();
    let p = &kernel.matrix;
    let mut out = DMatrix::from_fn(m, m, |x, y| pi[y] * p[(y, x)] / pi[x]);
    for x in 0..m {
        let s = out.row(x).sum();
        out.row_mut(x).unscale_mut(s);
    }
    Kernel {
        matrix: out,
        support: kernel.support.transpose(),
    }
}

/// `Q = diag(π) P`.
pub fn edge_measure(kernel: &Kernel) -> Result<EdgeMeasure> {
    let pi = stationary_distribution(kernel)?;
    Ok(edge_measure_with(kernel, &pi))
}

pub(crate) fn edge_measure_with(kernel: &Kernel, pi: &Distribution) -> EdgeMeasure {
    let m = kernel.size();
    let p = &kernel.matrix;
    EdgeMeasure {
        matrix: DMatrix::from_fn(m, m, |x, y| pi[x] * p[(x, y)]),
        support: kernel.support.clone(),
    }
}

/// `P(x, x') = Q(x, x') / π(x)` with `π` the row marginal of `Q`.
pub fn kernel_from_edge_measure(measure: &EdgeMeasure) -> Result<Kernel> {
    let m = measure.size();
    let pi = measure.row_marginal();
    if let Some(x) = (0..m).find(|&x| pi[x] <= ZERO_THRESHOLD) {
        return Err(Error::DegenerateMarginal(x));
    }
    let q = &measure.matrix;
    let p = DMatrix::from_fn(m, m, |x, y| q[(x, y)] / pi[x]);
    Kernel::assemble(p, measure.support.clone())
}

impl EdgeMeasure {
    /// Validates total mass, marginal balance and connectivity of the support.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_square(&matrix)?;
        let mut q = clamp_entries(&matrix, ZERO_THRESHOLD)?;
        let total = q.sum();
        if (total - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::InvalidEdgeMeasure(format!(
                "total mass {total} is not 1"
            )));
        }
        q.unscale_mut(total);
        let imbalance = marginal_imbalance(&q);
        if imbalance > MARGINAL_TOL {
            return Err(Error::InvalidEdgeMeasure(format!(
                "row and column marginals differ by {imbalance:e}"
            )));
        }
        let support = EdgeSet::from_fn(q.nrows(), |x, y| q[(x, y)] > 0.0);
        if !support.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        Ok(Self { matrix: q, support })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn support(&self) -> &EdgeSet {
        &self.support
    }

    pub fn row_marginal(&self) -> DVector<f64> {
        DVector::from_fn(self.size(), |x, _| self.matrix.row(x).sum())
    }

    pub fn column_marginal(&self) -> DVector<f64> {
        DVector::from_fn(self.size(), |y, _| self.matrix.column(y).sum())
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            support: self.support.transpose(),
        }
    }

    /// `Q[g] = Σ Q(x, x') g(x, x')`.
    pub fn expect(&self, g: &DMatrix<f64>) -> f64 {
        self.matrix.component_mul(g).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.transpose()).amax() <= tol
    }
}

/// Largest gap between row and column marginals of a nonnegative matrix.
pub fn marginal_imbalance(q: &DMatrix<f64>) -> f64 {
    (0..q.nrows())
        .map(|x| (q.row(x).sum() - q.column(x).sum()).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |x, y| rows[x][y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state() -> Kernel {
        Kernel::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn single_state_rejected() {
        assert_eq!(
            Kernel::from_rows(&[vec![1.0]]),
            Err(Error::InvalidSize(1))
        );
    }

    #[test]
    fn uniform_two_state_is_valid() {
        let k = Kernel::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(k.support().is_full());
    }

    #[test]
    fn identity_is_reducible() {
        assert_eq!(
            Kernel::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]),
            Err(Error::NotIrreducible)
        );
    }

    #[test]
    fn row_sum_far_from_one_rejected() {
        let err = Kernel::from_rows(&[vec![0.5, 0.6], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { row: 0, .. }));
    }

    #[test]
    fn near_stochastic_rows_are_renormalized() {
        let k = Kernel::from_rows(&[vec![0.5 + 5e-10, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_abs_diff_eq!(k.matrix().row(0).sum(), 1.0, epsilon = ROW_TOL);
    }

    #[test]
    fn tiny_negative_clamped_large_negative_rejected() {
        let k = Kernel::from_rows(&[
            vec![0.5, 0.5, -1e-13],
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
        ])
        .unwrap();
        assert!(!k.support().contains(0, 2));
        let err = Kernel::from_rows(&[vec![1.1, -0.1], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidEntry { .. }));
    }

    #[test]
    fn declared_support_must_match() {
        let m = matrix_from_rows(&[vec![0.5, 0.5], vec![1.0, 1e-13]]).unwrap();
        let full = EdgeSet::full(2);
        assert!(matches!(
            validate_kernel_with_support(&m, &full, ZERO_THRESHOLD),
            Err(Error::SupportMismatch(_))
        ));
        let partial = EdgeSet::from_edges(2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        assert!(validate_kernel_with_support(&m, &partial, ZERO_THRESHOLD).is_ok());
        let too_small = EdgeSet::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert!(matches!(
            validate_kernel_with_support(&m, &too_small, ZERO_THRESHOLD),
            Err(Error::SupportMismatch(_))
        ));
    }

    #[test]
    fn two_state_stationary() {
        let pi = stationary_distribution(&two_state()).unwrap();
        assert_abs_diff_eq!(pi[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pi[1], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn symmetric_kernel_has_uniform_stationary() {
        let k = Kernel::from_rows(&[
            vec![0.2, 0.5, 0.3],
            vec![0.5, 0.1, 0.4],
            vec![0.3, 0.4, 0.3],
        ])
        .unwrap();
        let pi = stationary_distribution(&k).unwrap();
        for x in 0..3 {
            assert_abs_diff_eq!(pi[x], 1.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_state_reversal_is_identity() {
        let p = two_state();
        let r = time_reversal(&p).unwrap();
        assert_abs_diff_eq!(r.get(0, 1), 0.1, epsilon = 1e-14);
        assert!(r.max_abs_diff(&p) < 1e-14);
    }

    #[test]
    fn two_state_edge_measure() {
        let q = edge_measure(&two_state()).unwrap();
        let expect = [[0.6, 1.0 / 15.0], [1.0 / 15.0, 4.0 / 15.0]];
        for x in 0..2 {
            for y in 0..2 {
                assert_abs_diff_eq!(q.matrix()[(x, y)], expect[x][y], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn uniform_edge_measure_round_trip() {
        let q = EdgeMeasure::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let p = kernel_from_edge_measure(&q).unwrap();
        assert!(p.max_abs_diff(&Kernel::uniform(2).unwrap()) < 1e-15);
    }

    #[test]
    fn three_state_edge_measure_to_kernel() {
        let rows: Vec<Vec<f64>> = [[1.0, 1.0, 2.0], [2.0, 1.0, 2.0], [1.0, 3.0, 1.0]]
            .iter()
            .map(|r| r.iter().map(|v| v / 14.0).collect())
            .collect();
        let q = EdgeMeasure::from_rows(&rows).unwrap();
        let pi = q.row_marginal();
        assert_abs_diff_eq!(pi[0], 4.0 / 14.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pi[1], 5.0 / 14.0, epsilon = 1e-15);
        let p = kernel_from_edge_measure(&q).unwrap();
        assert_abs_diff_eq!(p.get(0, 2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(2, 1), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn unbalanced_measure_rejected() {
        let err = EdgeMeasure::from_rows(&[vec![0.5, 0.3], vec![0.1, 0.1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidEdgeMeasure(_)));
    }
}
