//! Perron-Frobenius data of nonnegative irreducible matrices and the
//! stochastic rescaling map.
//!
//! Eigenvectors are found by power iteration on `h + I`. The shift leaves the
//! eigenvectors unchanged and moves the PF root to `ρ + 1`, which makes it
//! strictly dominant even when the support is periodic (bipartite supports,
//! pure cycles, ...).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::support::EdgeSet;

/// Iterates closer than this (∞-norm, max-normalized) count as converged.
pub const PF_TOL: f64 = 1e-13;
pub const PF_MAX_ITER: usize = 100_000;
/// Accepted relative eigen-residual `‖hv − ρv‖∞ / ρ`.
pub const PF_RESIDUAL_TOL: f64 = 1e-10;

/// A nonnegative matrix that is strictly positive exactly on an irreducible support.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveEdgeFunction {
    matrix: DMatrix<f64>,
    support: EdgeSet,
}

impl PositiveEdgeFunction {
    /// Support is inferred as the strictly positive entries.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
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
        for x in 0..m {
            for y in 0..m {
                let v = matrix[(x, y)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidEntry {
                        row: x,
                        col: y,
                        value: v,
                    });
                }
            }
        }
        let support = EdgeSet::from_fn(m, |x, y| matrix[(x, y)] > 0.0);
        if !support.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        Ok(Self { matrix, support })
    }

    /// Entrywise `exp(log_values)` on `support`, zero elsewhere.
    pub fn exp_on(log_values: &DMatrix<f64>, support: &EdgeSet) -> Result<Self> {
        let m = support.size();
        let matrix = DMatrix::from_fn(m, m, |x, y| {
            if support.contains(x, y) {
                log_values[(x, y)].exp()
            } else {
                0.0
            }
        });
        let h = Self::new(matrix)?;
        if h.support != *support {
            return Err(Error::NumericalFailure(
                "exponential under- or overflow on the support".into(),
            ));
        }
        Ok(h)
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

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            support: self.support.transpose(),
        }
    }
}

impl From<&Kernel> for PositiveEdgeFunction {
    fn from(kernel: &Kernel) -> Self {
        Self {
            matrix: kernel.matrix().clone(),
            support: kernel.support().clone(),
        }
    }
}

/// PF root, eigenvector pair and rank-one projection `Π = v u`.
///
/// `right` has max entry 1; `left` is scaled so that `u·v = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PFData {
    pub rho: f64,
    pub right: DVector<f64>,
    pub left: DVector<f64>,
    pub projection: DMatrix<f64>,
}

fn dominant_vector(matrix: &DMatrix<f64>) -> Result<DVector<f64>> {
    let m = matrix.nrows();
    let tol = PF_TOL.max(4.0 * m as f64 * f64::EPSILON);
    let shifted = matrix + DMatrix::<f64>::identity(m, m);
    let mut v = DVector::from_element(m, 1.0);
    for _ in 0..PF_MAX_ITER {
        let mut next = &shifted * &v;
        let scale = next.amax();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::NumericalFailure(
                "power iteration produced a degenerate iterate".into(),
            ));
        }
        next.unscale_mut(scale);
        let delta = (&next - &v).amax();
        v = next;
        if delta < tol {
            return Ok(v);
        }
    }
    Err(Error::ConvergenceFailure(PF_MAX_ITER))
}

/// Perron-Frobenius data of `h`.
pub fn pf_data(h: &PositiveEdgeFunction) -> Result<PFData> {
    let a = &h.matrix;
    let right = dominant_vector(a)?;
    let raw_left = dominant_vector(&a.transpose())?;
    let left = &raw_left / raw_left.dot(&right);
    let hv = a * &right;
    // u h v / u v, with u v = 1
    let rho = left.dot(&hv);
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::NumericalFailure(format!("PF root {rho}")));
    }
    let right_residual = (&hv - &right * rho).amax() / rho;
    let left_residual = (a.tr_mul(&left) - &left * rho).amax() / rho / left.amax();
    if right_residual > PF_RESIDUAL_TOL || left_residual > PF_RESIDUAL_TOL {
        return Err(Error::ConvergenceFailure(PF_MAX_ITER));
    }
    let projection = &right * left.transpose();
    Ok(PFData {
        rho,
        right,
        left,
        projection,
    })
}

/// `𝔰(h)(x, x') = h(x, x') v(x') / (ρ v(x))`.
pub fn stochastic_rescale(h: &PositiveEdgeFunction) -> Result<Kernel> {
    let pf = pf_data(h)?;
    rescale_with(h, &pf)
}

pub(crate) fn rescale_with(h: &PositiveEdgeFunction, pf: &PFData) -> Result<Kernel> {
    let m = h.size();
    let v = &pf.right;
    let p = DMatrix::from_fn(m, m, |x, y| h.matrix[(x, y)] * v[y] / (pf.rho * v[x]));
    Kernel::assemble(p, h.support.clone())
}

/// The PF projection `Π = v u`, limit of the Cesàro averages of `(h/ρ)^k`.
pub fn pf_projection(h: &PositiveEdgeFunction) -> Result<DMatrix<f64>> {
    Ok(pf_data(h)?.projection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(rows: &[&[f64]]) -> PositiveEdgeFunction {
        let n = rows.len();
        PositiveEdgeFunction::new(DMatrix::from_fn(n, n, |x, y| rows[x][y])).unwrap()
    }

    #[test]
    fn bipartite_two_by_two() {
        // periodic support: plain power iteration would oscillate
        let pf = pf_data(&h(&[&[0.0, 2.0], &[2.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(pf.rho, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pf.right[0], pf.right[1], epsilon = 1e-13);
        assert_abs_diff_eq!(pf.left[0], pf.left[1], epsilon = 1e-13);
        for x in 0..2 {
            for y in 0..2 {
                assert_abs_diff_eq!(pf.projection[(x, y)], 0.5, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn stochastic_matrix_has_unit_root() {
        let k = Kernel::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pf = pf_data(&PositiveEdgeFunction::from(&k)).unwrap();
        assert_abs_diff_eq!(pf.rho, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pf.right[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pf.right[1], 1.0, epsilon = 1e-13);
        // u ∝ π = (2/3, 1/3) and u·v = 1 with v = 1
        assert_abs_diff_eq!(pf.left[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pf.left[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rescale_is_idempotent_and_scale_free() {
        let k = Kernel::from_rows(&[
            vec![0.1, 0.6, 0.3],
            vec![0.4, 0.4, 0.2],
            vec![0.5, 0.25, 0.25],
        ])
        .unwrap();
        let same = stochastic_rescale(&PositiveEdgeFunction::from(&k)).unwrap();
        assert!(same.max_abs_diff(&k) < 1e-14);
        let doubled = PositiveEdgeFunction::new(k.matrix() * 2.0).unwrap();
        assert!(stochastic_rescale(&doubled).unwrap().max_abs_diff(&k) < 1e-12);
    }

    #[test]
    fn doubly_stochastic_projection_is_uniform() {
        let p = pf_projection(&h(&[&[0.2, 0.8, 0.0], &[0.0, 0.2, 0.8], &[0.8, 0.0, 0.2]]))
            .unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_cycle_converges() {
        let pf = pf_data(&h(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 3.0], &[2.0, 0.0, 0.0]])).unwrap();
        assert_abs_diff_eq!(pf.rho, 6f64.cbrt(), epsilon = 1e-12);
    }

    #[test]
    fn reducible_function_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(PositiveEdgeFunction::new(m), Err(Error::NotIrreducible));
    }
}
