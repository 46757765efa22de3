//! Small dense helpers shared by the rank experiments.

use nalgebra::DMatrix;

use crate::support::EdgeSet;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Numerical rank with relative threshold `rel_tol`.
pub fn numerical_rank(matrix: &DMatrix<f64>, rel_tol: f64) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let sv = matrix.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Stacks functions on `support` as rows, one column per edge.
pub fn stack_on_support<'a, I>(functions: I, support: &EdgeSet) -> DMatrix<f64>
where
    I: IntoIterator<Item = &'a DMatrix<f64>>,
{
    let edges: Vec<_> = support.edges().collect();
    let rows: Vec<Vec<f64>> = functions
        .into_iter()
        .map(|f| edges.iter().map(|&(x, y)| f[(x, y)]).collect())
        .collect();
    DMatrix::from_fn(rows.len(), edges.len(), |r, c| rows[r][c])
}

/// A basis of the shift space `N(X, E) = {f(x') − f(x) + c}` restricted to
/// `support`: the constant plus the gradients of the first `m − 1` indicators.
///
/// For a strongly connected support these `m` functions are independent.
pub fn shift_space_basis(support: &EdgeSet) -> Vec<DMatrix<f64>> {
    let m = support.size();
    let on = |x: usize, y: usize, v: f64| if support.contains(x, y) { v } else { 0.0 };
    let mut basis = vec![DMatrix::from_fn(m, m, |x, y| on(x, y, 1.0))];
    for k in 0..m.saturating_sub(1) {
        basis.push(DMatrix::from_fn(m, m, |x, y| {
            let d = |s: usize| if s == k { 1.0 } else { 0.0 };
            on(x, y, d(y) - d(x))
        }));
    }
    basis
}

/// Rank of `functions` in the quotient `F(X, E) / N(X, E)`.
pub fn quotient_rank(functions: &[DMatrix<f64>], support: &EdgeSet) -> usize {
    let shifts = shift_space_basis(support);
    let shift_rank = numerical_rank(&stack_on_support(&shifts, support), RANK_TOL);
    let stacked = stack_on_support(functions.iter().chain(shifts.iter()), support);
    numerical_rank(&stacked, RANK_TOL) - shift_rank
}
