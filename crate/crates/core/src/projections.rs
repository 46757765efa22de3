//! Information divergence between kernels and the m- and e-projections onto
//! the reversible family.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{Kernel, reversal_with, stationary_distribution};
use crate::perron::{PositiveEdgeFunction, stochastic_rescale};
use crate::reversibility::{DEFAULT_TOL, balance_residual};

/// `D(P1 ‖ P2)`, either finite and nonnegative or infinite.
///
/// Variants are ordered so that `Infinite` exceeds every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn value(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }

    fn finite(self, what: &str) -> Result<f64> {
        self.value()
            .ok_or_else(|| Error::SupportMismatch(format!("{what} is infinite")))
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{v}"),
            Divergence::Infinite => f.write_str("infinity"),
        }
    }
}

/// `D(P1‖P2) = Σ π1(x) P1(x,x') log(P1(x,x') / P2(x,x'))` over the support of `P1`.
pub fn kl_divergence(p1: &Kernel, p2: &Kernel) -> Result<Divergence> {
    if p1.size() != p2.size() {
        return Err(Error::SupportMismatch(format!(
            "kernels on {} and {} states",
            p1.size(),
            p2.size()
        )));
    }
    if !p1.support().is_subset(p2.support()) {
        return Ok(Divergence::Infinite);
    }
    let pi = stationary_distribution(p1)?;
    let total: f64 = p1
        .support()
        .edges()
        .map(|(x, y)| {
            let a = p1.get(x, y);
            pi[x] * a * (a / p2.get(x, y)).ln()
        })
        .sum();
    Ok(Divergence::Finite(total.max(0.0)))
}

/// `P_m = (P + P*)/2`, supported on `E ∪ E*`.
pub fn m_projection(kernel: &Kernel) -> Result<Kernel> {
    let pi = stationary_distribution(kernel)?;
    let reversed = reversal_with(kernel, &pi);
    let support = kernel.support().union(reversed.support());
    let mean = (kernel.matrix() + reversed.matrix()) * 0.5;
    Kernel::assemble(mean, support)
}

/// `P_e = 𝔰(sqrt(P ∘ P*))`, supported on `E ∩ E*`.
pub fn e_projection(kernel: &Kernel) -> Result<Kernel> {
    let pi = stationary_distribution(kernel)?;
    let reversed = reversal_with(kernel, &pi);
    let support = kernel.support().intersection(reversed.support());
    if !support.is_strongly_connected() {
        return Err(Error::IntersectionNotConnected);
    }
    let m = kernel.size();
    let mean = DMatrix::from_fn(m, m, |x, y| {
        if support.contains(x, y) {
            (kernel.get(x, y) * reversed.get(x, y)).sqrt()
        } else {
            0.0
        }
    });
    stochastic_rescale(&PositiveEdgeFunction::new(mean)?)
}

/// Which projection a Pythagorean check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    M,
    E,
}

impl std::str::FromStr for ProjectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(ProjectionMode::M),
            "e" => Ok(ProjectionMode::E),
            other => Err(Error::Parse(format!("unknown projection mode '{other}'"))),
        }
    }
}

/// Projection of `kernel` in the given mode.
pub fn project(kernel: &Kernel, mode: ProjectionMode) -> Result<Kernel> {
    match mode {
        ProjectionMode::M => m_projection(kernel),
        ProjectionMode::E => e_projection(kernel),
    }
}

/// Defect of the Pythagorean identity for the reversible kernel `reference`:
///
/// * m: `D(P‖P̄) − D(P‖P_m) − D(P_m‖P̄)`, with `P̄` on `E ∪ E*`;
/// * e: `D(P̄‖P) − D(P̄‖P_e) − D(P_e‖P)`, with `P̄` on `E ∩ E*`.
pub fn pythagorean_residual(kernel: &Kernel, reference: &Kernel, mode: ProjectionMode) -> Result<f64> {
    let residual = balance_residual(reference)?;
    if residual > DEFAULT_TOL {
        return Err(Error::NotReversible(residual));
    }
    let projected = project(kernel, mode)?;
    if reference.support() != projected.support() {
        return Err(Error::SupportMismatch(
            "reference kernel must live on the projection's support".into(),
        ));
    }
    let d = |a: &Kernel, b: &Kernel, what: &str| kl_divergence(a, b)?.finite(what);
    Ok(match mode {
        ProjectionMode::M => {
            d(kernel, reference, "D(P‖P̄)")?
                - d(kernel, &projected, "D(P‖P_m)")?
                - d(&projected, reference, "D(P_m‖P̄)")?
        }
        ProjectionMode::E => {
            d(reference, kernel, "D(P̄‖P)")?
                - d(reference, &projected, "D(P̄‖P_e)")?
                - d(&projected, kernel, "D(P_e‖P)")?
        }
    })
}

/// `(|D(P‖P_m) − D(P*‖P_m)|, |D(P_e‖P) − D(P_e‖P*)|)`.
pub fn bisection_check(kernel: &Kernel) -> Result<(f64, f64)> {
    let pi = stationary_distribution(kernel)?;
    let reversed = reversal_with(kernel, &pi);
    let pm = m_projection(kernel)?;
    let pe = e_projection(kernel)?;
    let d = |a: &Kernel, b: &Kernel| kl_divergence(a, b)?.finite("bisection divergence");
    let m_gap = (d(kernel, &pm)? - d(&reversed, &pm)?).abs();
    let e_gap = (d(&pe, kernel)? - d(&pe, &reversed)?).abs();
    Ok((m_gap, e_gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::time_reversal;
    use crate::models::lazy_cycle;
    use approx::assert_abs_diff_eq;

    fn biased() -> Kernel {
        lazy_cycle(3, 0.0, 2f64.ln()).unwrap()
    }

    #[test]
    fn divergence_to_self_is_zero() {
        let p = biased();
        assert_eq!(kl_divergence(&p, &p).unwrap(), Divergence::Finite(0.0));
    }

    #[test]
    fn lazy_cycle_m_divergence() {
        let p = biased();
        let pm = m_projection(&p).unwrap();
        let expected = 4.0 / 7.0 * (8.0f64 / 5.0).ln() + 1.0 / 7.0 * (2.0f64 / 5.0).ln();
        let d = kl_divergence(&p, &pm).unwrap().value().unwrap();
        assert_abs_diff_eq!(d, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(d, 0.137675, epsilon = 1e-6);
    }

    #[test]
    fn missing_edge_gives_infinity() {
        let p1 = Kernel::uniform(4).unwrap();
        let p2 = lazy_cycle(4, 0.0, 0.5).unwrap();
        assert_eq!(kl_divergence(&p1, &p2).unwrap(), Divergence::Infinite);
        assert!(Divergence::Infinite > Divergence::Finite(1e300));
    }

    #[test]
    fn lazy_cycle_projections() {
        let p = biased();
        let pm = m_projection(&p).unwrap();
        let pe = e_projection(&p).unwrap();
        for x in 0..3 {
            assert_abs_diff_eq!(pm.get(x, x), 2.0 / 7.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pm.get(x, (x + 1) % 3), 5.0 / 14.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pm.get((x + 1) % 3, x), 5.0 / 14.0, epsilon = 1e-12);
            for y in 0..3 {
                assert_abs_diff_eq!(pe.get(x, y), 1.0 / 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reversible_kernels_are_fixed() {
        let p = Kernel::from_rows(&[vec![0.3, 0.7], vec![0.05, 0.95]]).unwrap();
        assert!(m_projection(&p).unwrap().max_abs_diff(&p) < 1e-12);
        assert!(e_projection(&p).unwrap().max_abs_diff(&p) < 1e-12);
        let (a, b) = bisection_check(&p).unwrap();
        assert!(a < 1e-15 && b < 1e-15);
    }

    #[test]
    fn one_way_cycle_has_no_e_projection() {
        let p = Kernel::from_rows(&[
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
        ])
        .unwrap();
        assert_eq!(e_projection(&p), Err(Error::IntersectionNotConnected));
        let pm = m_projection(&p).unwrap();
        assert!(pm.support().is_full());
    }

    #[test]
    fn pythagorean_with_uniform_reference() {
        let p = biased();
        let u = Kernel::uniform(3).unwrap();
        assert!(pythagorean_residual(&p, &u, ProjectionMode::M).unwrap().abs() <= 1e-10);
        assert!(pythagorean_residual(&p, &u, ProjectionMode::E).unwrap().abs() <= 1e-10);
        let err = pythagorean_residual(&u, &p, ProjectionMode::M);
        assert!(matches!(err, Err(Error::NotReversible(_))));
    }

    #[test]
    fn bisection_on_lazy_cycle() {
        let (a, b) = bisection_check(&biased()).unwrap();
        assert!(a <= 1e-12 && b <= 1e-12);
        let p = biased();
        let star = time_reversal(&p).unwrap();
        assert!(star.max_abs_diff(&lazy_cycle(3, 0.0, -(2f64.ln())).unwrap()) < 1e-12);
    }
}
