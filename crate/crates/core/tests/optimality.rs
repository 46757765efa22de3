//! The projections minimize divergence over dense random samples of the
//! reversible family, and the samplers span families of the right dimension.

use markov_infogeom::geometry::{ExpectationCoords, kernel_from_expectation, reversible_basis};
use markov_infogeom::kernel::Kernel;
use markov_infogeom::linalg::{RANK_TOL, numerical_rank, quotient_rank};
use markov_infogeom::projections::{e_projection, kl_divergence, m_projection};
use markov_infogeom::sampling::{
    random_bistochastic, random_kernel, random_memoryless, random_reversible, random_symmetric,
    seeded,
};
use markov_infogeom::support::EdgeSet;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Reversible kernel from a flat Dirichlet(1) draw of the edge measure,
/// entered through the expectation chart.
fn dirichlet_reversible(m: usize, rng: &mut ChaCha8Rng) -> Kernel {
    let e = EdgeSet::full(m);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let w: Vec<f64> = pairs
        .iter()
        .map(|_| -rng.random_range(f64::MIN_POSITIVE..1.0).ln())
        .collect();
    let total: f64 = w.iter().sum();
    // the flat weight of a pair is Q(i,i) on the diagonal and Q(i,j) + Q(j,i) off it
    let eta: Vec<f64> = e
        .chart_index()
        .unwrap()
        .iter()
        .map(|ij| {
            let k = pairs.iter().position(|p| p == ij).unwrap();
            let v = w[k] / total;
            if ij.0 == ij.1 { 2.0 * v } else { v }
        })
        .collect();
    kernel_from_expectation(&ExpectationCoords::new(e, eta).unwrap()).unwrap()
}

#[test]
fn projections_beat_every_sampled_reversible_kernel() {
    let mut rng = seeded(2024);
    for trial in 0..6 {
        let m = 3 + trial % 2;
        let p = random_kernel(m, &mut rng).unwrap();
        let pm = m_projection(&p).unwrap();
        let pe = e_projection(&p).unwrap();
        let best_m = kl_divergence(&p, &pm).unwrap().value().unwrap();
        let best_e = kl_divergence(&pe, &p).unwrap().value().unwrap();
        for _ in 0..2000 {
            let r = dirichlet_reversible(m, &mut rng);
            assert!(kl_divergence(&p, &r).unwrap().value().unwrap() >= best_m - 1e-12);
            assert!(kl_divergence(&r, &p).unwrap().value().unwrap() >= best_e - 1e-12);
        }
    }
}

#[test]
fn dirichlet_samples_are_reversible() {
    let mut rng = seeded(1);
    for _ in 0..50 {
        let r = dirichlet_reversible(4, &mut rng);
        assert!(markov_infogeom::reversibility::balance_residual(&r).unwrap() < 1e-12);
    }
}

/// Dimension of the affine hull of `n` sampled kernels.
fn affine_rank(samples: &[Kernel]) -> usize {
    let base = samples[0].matrix();
    let m = base.nrows();
    let rows: Vec<Vec<f64>> = samples[1..]
        .iter()
        .map(|k| (k.matrix() - base).iter().copied().collect())
        .collect();
    numerical_rank(&DMatrix::from_fn(rows.len(), m * m, |r, c| rows[r][c]), RANK_TOL)
}

#[test]
fn sampled_families_have_the_expected_dimension() {
    let mut rng = seeded(9);
    let m = 3;
    let draw = |f: &dyn Fn(&mut ChaCha8Rng) -> Kernel, rng: &mut ChaCha8Rng| -> Vec<Kernel> {
        (0..30).map(|_| f(rng)).collect()
    };
    let bis = draw(&|r| random_bistochastic(m, r).unwrap(), &mut rng);
    let sym = draw(&|r| random_symmetric(m, r).unwrap(), &mut rng);
    let iid = draw(&|r| random_memoryless(m, r).unwrap(), &mut rng);
    assert_eq!(affine_rank(&bis), (m - 1) * (m - 1));
    assert_eq!(affine_rank(&sym), m * (m - 1) / 2);
    assert_eq!(affine_rank(&iid), m - 1);
}

#[test]
fn log_tangent_ranks_modulo_shifts() {
    let mut rng = seeded(4);
    let e = EdgeSet::full(3);
    let logs = |ks: Vec<Kernel>| -> Vec<DMatrix<f64>> {
        let base = ks[0].matrix().map(f64::ln);
        ks[1..].iter().map(|k| k.matrix().map(f64::ln) - &base).collect()
    };
    let rev: Vec<Kernel> = (0..30).map(|_| random_reversible(3, &mut rng).unwrap()).collect();
    let iid: Vec<Kernel> = (0..30).map(|_| random_memoryless(3, &mut rng).unwrap()).collect();
    let all: Vec<Kernel> = (0..30).map(|_| random_kernel(3, &mut rng).unwrap()).collect();
    assert_eq!(quotient_rank(&logs(rev), &e), 5);
    let basis: Vec<DMatrix<f64>> =
        reversible_basis(&e).unwrap().iter().map(|g| g.matrix().clone()).collect();
    assert_eq!(quotient_rank(&basis, &e), 5);
    assert_eq!(quotient_rank(&logs(iid), &e), 2);
    assert_eq!(quotient_rank(&logs(all), &e), 6);
}
