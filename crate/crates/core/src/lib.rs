//! Information geometry of finite irreducible Markov kernels.
//!
//! The crate covers validation of kernels and edge measures, Perron-Frobenius
//! data and stochastic rescaling, three reversibility tests, exponential
//! tilting and geodesics, the natural and expectation charts of the
//! reversible family, the m- and e-projections onto it, and membership tests
//! and rank experiments for related families.

pub mod error;
pub mod families;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod models;
pub mod perron;
pub mod projections;
pub mod reversibility;
pub mod sampling;
pub mod support;

pub use error::{Error, Result};
pub use families::{FamilyTag, SimplexPoint, family_membership};
pub use geometry::{ExpectationCoords, NaturalCoords};
pub use kernel::{
    Distribution, EdgeMeasure, Kernel, edge_measure, stationary_distribution, time_reversal,
    validate_kernel,
};
pub use perron::{PFData, PositiveEdgeFunction, pf_data, stochastic_rescale};
pub use projections::{Divergence, ProjectionMode, e_projection, kl_divergence, m_projection};
pub use reversibility::{EFamilySpec, EdgeFunction};
pub use support::EdgeSet;
