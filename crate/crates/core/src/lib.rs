//! Finite-scale machinery for median geometry and lattice actions.
//!
//! The crate is split along the objects it manipulates:
//!
//! - [`median`]: finite median algebras, intervals, convexity, walls, rank and
//!   free median algebras built inside Boolean powers.
//! - [`metric`]: graphs and finite metric spaces, metric intervals, median
//!   graph recognition, l1 products and four-point hyperbolicity.
//! - [`coarse`]: the min-sum coarse median on a graph together with measured
//!   constants for the Lipschitz and finite-approximation conditions.
//! - [`induction`]: finite groups, lattices and transversals, the cocycle,
//!   the induced L1 function space and its action.
//! - [`walks`]: simple random walks, orbit-return discretization, drift
//!   estimation, return-time checks, translation lengths and quasi-actions.
//! - [`raag`]: stars, links, admissible orders and the SL-dimension of a
//!   defining graph.
//! - [`acceptance`]: the desk-scale acceptance checks, shared by the test
//!   suite and the command-line `check-all` runner.

pub mod acceptance;
pub mod coarse;
pub mod corpus;
mod error;
pub mod induction;
pub mod median;
pub mod metric;
pub mod raag;
pub mod rng;
pub mod walks;

pub use error::{Error, Result};

/// Absolute tolerance for comparisons between non-integer distances.
pub const EPS: f64 = 1e-9;
