//! Direction-of-arrival estimation for uniform linear arrays.
//!
//! The main estimator ([`wlslp::estimate_doa_wlslp`]) maps the sample
//! covariance to a real symmetric matrix with a unitary transform, takes the
//! signal subspace from its eigendecomposition, and recovers the linear
//! prediction polynomial of the array manifold by iterated weighted least
//! squares. Root-MUSIC, unitary ESPRIT and the stochastic Cramér–Rao bound
//! are provided as references, and [`harness`] runs Monte-Carlo RMSE sweeps.
//!
//! Angles are in degrees at every public boundary.

// `!(x < y)` is used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod poly;
pub mod rng;
pub mod subspace;
pub mod unitary;
pub mod warning;
pub mod wlslp;

mod linalg;

pub use array::{HermitianCovariance, SnapshotMatrix, SourceScenario, UlaGeometry};
pub use error::{DoaError, Result};
pub use warning::Warning;
pub use wlslp::DoaEstimate;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dynamically sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dynamically sized real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
