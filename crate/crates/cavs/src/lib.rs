//! Adaptive L_gamma location and regression estimation.
//!
//! The core idea: fit the L_gamma center for every power on a candidate grid,
//! estimate each fit's asymptotic variance, keep only powers whose confidence
//! intervals stay mutually consistent, and select the admitted power with the
//! smallest variance estimate. Light-tailed noise earns large powers (up to
//! the midrange at infinity); heavy or Gaussian-like noise falls back to the
//! mean.

pub mod avar;
pub mod baselines;
pub mod dist;
pub mod error;
pub mod harness;
pub mod parallel;
pub mod power;
pub mod quadrature;
pub mod regress;
pub mod sample;
pub mod selector;
pub mod solver;
pub mod special;

pub use avar::{vhat, VhatValue};
pub use dist::DistributionSpec;
pub use error::{Error, Result};
pub use power::{CandidateGrid, Power};
pub use regress::{cavs_regress, DesignMatrix, RegressionResult};
pub use sample::Sample;
pub use selector::{cavs_estimate, CavsConfig, CavsResult, TauPolicy};
pub use solver::{lgamma_center, midrange, SolverConfig};
