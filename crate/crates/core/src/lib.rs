//! Uncertainty of variance-partitioning estimates.
//!
//! The crate bundles four pieces:
//!
//! - [`ordination`]: RDA and CCA variance partitioning of community tables
//! - [`synth`]: a Gaussian-niche simulator for site-by-species tables
//! - [`resample`]: bootstrap across sites with uncertainty summaries
//! - [`experiments`]: replicated scenarios, parameter sweeps and
//!   bootstrap-vs-observed validation studies
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiation.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod matrix;
pub mod ordination;
pub mod resample;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use ordination::Method;
pub use scalar::Scalar;

pub type Matrix64 = matrix::Matrix<f64>;
pub type Matrix32 = matrix::Matrix<f32>;
pub type CommunityTable64 = ordination::CommunityTable<f64>;
pub type CommunityTable32 = ordination::CommunityTable<f32>;
pub type PredictorBlock64 = ordination::PredictorBlock<f64>;
pub type PredictorBlock32 = ordination::PredictorBlock<f32>;
pub type PartitionResult64 = ordination::PartitionResult<f64>;
pub type PartitionResult32 = ordination::PartitionResult<f32>;
pub type BootstrapSummary64 = resample::BootstrapSummary<f64>;
pub type BootstrapSummary32 = resample::BootstrapSummary<f32>;
