//! Reflected-diffusion simulator and inequality verifier for manifolds
//! with non-convex boundary.
//!
//! The crate is organised around a pipeline: a geometric model of the
//! domain (`geometry`), a conformal change of metric taming the boundary
//! (`phi`), a reflected Euler scheme with local time and damped parallel
//! transport (`sde`), coupled and tilted path constructions (`coupling`),
//! Monte Carlo functionals with standard errors (`estimators`), and the
//! inequality checks themselves (`verify`), driven by TOML scenario
//! configs (`config`) and emitting CSV/SVG artifacts (`report`).

pub mod error;
pub mod linalg;
pub mod rng;
pub mod geometry;
pub mod phi;
pub mod sde;
pub mod estimators;
pub mod coupling;
pub mod verify;
pub mod config;

pub use error::{CoreError, Result};
pub use geometry::{ConformalFactor, Drift, Family, ManifoldModel, MetricTag};
pub use phi::{Construction, CurvatureConstants, PhiProfile};
