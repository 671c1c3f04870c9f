//! Light rays around a rotating black hole: null geodesics of the Kerr
//! metric, their classification by first integrals, the shadow boundary seen
//! by a stationary observer, and backward ray-traced images.

pub mod bifurcation;
pub mod cli;
pub mod config;
pub mod error;
pub mod geodesic;
pub mod kerr;
pub mod observer;
pub mod raytracer;
pub mod shadow;

pub use error::{KerrError, Result};
pub use kerr::{horizon_radius, metric_scalars, to_cartesian, BLPoint, KerrParams, MetricScalars};
