//! Coverage, rate, outage and deployment planning for a UAV base station
//! sharing spectrum with an underlaid D2D network.
//!
//! The [`analytic`] module evaluates the closed forms and bounds,
//! [`montecarlo`] estimates the same quantities by simulation, and
//! [`planner`] turns a coverage target into stop points, power and delay.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod planner;
pub mod quadrature;
pub mod sweep;
pub mod validation;

pub use analytic::{BoundedProbability, StopPointSchedule};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use model::{Environment, LinkGeometry, SystemConfig, UserPosition};
pub use montecarlo::{EstimateWithCI, TrialPlan};
pub use planner::{AccessMode, DelayBreakdown, PlanOptions, StopPlan};
pub use quadrature::QuadratureSpec;
pub use sweep::{Metric, RunRecord, SweepSpec, SweepVariable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
