//! Closed-form and semi-analytic coverage, rate and outage expressions.

mod altitude;
mod d2d;
mod du;
mod outage;
mod rates;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use altitude::{optimal_altitude, AltitudeObjective};
pub use d2d::{d2d_coverage_avg, d2d_coverage_no_uav, d2d_coverage_point, uav_interference_factor};
pub use du::{du_coverage_avg_bounds, du_coverage_no_d2d, du_coverage_point_bounds, interference_cdf_bounds};
pub use outage::{d2d_outage_multislot, multislot_interference_integral};
pub use rates::{avg_rates, sum_rate};

/// A probability known only up to a lower and an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedProbability {
    pub lower: f64,
    pub upper: f64,
}

impl BoundedProbability {
    pub const ZERO: BoundedProbability = BoundedProbability { lower: 0.0, upper: 0.0 };
    pub const ONE: BoundedProbability = BoundedProbability { lower: 1.0, upper: 1.0 };

    /// Builds a pair, absorbing rounding spill outside `[0, 1]`.
    pub fn new(lower: f64, upper: f64) -> Self {
        let upper = upper.clamp(0.0, 1.0);
        let lower = lower.clamp(0.0, upper);
        BoundedProbability { lower, upper }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: f64, slack: f64) -> bool {
        p >= self.lower - slack && p <= self.upper + slack
    }
}

/// Ground positions the UAV visits, one transmission slot per stop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopPointSchedule {
    pub positions: Vec<[f64; 2]>,
    pub altitude: f64,
}

impl StopPointSchedule {
    pub fn new(positions: Vec<[f64; 2]>, altitude: f64, r_cell: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::config("schedule", "needs at least one stop"));
        }
        if !(altitude > 0.0) {
            return Err(Error::config("altitude", "must be positive"));
        }
        let slack = 1e-9 * r_cell;
        if let Some(p) = positions.iter().find(|p| p[0].hypot(p[1]) > r_cell + slack) {
            return Err(Error::config(
                "schedule",
                format!("stop ({:.3}, {:.3}) lies outside the cell", p[0], p[1]),
            ));
        }
        Ok(StopPointSchedule { positions, altitude })
    }

    /// The same stop repeated `m` times, e.g. a hovering UAV.
    pub fn repeated(position: [f64; 2], m: usize, altitude: f64) -> Self {
        StopPointSchedule {
            positions: vec![position; m.max(1)],
            altitude,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Ground distance from `xy` to stop `i`.
    pub fn ground_range(&self, i: usize, xy: [f64; 2]) -> f64 {
        let p = self.positions[i];
        (xy[0] - p[0]).hypot(xy[1] - p[1])
    }
}
