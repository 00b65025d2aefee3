//! Mobile-UAV planning: coverage radius, stop count and layout, minimum
//! transmit power and mission delay.

mod covering;
mod tour;

use serde::{Deserialize, Serialize};

use crate::analytic::{du_coverage_point_bounds, optimal_altitude, AltitudeObjective};
use crate::error::{Error, Result};
use crate::model::{SystemConfig, UserPosition};
use crate::quadrature::QuadratureSpec;

pub use covering::{
    certify_cover, covering_entry, covering_radius, layout_radius, stop_point_layout, table_ratio, CoveringEntry,
    Layout, CERTIFICATE_GRID, HEX_COVERING_DENSITY,
};
pub use tour::{open_tour, path_length};

/// Scan resolution of the coverage radius search, as a fraction of `r_cell`.
const RADIUS_SCAN_STEPS: usize = 1000;
const RADIUS_TOL: f64 = 0.1;
const POWER_REL_TOL: f64 = 1e-3;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::config("epsilon", format!("must lie in (0, 1), got {epsilon}")))
    }
}

/// Largest ground radius `R <= r_cell` such that the lower coverage bound
/// of a downlink user is at least `epsilon` everywhere within `R`.
pub fn uav_coverage_radius(cfg: &SystemConfig, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let f = |r: f64| du_coverage_point_bounds(cfg, &UserPosition::at_range(r)).map(|b| b.lower);
    if f(0.0)? < epsilon {
        return Err(Error::Infeasible(format!(
            "coverage target {epsilon} is not met even below the UAV"
        )));
    }
    let step = cfg.r_cell / RADIUS_SCAN_STEPS as f64;
    for i in 1..=RADIUS_SCAN_STEPS {
        let r = step * i as f64;
        if f(r)? < epsilon {
            let (mut lo, mut hi) = (r - step, r);
            while hi - lo > RADIUS_TOL {
                let mid = 0.5 * (lo + hi);
                if f(mid)? >= epsilon {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(lo);
        }
    }
    Ok(cfg.r_cell)
}

fn radius_or_zero(cfg: &SystemConfig, epsilon: f64) -> Result<f64> {
    match uav_coverage_radius(cfg, epsilon) {
        Ok(r) => Ok(r),
        Err(Error::Infeasible(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Smallest UAV power whose coverage radius reaches the radius of the
/// `m`-stop layout, to 0.1% in power. Never exceeds `cfg.p_uav`.
pub fn min_transmit_power(cfg: &SystemConfig, m: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let target = layout_radius(m, cfg.r_cell);
    let reach = |p: f64| -> Result<bool> {
        let c = SystemConfig { p_uav: p, ..*cfg };
        Ok(radius_or_zero(&c, epsilon)? >= target - RADIUS_TOL)
    };
    if !reach(cfg.p_uav)? {
        return Err(Error::Infeasible(format!(
            "{m} stops need coverage radius {target:.1} m, beyond reach at {} W",
            cfg.p_uav
        )));
    }
    let mut hi = cfg.p_uav;
    let mut lo = hi / 2.0;
    let mut halvings = 0;
    while reach(lo)? {
        hi = lo;
        lo /= 2.0;
        halvings += 1;
        if halvings > 200 {
            return Ok(hi);
        }
    }
    while hi / lo - 1.0 > POWER_REL_TOL {
        let mid = (lo * hi).sqrt();
        if reach(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessMode {
    Tdma,
    Fdma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub travel_time: f64,
    pub residence_total: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionParams {
    /// Service time per user for TDMA, or per stop for FDMA.
    pub t_service: f64,
    pub speed: f64,
    pub access: AccessMode,
}

impl Default for MissionParams {
    fn default() -> Self {
        MissionParams {
            t_service: 20.0,
            speed: 10.0,
            access: AccessMode::Fdma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltitudeChoice {
    /// Use `cfg.altitude`.
    Fixed,
    /// Altitude maximizing the coverage radius at the plan's target.
    MaxCoverageRadius,
    /// Altitude maximizing the averaged downlink coverage.
    MaxDuCoverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub altitude: AltitudeChoice,
    pub altitude_range: (f64, f64),
    pub mission: MissionParams,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            altitude: AltitudeChoice::MaxCoverageRadius,
            altitude_range: (50.0, 2000.0),
            mission: MissionParams::default(),
        }
    }
}

impl PlanOptions {
    pub fn fixed_altitude() -> Self {
        PlanOptions {
            altitude: AltitudeChoice::Fixed,
            ..PlanOptions::default()
        }
    }

    /// Planning altitude for target `epsilon`.
    pub fn resolve_altitude(&self, cfg: &SystemConfig, epsilon: f64) -> Result<f64> {
        let quad = QuadratureSpec::default();
        match self.altitude {
            AltitudeChoice::Fixed => Ok(cfg.altitude),
            AltitudeChoice::MaxCoverageRadius => optimal_altitude(
                cfg,
                AltitudeObjective::CoverageRadius { epsilon },
                self.altitude_range,
                &quad,
            ),
            AltitudeChoice::MaxDuCoverage => {
                optimal_altitude(cfg, AltitudeObjective::DuCoverage, self.altitude_range, &quad)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopPlan {
    pub m: usize,
    /// Stop positions in visiting order.
    pub positions: Vec<[f64; 2]>,
    pub disk_radius: f64,
    pub p_uav_min: f64,
    pub delay: DelayBreakdown,
    pub epsilon: f64,
    pub altitude: f64,
    /// UAV coverage radius at full power.
    pub coverage_radius: f64,
}

/// Smallest `m` whose layout radius does not exceed `radius`.
pub fn stops_for_radius(radius: f64, r_cell: f64) -> usize {
    // No lattice layout beats the asymptotic hexagonal radius, so counts
    // below that bound can be skipped.
    let ratio = radius / r_cell;
    let bound = (HEX_COVERING_DENSITY / (ratio * ratio)).floor();
    let mut m = if ratio < covering_radius(12, 1.0) && bound.is_finite() {
        (bound as usize).max(13)
    } else {
        1
    };
    while layout_radius(m, r_cell) > radius + 1e-9 * r_cell {
        m += 1;
    }
    m
}

/// Fewest stop points covering the cell at target `epsilon`, with layout,
/// minimized power and mission delay.
pub fn min_stop_points(cfg: &SystemConfig, epsilon: f64, opts: &PlanOptions) -> Result<StopPlan> {
    cfg.validate()?;
    check_epsilon(epsilon)?;
    let altitude = opts.resolve_altitude(cfg, epsilon)?;
    let at = cfg.with_altitude(altitude);
    let radius = uav_coverage_radius(&at, epsilon)?;
    if radius <= 0.0 {
        return Err(Error::Infeasible(format!("coverage radius is zero at target {epsilon}")));
    }
    let m = stops_for_radius(radius, cfg.r_cell);
    let layout = stop_point_layout(m, cfg.r_cell)?;
    let p_uav_min = min_transmit_power(&at, m, epsilon)?;
    let order = open_tour(&layout.positions);
    let positions: Vec<[f64; 2]> = order.iter().map(|&i| layout.positions[i]).collect();
    let mut plan = StopPlan {
        m: positions.len(),
        positions,
        disk_radius: layout.radius,
        p_uav_min,
        delay: DelayBreakdown {
            travel_time: 0.0,
            residence_total: 0.0,
            total: 0.0,
        },
        epsilon,
        altitude,
        coverage_radius: radius,
    };
    let mp = opts.mission;
    plan.delay = mission_delay(cfg, &plan, mp.t_service, mp.speed, mp.access)?;
    Ok(plan)
}

/// Travel plus residence time of a plan. Travel follows the open tour in
/// the plan's stop order after 2-opt.
pub fn mission_delay(
    cfg: &SystemConfig,
    plan: &StopPlan,
    t_service_per_user: f64,
    speed: f64,
    access: AccessMode,
) -> Result<DelayBreakdown> {
    if !(speed > 0.0) {
        return Err(Error::config("speed", "must be positive"));
    }
    let order = open_tour(&plan.positions);
    let travel_time = path_length(&plan.positions, &order) / speed;
    let per_stop = match access {
        AccessMode::Fdma => t_service_per_user,
        AccessMode::Tdma => {
            let users = cfg.lambda_du * std::f64::consts::PI * cfg.r_cell * cfg.r_cell;
            t_service_per_user * (plan.disk_radius / cfg.r_cell).powi(2) * users
        }
    };
    let residence_total = plan.m as f64 * per_stop;
    Ok(DelayBreakdown {
        travel_time,
        residence_total,
        total: travel_time + residence_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub epsilon: f64,
    pub m: Option<usize>,
    pub disk_radius: Option<f64>,
    pub delay: Option<DelayBreakdown>,
    /// Why the target is infeasible, when it is.
    pub infeasible: Option<String>,
}

/// Stop count and delay for each coverage target.
pub fn coverage_delay_tradeoff(cfg: &SystemConfig, epsilon_grid: &[f64], opts: &PlanOptions) -> Result<Vec<TradeoffRow>> {
    epsilon_grid
        .iter()
        .map(|&epsilon| match min_stop_points(cfg, epsilon, opts) {
            Ok(p) => Ok(TradeoffRow {
                epsilon,
                m: Some(p.m),
                disk_radius: Some(p.disk_radius),
                delay: Some(p.delay),
                infeasible: None,
            }),
            Err(Error::Infeasible(why)) => Ok(TradeoffRow {
                epsilon,
                m: None,
                disk_radius: None,
                delay: None,
                infeasible: Some(why),
            }),
            Err(e) => Err(e),
        })
        .collect()
}
