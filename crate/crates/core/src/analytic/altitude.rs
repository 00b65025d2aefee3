use serde::{Deserialize, Serialize};

use super::{du_coverage_avg_bounds, sum_rate};
use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::planner::uav_coverage_radius;
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltitudeObjective {
    /// Midpoint of the cell-averaged downlink coverage bounds.
    DuCoverage,
    SumRate,
    /// Per-point coverage radius at target `epsilon`; infeasible altitudes
    /// score zero.
    CoverageRadius { epsilon: f64 },
}

impl AltitudeObjective {
    pub fn evaluate(&self, cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<f64> {
        match *self {
            AltitudeObjective::DuCoverage => Ok(du_coverage_avg_bounds(cfg, quad)?.midpoint()),
            AltitudeObjective::SumRate => sum_rate(cfg, quad),
            AltitudeObjective::CoverageRadius { epsilon } => match uav_coverage_radius(cfg, epsilon) {
                Ok(r) => Ok(r),
                Err(Error::Infeasible(_)) => Ok(0.0),
                Err(e) => Err(e),
            },
        }
    }
}

const GRID_POINTS: usize = 41;
const GOLDEN_ITERATIONS: usize = 40;

/// Altitude in `h_range` maximizing `objective`: a uniform grid scan
/// followed by golden-section refinement around the best grid point.
/// Ties resolve to the lowest altitude.
pub fn optimal_altitude(
    cfg: &SystemConfig,
    objective: AltitudeObjective,
    h_range: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi) = h_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::config("h_range", format!("invalid altitude interval [{lo}, {hi}]")));
    }
    let f = |h: f64| objective.evaluate(&cfg.with_altitude(h), quad);
    if hi == lo {
        return Ok(lo);
    }

    let mut seen: Vec<(f64, f64)> = Vec::with_capacity(GRID_POINTS + 2 * GOLDEN_ITERATIONS);
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    for i in 0..GRID_POINTS {
        let h = if i == GRID_POINTS - 1 { hi } else { lo + step * i as f64 };
        seen.push((h, f(h)?));
    }
    let best = best_of(&seen);
    let (mut a, mut b) = ((seen[best].0 - step).max(lo), (seen[best].0 + step).min(hi));

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    seen.push((x1, f1));
    seen.push((x2, f2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
            seen.push((x1, f1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
            seen.push((x2, f2));
        }
    }
    Ok(seen[best_of(&seen)].0)
}

fn best_of(seen: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, &(h, v)) in seen.iter().enumerate() {
        let (bh, bv) = seen[best];
        if v > bv || (v == bv && h < bh) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_objective_picks_lowest_altitude() {
        let seen = [(300.0, 1.0), (100.0, 1.0), (200.0, 1.0)];
        assert_eq!(seen[best_of(&seen)].0, 100.0);
    }

    #[test]
    fn returned_altitude_beats_endpoints() {
        let q = QuadratureSpec::default();
        let cfg = SystemConfig::default();
        let obj = AltitudeObjective::DuCoverage;
        let h = optimal_altitude(&cfg, obj, (100.0, 2000.0), &q).unwrap();
        let at = |h: f64| obj.evaluate(&cfg.with_altitude(h), &q).unwrap();
        assert!(at(h) >= at(100.0) && at(h) >= at(2000.0));
    }

    #[test]
    fn sum_rate_argmax_ignores_bandwidth_scale() {
        let q = QuadratureSpec::default();
        let cfg = SystemConfig::default();
        let wide = SystemConfig {
            bandwidth: cfg.bandwidth * 8.0,
            ..cfg
        };
        let a = optimal_altitude(&cfg, AltitudeObjective::SumRate, (100.0, 2000.0), &q).unwrap();
        let b = optimal_altitude(&wide, AltitudeObjective::SumRate, (100.0, 2000.0), &q).unwrap();
        assert_eq!(a, b);
    }
}
