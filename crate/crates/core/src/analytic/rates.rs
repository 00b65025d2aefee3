use std::f64::consts::PI;

use super::{d2d_coverage_avg, du_coverage_avg_bounds};
use crate::error::Result;
use crate::model::SystemConfig;
use crate::quadrature::QuadratureSpec;

/// Average rates `(downlink, d2d)` in bits/s. The downlink rate uses the
/// midpoint of the coverage bounds.
pub fn avg_rates(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let c = cfg.rate_at_threshold();
    let du = du_coverage_avg_bounds(cfg, quad)?.midpoint();
    let d2d = d2d_coverage_avg(cfg, quad)?;
    Ok((c * du, c * d2d))
}

/// Sum rate of all downlink users and D2D pairs in the cell.
pub fn sum_rate(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<f64> {
    let area = PI * cfg.r_cell * cfg.r_cell;
    let c = cfg.rate_at_threshold();
    let mut users = 0.0;
    if cfg.lambda_du > 0.0 {
        users += cfg.lambda_du * du_coverage_avg_bounds(cfg, quad)?.midpoint();
    }
    if cfg.lambda_d > 0.0 {
        users += cfg.lambda_d * d2d_coverage_avg(cfg, quad)?;
    }
    Ok(area * users * c)
}
