use std::f64::consts::PI;

use super::d2d::uav_interference_factor;
use super::StopPointSchedule;
use crate::error::{Error, Result};
use crate::model::{SystemConfig, UserPosition};
use crate::quadrature::{integrate_pieces, QuadratureSpec};

/// Upper end of the numerically integrated range, in normalized units.
const TAIL_START: f64 = 1e4;

/// `2 pi * integral_0^inf [1 - (1 + v^-alpha)^-m] v dv`.
///
/// The range beyond `TAIL_START` is replaced by the first two terms of the
/// integrand's expansion in `v^-alpha`; the remainder is below 1e-30.
pub fn multislot_interference_integral(alpha: f64, m: usize, quad: &QuadratureSpec) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::DivergentInterference { alpha_d: alpha });
    }
    if m == 0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    let f = |v: f64| {
        if v == 0.0 {
            return 0.0;
        }
        -(-mf * v.powf(-alpha).ln_1p()).exp_m1() * 2.0 * PI * v
    };
    let mut pts = vec![0.0, 0.5, 1.0, 2.0];
    let mut v = 2.0;
    while v < TAIL_START {
        v = (v * 4.0).min(TAIL_START);
        pts.push(v);
    }
    let body = integrate_pieces(&f, &pts, quad)?;
    let t = TAIL_START;
    let first = 2.0 * PI * mf * t.powf(2.0 - alpha) / (alpha - 2.0);
    let second = -2.0 * PI * mf * (mf + 1.0) / 2.0 * t.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0);
    Ok(body + first + second)
}

/// Probability that at least one of the scheduled transmissions fails when
/// the interferer positions are common to every slot.
pub fn d2d_outage_multislot(
    cfg: &SystemConfig,
    schedule: &StopPointSchedule,
    pos: &UserPosition,
    quad: &QuadratureSpec,
) -> Result<f64> {
    cfg.require_convergent()?;
    if schedule.is_empty() {
        return Err(Error::config("schedule", "needs at least one stop"));
    }
    let m = schedule.len();
    let a = cfg.alpha_d;
    let scale = (cfg.beta * cfg.d0.powf(a)).powf(2.0 / a);
    let field = cfg.lambda_d * scale * multislot_interference_integral(a, m, quad)?;
    let noise = cfg.beta * cfg.d0.powf(a) * m as f64 * cfg.noise / (cfg.k_loss * cfg.p_d2d);
    let at = SystemConfig {
        altitude: schedule.altitude,
        ..*cfg
    };
    let xy = pos.xy();
    let mut success = (-field - noise).exp();
    for i in 0..m {
        success *= uav_interference_factor(&at, schedule.ground_range(i, xy))?;
    }
    Ok((1.0 - success).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::d2d_coverage_point;
    use statrs::function::gamma::gamma;

    /// Closed form via the Beta integral: pi Gamma(1 - d) Gamma(m + d) / Gamma(m)
    /// with d = 2 / alpha.
    fn closed_form(alpha: f64, m: usize) -> f64 {
        let d = 2.0 / alpha;
        PI * gamma(1.0 - d) * gamma(m as f64 + d) / gamma(m as f64)
    }

    #[test]
    fn integral_matches_beta_function_form() {
        let q = QuadratureSpec::default();
        for alpha in [2.5, 3.0, 4.0] {
            for m in [1, 2, 3, 7, 10] {
                let v = multislot_interference_integral(alpha, m, &q).unwrap();
                let c = closed_form(alpha, m);
                assert!(((v - c) / c).abs() < 1e-9, "alpha {alpha} m {m}: {v} vs {c}");
            }
        }
    }

    #[test]
    fn single_slot_equals_point_coverage_complement() {
        let q = QuadratureSpec::default();
        let cfg = SystemConfig::default();
        for r in [0.0, 150.0, 400.0, 900.0] {
            let pos = UserPosition::at_range(r);
            let sched = StopPointSchedule::repeated([0.0, 0.0], 1, cfg.altitude);
            let out = d2d_outage_multislot(&cfg, &sched, &pos, &q).unwrap();
            let cov = d2d_coverage_point(&cfg, &pos).unwrap();
            assert!((out - (1.0 - cov)).abs() < 1e-8, "{out} vs {}", 1.0 - cov);
        }
    }

    #[test]
    fn outage_tends_to_one() {
        let q = QuadratureSpec::default();
        let cfg = SystemConfig::default();
        let pos = UserPosition::at_range(1000.0);
        let sched = StopPointSchedule::repeated([0.0, 0.0], 400, cfg.altitude);
        assert!(d2d_outage_multislot(&cfg, &sched, &pos, &q).unwrap() > 0.999);
    }
}
