use std::f64::consts::PI;

use crate::error::Result;
use crate::model::{los_probability_at_elevation, LinkGeometry, SystemConfig, UserPosition};
use crate::quadrature::{integrate, QuadratureSpec};

/// Exponent of the D2D-only coverage factor: interferer field plus noise.
fn d2d_exponent(cfg: &SystemConfig) -> f64 {
    let a = cfg.alpha_d;
    let field = 2.0 * PI * PI * cfg.lambda_d * cfg.beta.powf(2.0 / a) * cfg.d0 * cfg.d0 / (a * (2.0 * PI / a).sin());
    let noise = cfg.beta * cfg.d0.powf(a) * cfg.noise / (cfg.k_loss * cfg.p_d2d);
    field + noise
}

/// Coverage of a D2D link with the UAV switched off.
pub fn d2d_coverage_no_uav(cfg: &SystemConfig) -> Result<f64> {
    cfg.require_convergent()?;
    Ok((-d2d_exponent(cfg)).exp())
}

/// Laplace factor of the UAV interference seen by a D2D receiver at ground
/// range `ground_range` from the UAV, averaged over the LoS state.
pub fn uav_interference_factor(cfg: &SystemConfig, ground_range: f64) -> Result<f64> {
    let g = LinkGeometry::new(cfg.altitude, ground_range)?;
    let p_los = los_probability_at_elevation(g.elevation_deg, &cfg.env);
    let s = cfg.beta * cfg.d0.powf(cfg.alpha_d) * cfg.p_uav * g.slant_range.powf(-cfg.alpha_u) / cfg.p_d2d;
    Ok(p_los * (-s).exp() + (1.0 - p_los) * (-s * cfg.env.eta_nlos).exp())
}

/// Coverage probability of a D2D receiver at `pos` under Rayleigh fading,
/// PPP interferers and one UAV.
pub fn d2d_coverage_point(cfg: &SystemConfig, pos: &UserPosition) -> Result<f64> {
    let base = d2d_coverage_no_uav(cfg)?;
    Ok(base * uav_interference_factor(cfg, pos.r)?)
}

/// Cell-averaged D2D coverage with receivers uniform over the cell disk.
pub fn d2d_coverage_avg(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<f64> {
    let base = d2d_coverage_no_uav(cfg)?;
    if cfg.p_uav == 0.0 {
        return Ok(base);
    }
    let rc2 = cfg.r_cell * cfg.r_cell;
    let failure = std::cell::RefCell::new(None);
    let avg = integrate(
        |r| match uav_interference_factor(cfg, r) {
            Ok(v) => v * 2.0 * r / rc2,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        cfg.r_cell,
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((base * avg?).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    /// Independent route: the probability generating functional of the
    /// Rayleigh-faded field, integrated with a plain log-spaced trapezoid rule.
    fn pgfl_oracle(cfg: &SystemConfig) -> f64 {
        let b = cfg.beta * cfg.d0.powf(cfg.alpha_d);
        let n = 400_000;
        let (lo, hi) = (1e-6f64.ln(), 1e9f64.ln());
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let u = (lo + h * i as f64).exp();
            let f = b / (b + u.powf(cfg.alpha_d)) * 2.0 * PI * u * u;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * f * h;
        }
        let noise = cfg.beta * cfg.d0.powf(cfg.alpha_d) * cfg.noise / (cfg.k_loss * cfg.p_d2d);
        (-cfg.lambda_d * acc - noise).exp()
    }

    #[test]
    fn no_uav_matches_pgfl_oracle() {
        for &(lambda, beta) in &[(1e-4, 3.1622776601683795), (4e-4, 10.0), (2.5e-5, 1.0)] {
            let c = cfg().with_lambda_d(lambda).with_beta(beta);
            let v = d2d_coverage_no_uav(&c).unwrap();
            let o = pgfl_oracle(&c);
            assert!((v - o).abs() < 1e-7, "{v} vs {o}");
        }
    }

    #[test]
    fn no_uav_hand_value() {
        // exp(-2 pi^2 1e-4 beta^(2/3) 400 / (3 sin(2pi/3))) with beta = 5 dB.
        let v = d2d_coverage_no_uav(&cfg()).unwrap();
        assert!((v - 0.5196).abs() < 2e-4, "{v}");
        let c = SystemConfig {
            lambda_d: 0.0,
            noise: 0.0,
            ..cfg()
        };
        assert_eq!(d2d_coverage_no_uav(&c).unwrap(), 1.0);
    }

    #[test]
    fn point_limits() {
        let pos = UserPosition::at_range(0.0);
        assert!(d2d_coverage_point(&cfg().with_beta(1e-12), &pos).unwrap() > 1.0 - 1e-6);
        assert!(d2d_coverage_point(&cfg().with_lambda_d(1.0), &pos).unwrap() < 1e-12);
        let high = cfg().with_altitude(1e9);
        let v = d2d_coverage_point(&high, &pos).unwrap();
        assert!((v - d2d_coverage_no_uav(&high).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn divergent_exponent_is_rejected() {
        let c = SystemConfig { alpha_d: 2.0, ..cfg() };
        assert!(matches!(
            d2d_coverage_point(&c, &UserPosition::at_range(10.0)),
            Err(Error::DivergentInterference { .. })
        ));
    }

    #[test]
    fn average_without_uav_equals_the_closed_form() {
        let q = QuadratureSpec::default();
        let c = SystemConfig { p_uav: 0.0, ..cfg() };
        assert_eq!(d2d_coverage_avg(&c, &q).unwrap(), d2d_coverage_no_uav(&c).unwrap());
    }

    #[test]
    fn average_matches_simpson_oracle_and_grows_with_cell() {
        let q = QuadratureSpec::default();
        let c = cfg();
        let n = 20_000;
        let h = c.r_cell / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * d2d_coverage_point(&c, &UserPosition::at_range(r)).unwrap() * 2.0 * r;
        }
        let oracle = acc * h / 3.0 / (c.r_cell * c.r_cell);
        let v = d2d_coverage_avg(&c, &q).unwrap();
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");

        let big = SystemConfig { r_cell: 2.0 * c.r_cell, ..c };
        assert!(d2d_coverage_avg(&big, &q).unwrap() >= v);
    }
}
