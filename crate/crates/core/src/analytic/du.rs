use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::BoundedProbability;
use crate::error::{Error, Result};
use crate::model::{los_probability_at_elevation, LinkGeometry, SystemConfig, UserPosition};
use crate::quadrature::{integrate_pieces, QuadratureSpec};

struct CdfBoundParams {
    /// pi lambda Gamma(1 + 2/alpha)
    upper_rate: f64,
    /// 2 pi lambda Gamma(1 + 2/alpha) / (alpha - 2)
    markov: f64,
    delta: f64,
    kpd: f64,
}

impl CdfBoundParams {
    fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.require_convergent()?;
        let delta = 2.0 / cfg.alpha_d;
        let g = gamma(1.0 + delta);
        Ok(CdfBoundParams {
            upper_rate: PI * cfg.lambda_d * g,
            markov: 2.0 * PI * cfg.lambda_d * g / (cfg.alpha_d - 2.0),
            delta,
            kpd: cfg.k_loss * cfg.p_d2d,
        })
    }

    fn eval(&self, t: f64) -> BoundedProbability {
        if t <= 0.0 {
            return BoundedProbability::ZERO;
        }
        let x = (t / self.kpd).powf(-self.delta);
        let upper = (-self.upper_rate * x).exp();
        let lower = (1.0 - self.markov * x).max(0.0) * upper;
        BoundedProbability::new(lower, upper)
    }

    /// Threshold below which the lower bound is clamped to zero.
    fn clamp_threshold(&self) -> f64 {
        if self.markov == 0.0 {
            0.0
        } else {
            self.kpd * self.markov.powf(1.0 / self.delta)
        }
    }
}

/// Lower and upper bounds on `P[I_d <= t]` for the aggregate D2D interference.
pub fn interference_cdf_bounds(cfg: &SystemConfig, t: f64) -> Result<BoundedProbability> {
    if !(t > 0.0) {
        return Err(Error::config("t", "interference threshold must be positive"));
    }
    Ok(CdfBoundParams::new(cfg)?.eval(t))
}

fn point_bounds(cfg: &SystemConfig, p: &CdfBoundParams, ground_range: f64) -> Result<BoundedProbability> {
    let g = LinkGeometry::new(cfg.altitude, ground_range)?;
    let p_los = los_probability_at_elevation(g.elevation_deg, &cfg.env);
    let s = cfg.k_loss * cfg.p_uav * g.slant_range.powf(-cfg.alpha_u);
    let los = p.eval(s / cfg.beta - cfg.noise);
    let nlos = p.eval(cfg.env.eta_nlos * s / cfg.beta - cfg.noise);
    Ok(BoundedProbability::new(
        p_los * los.lower + (1.0 - p_los) * nlos.lower,
        p_los * los.upper + (1.0 - p_los) * nlos.upper,
    ))
}

/// Bounds on the coverage probability of a downlink user at `pos`.
pub fn du_coverage_point_bounds(cfg: &SystemConfig, pos: &UserPosition) -> Result<BoundedProbability> {
    let p = CdfBoundParams::new(cfg)?;
    point_bounds(cfg, &p, pos.r)
}

/// Ground range at which the received UAV power (scaled by `gain`) drops to
/// `level` watts; `None` when it never does or only below the UAV.
fn range_for_power(cfg: &SystemConfig, gain: f64, level: f64) -> Option<f64> {
    if !(level > 0.0) {
        return None;
    }
    let slant = (cfg.k_loss * cfg.p_uav * gain / level).powf(1.0 / cfg.alpha_u);
    if slant <= cfg.altitude {
        return None;
    }
    Some((slant * slant - cfg.altitude * cfg.altitude).sqrt())
}

/// Cell-average radial breakpoints where a branch switches on or off or the
/// lower bound leaves its clamp.
fn breakpoints(cfg: &SystemConfig, p: &CdfBoundParams) -> Vec<f64> {
    let mut pts = vec![0.0, cfg.r_cell];
    for gain in [1.0, cfg.env.eta_nlos] {
        for t in [0.0, p.clamp_threshold()] {
            if let Some(r) = range_for_power(cfg, gain, cfg.beta * (t + cfg.noise)) {
                if r > 0.0 && r < cfg.r_cell {
                    pts.push(r);
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Bounds on the cell-averaged downlink coverage.
pub fn du_coverage_avg_bounds(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<BoundedProbability> {
    let p = CdfBoundParams::new(cfg)?;
    LinkGeometry::new(cfg.altitude, 0.0)?;
    let pts = breakpoints(cfg, &p);
    let rc2 = cfg.r_cell * cfg.r_cell;
    let weight = |r: f64| 2.0 * r / rc2;
    let lower = integrate_pieces(
        &|r| point_bounds(cfg, &p, r).map(|b| b.lower).unwrap_or(0.0) * weight(r),
        &pts,
        quad,
    )?;
    let upper = integrate_pieces(
        &|r| point_bounds(cfg, &p, r).map(|b| b.upper).unwrap_or(0.0) * weight(r),
        &pts,
        quad,
    )?;
    Ok(BoundedProbability::new(lower, upper))
}

/// Noise-limited downlink coverage, exact when the D2D layer is silent.
pub fn du_coverage_no_d2d(cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<f64> {
    LinkGeometry::new(cfg.altitude, 0.0)?;
    let limit = |gain: f64| -> f64 {
        if cfg.noise == 0.0 {
            return cfg.r_cell;
        }
        let slant = (cfg.k_loss * cfg.p_uav * gain / (cfg.beta * cfg.noise)).powf(1.0 / cfg.alpha_u);
        if slant <= cfg.altitude {
            0.0
        } else {
            (slant * slant - cfg.altitude * cfg.altitude).sqrt().min(cfg.r_cell)
        }
    };
    let rc2 = cfg.r_cell * cfg.r_cell;
    let p_los = |r: f64| {
        let g = LinkGeometry::new(cfg.altitude, r).expect("altitude is positive");
        los_probability_at_elevation(g.elevation_deg, &cfg.env)
    };
    let los = integrate_pieces(&|r| p_los(r) * 2.0 * r / rc2, &[0.0, limit(1.0)], quad)?;
    let nlos = integrate_pieces(
        &|r| (1.0 - p_los(r)) * 2.0 * r / rc2,
        &[0.0, limit(cfg.env.eta_nlos)],
        quad,
    )?;
    Ok((los + nlos).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn gamma_reference_value() {
        // Gamma(5/3)
        assert!((gamma(5.0 / 3.0) - 0.902_745_292_950_933_6).abs() < 1e-13);
    }

    /// Independent evaluation of the upper bound: probability that no
    /// interferer alone exceeds t, by direct radial integration.
    fn upper_oracle(cfg: &SystemConfig, t: f64) -> f64 {
        let kpd = cfg.k_loss * cfg.p_d2d;
        let n = 200_000;
        let (lo, hi) = (1e-3f64.ln(), 1e7f64.ln());
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let u = (lo + h * i as f64).exp();
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * (-t * u.powf(cfg.alpha_d) / kpd).exp() * 2.0 * PI * u * u * h;
        }
        (-cfg.lambda_d * acc).exp()
    }

    #[test]
    fn cdf_upper_bound_matches_oracle() {
        let c = cfg();
        for t in [1e-12, 1e-10, 1e-9, 1e-8] {
            let b = interference_cdf_bounds(&c, t).unwrap();
            let o = upper_oracle(&c, t);
            assert!((b.upper - o).abs() < 1e-7, "t={t}: {} vs {o}", b.upper);
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn cdf_bounds_limits() {
        let c = cfg().with_lambda_d(1e-30);
        let b = interference_cdf_bounds(&c, 1e-9).unwrap();
        assert!(b.lower > 1.0 - 1e-12);
        let c = cfg();
        let near = interference_cdf_bounds(&c, 1e-4).unwrap();
        let far = interference_cdf_bounds(&c, 1e2).unwrap();
        assert!(far.gap() < near.gap());
        // The gap decays like t^(-2/alpha).
        assert!(far.gap() < 1e-6);
        assert!(matches!(
            interference_cdf_bounds(&SystemConfig { alpha_d: 2.0, ..c }, 1.0),
            Err(Error::DivergentInterference { .. })
        ));
    }

    #[test]
    fn point_bounds_degenerate_cases() {
        let pos = UserPosition::at_range(200.0);
        let loud = SystemConfig { noise: 1.0, ..cfg() };
        assert_eq!(du_coverage_point_bounds(&loud, &pos).unwrap(), BoundedProbability::ZERO);
        let quiet = SystemConfig {
            lambda_d: 0.0,
            noise: 0.0,
            ..cfg()
        };
        assert_eq!(du_coverage_point_bounds(&quiet, &pos).unwrap(), BoundedProbability::ONE);
    }

    #[test]
    fn averaged_bounds_limits() {
        let q = QuadratureSpec::default();
        let dense = cfg().with_lambda_d(10.0);
        let b = du_coverage_avg_bounds(&dense, &q).unwrap();
        assert!(b.upper < 1e-12);
        let c = cfg();
        let b = du_coverage_avg_bounds(&c, &q).unwrap();
        assert!(b.lower <= b.upper && b.lower > 0.0);
    }

    #[test]
    fn zero_density_reduces_to_noise_limited_coverage() {
        let q = QuadratureSpec::default();
        for beta_db in [0.0, 10.0, 30.0, 45.0] {
            let c = cfg().with_lambda_d(0.0).with_beta(crate::model::to_linear_db(beta_db));
            let b = du_coverage_avg_bounds(&c, &q).unwrap();
            let p = du_coverage_no_d2d(&c, &q).unwrap();
            assert!((b.lower - p).abs() < 1e-9 && (b.upper - p).abs() < 1e-9, "{beta_db}: {b:?} {p}");
        }
    }

    #[test]
    fn noise_limited_limits() {
        let q = QuadratureSpec::default();
        let c = SystemConfig { noise: 0.0, ..cfg() };
        assert!((du_coverage_no_d2d(&c, &q).unwrap() - 1.0).abs() < 1e-9);
        let c = cfg().with_beta(1e12);
        assert_eq!(du_coverage_no_d2d(&c, &q).unwrap(), 0.0);
    }

    #[test]
    fn averaged_upper_bound_decreases_in_beta() {
        let q = QuadratureSpec::default();
        let mut prev = 1.0;
        for db in (0..=20).map(|x| x as f64) {
            let b = du_coverage_avg_bounds(&cfg().with_beta(crate::model::to_linear_db(db)), &q).unwrap();
            assert!(b.upper <= prev + 1e-12);
            prev = b.upper;
        }
    }

    proptest! {
        #[test]
        fn point_bounds_are_azimuth_free(r in 0.0f64..2000.0, phi in 0.0f64..std::f64::consts::TAU) {
            let c = cfg();
            let a = du_coverage_point_bounds(&c, &UserPosition { r, phi: 0.0 }).unwrap();
            let b = du_coverage_point_bounds(&c, &UserPosition { r, phi }).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(0.0 <= a.lower && a.lower <= a.upper && a.upper <= 1.0);
        }
    }
}
