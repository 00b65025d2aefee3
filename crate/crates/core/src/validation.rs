//! Analytic-versus-simulation check suite.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{d2d_coverage_point, d2d_outage_multislot, du_coverage_point_bounds, interference_cdf_bounds};
use crate::error::{Error, Result};
use crate::model::{SystemConfig, UserPosition};
use crate::montecarlo::{simulate_coverage_sweep, simulate_interference_cdf, simulate_outage_multislot, TrialPlan};
use crate::quadrature::QuadratureSpec;
use crate::sweep::tour_schedule;

pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub trials: u64,
    pub seed: u64,
    /// Receiver positions as fractions of the cell radius, with azimuths.
    pub positions: Vec<(f64, f64)>,
    pub slot_counts: Vec<usize>,
    /// Position of the receiver in the multi-slot checks.
    pub outage_position: (f64, f64),
    pub cdf_points: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            trials: 100_000,
            seed: 42,
            positions: vec![(0.0, 0.0), (0.5, 1.0), (1.0, 4.0)],
            slot_counts: vec![1, 3, 5, 7],
            outage_position: (0.3, 0.5),
            cdf_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Observed discrepancy.
    pub error: f64,
    pub tolerance: f64,
    /// `tolerance - error`; negative when the check fails.
    pub margin: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, error: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: error <= tolerance,
            error,
            tolerance,
            margin: tolerance - error,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Distance of `p` outside `[lo, hi]`, zero inside.
fn outside(p: f64, lo: f64, hi: f64) -> f64 {
    (lo - p).max(p - hi).max(0.0)
}

/// Log-spaced thresholds spanning the bulk of the interference distribution.
pub fn interference_t_grid(cfg: &SystemConfig, points: usize) -> Vec<f64> {
    let scale = cfg.k_loss * cfg.p_d2d * (PI * cfg.lambda_d).powf(0.5 * cfg.alpha_d);
    (0..points)
        .map(|i| scale * 10f64.powf(-1.0 + 4.0 * i as f64 / (points.max(2) - 1) as f64))
        .collect()
}

/// Runs every check. Configuration problems surface before any simulation.
pub fn run_validation(cfg: &SystemConfig, opts: &ValidationOptions) -> Result<ValidationReport> {
    cfg.validate()?;
    if opts.trials < MIN_TRIALS {
        return Err(Error::config("trials", format!("validation needs at least {MIN_TRIALS} trials")));
    }
    let quad = QuadratureSpec::default();
    let plan = TrialPlan::for_config(cfg, opts.trials, opts.seed);
    plan.validate(cfg)?;
    let positions = opts
        .positions
        .iter()
        .map(|&(f, phi)| UserPosition::new(f * cfg.r_cell, phi))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();

    let sweep = simulate_coverage_sweep(cfg, &positions, &plan, &[cfg.beta], &[cfg.lambda_d])?;
    for (i, pos) in positions.iter().enumerate() {
        let mc = sweep.d2d_at(i, 0, 0);
        let exact = d2d_coverage_point(cfg, pos)?;
        checks.push(CheckResult::new(
            format!("d2d_coverage r={:.0}", pos.r),
            (exact - mc.mean).abs(),
            (3.0 * mc.sigma()).max(0.01),
            format!("analytic {exact:.5} simulated {:.5}", mc.mean),
        ));
    }
    for (i, pos) in positions.iter().enumerate() {
        let mc = sweep.du_at(i, 0, 0);
        let b = du_coverage_point_bounds(cfg, pos)?;
        checks.push(CheckResult::new(
            format!("du_bracket r={:.0}", pos.r),
            outside(mc.mean, b.lower, b.upper),
            3.0 * mc.sigma(),
            format!("bounds [{:.5}, {:.5}] simulated {:.5}", b.lower, b.upper, mc.mean),
        ));
    }

    let (f, phi) = opts.outage_position;
    let pos = UserPosition::new(f * cfg.r_cell, phi)?;
    let mut analytic_outage = Vec::new();
    for &m in &opts.slot_counts {
        let schedule = tour_schedule(cfg, m)?;
        let exact = d2d_outage_multislot(cfg, &schedule, &pos, &quad)?;
        let mc = simulate_outage_multislot(cfg, &schedule, &pos, &plan.with_slots(schedule.len()))?;
        checks.push(CheckResult::new(
            format!("outage m={m}"),
            (exact - mc.mean).abs(),
            (3.0 * mc.sigma()).max(0.015),
            format!("analytic {exact:.5} simulated {:.5}", mc.mean),
        ));
        if m == 1 {
            let single = 1.0 - d2d_coverage_point(cfg, &pos)?;
            checks.push(CheckResult::new(
                "outage m=1 equals single-slot outage",
                (exact - single).abs(),
                1e-8,
                format!("multislot {exact:.10} single {single:.10}"),
            ));
        }
        analytic_outage.push(exact);
    }
    if analytic_outage.len() > 1 {
        let worst = analytic_outage
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::NEG_INFINITY, f64::max);
        // Strictly increasing: every step must be positive.
        checks.push(CheckResult {
            name: "outage increasing in m".into(),
            passed: worst < 0.0,
            error: worst,
            tolerance: 0.0,
            margin: -worst,
            detail: format!("{analytic_outage:.5?}"),
        });
    }

    let t_grid = interference_t_grid(cfg, opts.cdf_points);
    let cdf = simulate_interference_cdf(cfg, &plan, &t_grid)?;
    let mut worst = CheckResult::new("interference_cdf", 0.0, 0.0, String::new());
    worst.margin = f64::INFINITY;
    for (t, mc) in t_grid.iter().zip(&cdf) {
        let b = interference_cdf_bounds(cfg, *t)?;
        let c = CheckResult::new(
            "interference_cdf",
            outside(mc.mean, b.lower, b.upper),
            3.0 * mc.sigma(),
            format!("t={t:.3e} bounds [{:.5}, {:.5}] simulated {:.5}", b.lower, b.upper, mc.mean),
        );
        if c.margin < worst.margin {
            worst = c;
        }
    }
    worst.name = format!("interference_cdf {} points", t_grid.len());
    checks.push(worst);

    Ok(ValidationReport {
        trials: opts.trials,
        seed: opts.seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_rejects_bad_inputs_before_simulating() {
        let bad = SystemConfig {
            alpha_d: 2.0,
            ..SystemConfig::default()
        };
        assert!(matches!(
            run_validation(&bad, &ValidationOptions::default()),
            Err(Error::InvalidConfig { .. })
        ));
        let few = ValidationOptions {
            trials: 100,
            ..ValidationOptions::default()
        };
        assert!(run_validation(&SystemConfig::default(), &few).is_err());
    }

    #[test]
    fn outside_distance() {
        assert_eq!(outside(0.5, 0.4, 0.6), 0.0);
        assert!((outside(0.3, 0.4, 0.6) - 0.1).abs() < 1e-15);
        assert!((outside(0.7, 0.4, 0.6) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn t_grid_spans_the_cdf() {
        let cfg = SystemConfig::default();
        let g = interference_t_grid(&cfg, 20);
        assert_eq!(g.len(), 20);
        let lo = interference_cdf_bounds(&cfg, g[0]).unwrap();
        let hi = interference_cdf_bounds(&cfg, g[19]).unwrap();
        assert!(lo.upper < 0.2, "{lo:?}");
        assert!(hi.lower > 0.8, "{hi:?}");
    }
}
