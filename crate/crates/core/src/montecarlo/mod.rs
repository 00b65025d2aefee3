//! Brute-force Monte Carlo oracle for the analytic expressions.
//!
//! Interferers are generated around the receiver in order of increasing
//! distance: for a unit-density PPP the areas `pi r_k^2` are the arrival
//! times of a unit-rate Poisson process, so the field is built from a running
//! sum of Exp(1) draws. A field drawn at unit density serves every density by
//! scaling (`I_lambda = lambda^(alpha/2) I_1` when the truncation disk holds
//! the same expected number of points), which lets one set of draws answer a
//! whole (beta, lambda) grid.

mod kernel;
mod sim;
mod streams;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;

pub use sim::{
    simulate_coverage_sweep, simulate_d2d_coverage, simulate_du_coverage, simulate_interference_cdf,
    simulate_outage_multislot, simulate_outage_multislot_with, CoverageSweep, FieldSharing, LosDraw, MultislotOptions,
};
pub use streams::trial_rng;

/// One realization of the D2D transmitter process on a disk around the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointField {
    pub points: Vec<[f64; 2]>,
    pub trunc_radius: f64,
    pub density: f64,
}

/// Homogeneous PPP on the disk of radius `trunc_radius` centred at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, trunc_radius: f64, rng: &mut R) -> PointField {
    let mean = density * PI * trunc_radius * trunc_radius;
    let n = if mean > 0.0 {
        Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
    } else {
        0
    };
    let points = (0..n)
        .map(|_| {
            let r = trunc_radius * rng.gen::<f64>().sqrt();
            let t = 2.0 * PI * rng.gen::<f64>();
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    PointField {
        points,
        trunc_radius,
        density,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trials: u64,
    /// Truncation radius around the receiver, at the configured D2D density.
    pub trunc_radius: f64,
    pub seed: u64,
    pub slots: usize,
}

/// Worst-case (over beta) D2D coverage bias the truncation may introduce.
pub const TRUNCATION_BIAS_TOLERANCE: f64 = 5e-3;

/// Bias budget used when picking a default truncation radius.
pub const DEFAULT_TRUNCATION_BIAS: f64 = 2e-3;

impl TrialPlan {
    /// Plan with the smallest truncation radius meeting the default bias budget.
    pub fn for_config(cfg: &SystemConfig, trials: u64, seed: u64) -> TrialPlan {
        let required = required_trunc_radius(cfg, DEFAULT_TRUNCATION_BIAS);
        TrialPlan {
            trials,
            trunc_radius: required.max(1.5 * cfg.r_cell),
            seed,
            slots: 1,
        }
    }

    pub fn with_slots(mut self, slots: usize) -> Self {
        self.slots = slots;
        self
    }

    pub fn with_trunc_radius(mut self, r: f64) -> Self {
        self.trunc_radius = r;
        self
    }

    /// Checks the plan against a configuration, including the bias gate.
    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        cfg.validate()?;
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.trunc_radius > cfg.r_cell) {
            return Err(Error::config("trunc_radius", "must exceed the cell radius"));
        }
        if truncation_bias_bound(cfg, self.trunc_radius) > TRUNCATION_BIAS_TOLERANCE {
            return Err(Error::TruncationTooSmall {
                given: self.trunc_radius,
                required: required_trunc_radius(cfg, TRUNCATION_BIAS_TOLERANCE),
            });
        }
        Ok(())
    }
}

/// Upper bound, maximized over beta, on the D2D coverage bias caused by
/// dropping interferers beyond `trunc_radius`.
///
/// With the interference-only coverage `exp(-c1 beta^d)` of the full plane
/// and mean tail interference giving exponent `c2 beta`, the bias is at most
/// `exp(-c1 beta^d) (exp(c2 beta) - 1)`.
pub fn truncation_bias_bound(cfg: &SystemConfig, trunc_radius: f64) -> f64 {
    let a = cfg.alpha_d;
    if cfg.lambda_d == 0.0 || !(a > 2.0) {
        return 0.0;
    }
    let d = 2.0 / a;
    let c1 = 2.0 * PI * PI * cfg.lambda_d * cfg.d0 * cfg.d0 / (a * (2.0 * PI / a).sin());
    let c2 = cfg.d0.powf(a) * 2.0 * PI * cfg.lambda_d * trunc_radius.powf(2.0 - a) / (a - 2.0);
    let f = |beta: f64| (-c1 * beta.powf(d)).exp() * (c2 * beta).exp_m1();
    (0..=400)
        .map(|i| f(10f64.powf(-6.0 + 12.0 * i as f64 / 400.0)))
        .fold(0.0, f64::max)
}

/// Smallest truncation radius whose bias bound is within `tolerance`.
pub fn required_trunc_radius(cfg: &SystemConfig, tolerance: f64) -> f64 {
    if truncation_bias_bound(cfg, cfg.r_cell) <= tolerance {
        return cfg.r_cell;
    }
    let (mut lo, mut hi) = (cfg.r_cell, 2.0 * cfg.r_cell);
    while truncation_bias_bound(cfg, hi) > tolerance {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1.0 {
        let mid = 0.5 * (lo + hi);
        if truncation_bias_bound(cfg, mid) > tolerance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Monte Carlo probability estimate with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u64,
}

impl EstimateWithCI {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        EstimateWithCI {
            mean,
            half_width_95: 1.96 * (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Standard error of the mean.
    pub fn sigma(&self) -> f64 {
        self.half_width_95 / 1.96
    }

    pub fn contains(&self, p: f64) -> bool {
        (p - self.mean).abs() <= self.half_width_95
    }

    pub fn complement(&self) -> Self {
        EstimateWithCI {
            mean: 1.0 - self.mean,
            ..*self
        }
    }
}
