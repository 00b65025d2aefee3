//! System model: configuration, geometry and the two link budgets.
//!
//! Powers are in watts and K multiplies every transmit power. Noise stays in
//! absolute watts, so SINRs come out the same as with K-normalized powers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10^(x/10)`.
pub fn to_linear_db(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm to watts.
pub fn to_watts_dbm(value_dbm: f64) -> f64 {
    to_linear_db(value_dbm) / 1000.0
}

pub fn to_dbm(watts: f64) -> f64 {
    to_db(watts * 1000.0)
}

/// Air-to-ground propagation environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Sigmoid slope B.
    pub b_const: f64,
    /// Sigmoid offset C, in degrees.
    pub c_const: f64,
    /// Linear NLoS excess attenuation, in (0, 1].
    pub eta_nlos: f64,
}

impl Environment {
    /// Dense urban constants with 20 dB NLoS excess attenuation.
    pub const DENSE_URBAN: Environment = Environment {
        b_const: 0.136,
        c_const: 11.95,
        eta_nlos: 0.01,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.b_const > 0.0 && self.b_const.is_finite()) {
            return Err(Error::config("b_const", "must be positive"));
        }
        if !(self.c_const > 0.0 && self.c_const.is_finite()) {
            return Err(Error::config("c_const", "must be positive"));
        }
        if !(self.eta_nlos > 0.0 && self.eta_nlos <= 1.0) {
            return Err(Error::config("eta_nlos", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::DENSE_URBAN
    }
}

/// All radio and geometry parameters. Defaults follow the reference
/// simulation setup with a 1000 m cell and a 5 dB threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub p_uav: f64,
    pub p_d2d: f64,
    pub alpha_u: f64,
    pub alpha_d: f64,
    pub noise: f64,
    pub bandwidth: f64,
    pub d0: f64,
    pub lambda_d: f64,
    pub lambda_du: f64,
    pub r_cell: f64,
    pub altitude: f64,
    pub beta: f64,
    pub k_loss: f64,
    pub env: Environment,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            p_uav: 5.0,
            p_d2d: 0.1,
            alpha_u: 2.0,
            alpha_d: 3.0,
            noise: to_watts_dbm(-120.0),
            bandwidth: 1e6,
            d0: 20.0,
            lambda_d: 1e-4,
            lambda_du: 1e-4,
            r_cell: 1000.0,
            altitude: 500.0,
            beta: to_linear_db(5.0),
            k_loss: to_linear_db(-30.0),
            env: Environment::DENSE_URBAN,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be non-negative and finite, got {v}")))
    }
}

impl SystemConfig {
    /// Checks the invariants every operation relies on.
    ///
    /// Zero is accepted for `p_uav`, `noise`, `lambda_d` and `lambda_du` so the
    /// degenerate limits (no UAV, no noise, empty D2D layer) stay expressible.
    pub fn validate(&self) -> Result<()> {
        non_negative("p_uav", self.p_uav)?;
        positive("p_d2d", self.p_d2d)?;
        non_negative("noise", self.noise)?;
        positive("bandwidth", self.bandwidth)?;
        positive("d0", self.d0)?;
        non_negative("lambda_d", self.lambda_d)?;
        non_negative("lambda_du", self.lambda_du)?;
        positive("r_cell", self.r_cell)?;
        positive("altitude", self.altitude)?;
        positive("beta", self.beta)?;
        positive("k_loss", self.k_loss)?;
        if !(self.alpha_d > 2.0 && self.alpha_d.is_finite()) {
            return Err(Error::config(
                "alpha_d",
                format!("must exceed 2 for the interference to converge, got {}", self.alpha_d),
            ));
        }
        if !(self.alpha_u >= 2.0 && self.alpha_u.is_finite()) {
            return Err(Error::config(
                "alpha_u",
                format!("must be at least 2, got {}", self.alpha_u),
            ));
        }
        self.env.validate()
    }

    pub(crate) fn require_convergent(&self) -> Result<()> {
        if self.alpha_d > 2.0 {
            Ok(())
        } else {
            Err(Error::DivergentInterference {
                alpha_d: self.alpha_d,
            })
        }
    }

    pub fn with_altitude(mut self, h: f64) -> Self {
        self.altitude = h;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_lambda_d(mut self, lambda_d: f64) -> Self {
        self.lambda_d = lambda_d;
        self
    }

    /// Shannon spectral efficiency at the threshold, `W log2(1 + beta)`.
    pub fn rate_at_threshold(&self) -> f64 {
        self.bandwidth * (1.0 + self.beta).log2()
    }
}

/// Polar position of a ground receiver relative to the UAV ground projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    pub r: f64,
    pub phi: f64,
}

impl UserPosition {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::config("r", "must be non-negative"));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::config("phi", "must lie in [0, 2pi)"));
        }
        Ok(UserPosition { r, phi })
    }

    pub fn at_range(r: f64) -> Self {
        UserPosition { r, phi: 0.0 }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.r * self.phi.cos(), self.r * self.phi.sin()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub ground_range: f64,
    pub slant_range: f64,
    pub elevation_deg: f64,
}

impl LinkGeometry {
    pub fn new(altitude: f64, ground_range: f64) -> Result<Self> {
        if altitude == 0.0 && ground_range == 0.0 {
            return Err(Error::DegenerateGeometry);
        }
        let slant_range = altitude.hypot(ground_range);
        let elevation_deg = (altitude / slant_range).asin().to_degrees();
        Ok(LinkGeometry {
            ground_range,
            slant_range,
            elevation_deg,
        })
    }
}

/// Sigmoid LoS probability as a function of elevation angle in degrees.
pub fn los_probability_at_elevation(elevation_deg: f64, env: &Environment) -> f64 {
    1.0 / (1.0 + env.c_const * (-env.b_const * (elevation_deg - env.c_const)).exp())
}

pub fn los_probability(h: f64, r: f64, env: &Environment) -> Result<f64> {
    let g = LinkGeometry::new(h, r)?;
    Ok(los_probability_at_elevation(g.elevation_deg, env))
}

/// Received UAV power `K P_u |X_u|^-alpha_u`, times eta when NLoS.
pub fn uav_received_power(cfg: &SystemConfig, geom: &LinkGeometry, los: bool) -> f64 {
    let p = cfg.k_loss * cfg.p_uav * geom.slant_range.powf(-cfg.alpha_u);
    if los {
        p
    } else {
        p * cfg.env.eta_nlos
    }
}

pub fn d2d_received_power(cfg: &SystemConfig, distance: f64, fading: f64) -> f64 {
    cfg.k_loss * cfg.p_d2d * distance.powf(-cfg.alpha_d) * fading
}
