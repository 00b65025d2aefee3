//! Flat `key=value` configuration files and overrides.
//!
//! Keys are the `SystemConfig` field names plus `b_const`, `c_const` and
//! `eta_nlos` for the environment. `beta`, `k_loss`, `eta_nlos` and `noise`
//! need an explicit unit suffix (`dB`, `dBm` or `lin`); a bare number is
//! rejected because both scales occur in practice. For `eta_nlos` a dB value
//! is an attenuation: `20dB` means a factor of 0.01.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{to_linear_db, to_watts_dbm, SystemConfig};

pub const KEYS: [&str; 17] = [
    "p_uav", "p_d2d", "alpha_u", "alpha_d", "noise", "bandwidth", "d0", "lambda_d", "lambda_du", "r_cell", "altitude",
    "beta", "k_loss", "b_const", "c_const", "eta_nlos", "epsilon",
];

fn parse_number(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse number from {s:?}")))
}

fn split_suffix(s: &str) -> (&str, Option<&str>) {
    let s = s.trim();
    for suffix in ["dBm", "dB", "lin", "W"] {
        if let Some(num) = s.strip_suffix(suffix) {
            return (num, Some(suffix));
        }
    }
    (s, None)
}

/// Parses one value for `key` into the linear unit stored in the config.
pub fn parse_value(key: &str, raw: &str) -> Result<f64> {
    let (num, suffix) = split_suffix(raw);
    let x = parse_number(key, num)?;
    let unit_err = |allowed: &str| {
        Error::Parse(format!("{key}: unit of {raw:?} not accepted; use {allowed}"))
    };
    match key {
        "beta" | "k_loss" => match suffix {
            Some("dB") => Ok(to_linear_db(x)),
            Some("lin") => Ok(x),
            _ => Err(unit_err("a dB or lin suffix")),
        },
        "eta_nlos" => match suffix {
            Some("dB") => Ok(to_linear_db(-x)),
            Some("lin") => Ok(x),
            _ => Err(unit_err("a dB (attenuation) or lin suffix")),
        },
        "noise" => match suffix {
            Some("dBm") => Ok(to_watts_dbm(x)),
            Some("W") | Some("lin") => Ok(x),
            _ => Err(unit_err("a dBm, W or lin suffix")),
        },
        "p_uav" | "p_d2d" => match suffix {
            None | Some("W") => Ok(x),
            Some("dBm") => Ok(to_watts_dbm(x)),
            _ => Err(unit_err("watts, W or dBm")),
        },
        _ if KEYS.contains(&key) => match suffix {
            None => Ok(x),
            _ => Err(unit_err("a bare number")),
        },
        _ => Err(Error::Parse(format!("unknown key {key:?}; valid keys: {}", KEYS.join(", ")))),
    }
}

/// Shortest text that parses back to `x`, in scientific notation outside
/// `[1e-4, 1e9)`.
fn shortest(x: f64) -> String {
    if x == 0.0 || (1e-4..1e9).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A system configuration together with the planning target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemConfig::default(),
            epsilon: 0.6,
        }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let v = parse_value(key, raw)?;
        let c = &mut self.system;
        match key {
            "p_uav" => c.p_uav = v,
            "p_d2d" => c.p_d2d = v,
            "alpha_u" => c.alpha_u = v,
            "alpha_d" => c.alpha_d = v,
            "noise" => c.noise = v,
            "bandwidth" => c.bandwidth = v,
            "d0" => c.d0 = v,
            "lambda_d" => c.lambda_d = v,
            "lambda_du" => c.lambda_du = v,
            "r_cell" => c.r_cell = v,
            "altitude" => c.altitude = v,
            "beta" => c.beta = v,
            "k_loss" => c.k_loss = v,
            "b_const" => c.env.b_const = v,
            "c_const" => c.env.c_const = v,
            "eta_nlos" => c.env.eta_nlos = v,
            "epsilon" => self.epsilon = v,
            _ => unreachable!("parse_value rejects unknown keys"),
        }
        Ok(())
    }

    /// Applies a `key=value` assignment.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {assignment:?}")))?;
        self.set(k.trim(), v.trim())
    }

    /// Applies every line of a config file. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.apply(line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// The resolved configuration as `(key, value)` pairs that parse back to
    /// the same values.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let c = &self.system;
        let lin = |x: f64| format!("{}lin", shortest(x));
        let bare = shortest;
        vec![
            ("p_uav", bare(c.p_uav)),
            ("p_d2d", bare(c.p_d2d)),
            ("alpha_u", bare(c.alpha_u)),
            ("alpha_d", bare(c.alpha_d)),
            ("noise", lin(c.noise)),
            ("bandwidth", bare(c.bandwidth)),
            ("d0", bare(c.d0)),
            ("lambda_d", bare(c.lambda_d)),
            ("lambda_du", bare(c.lambda_du)),
            ("r_cell", bare(c.r_cell)),
            ("altitude", bare(c.altitude)),
            ("beta", lin(c.beta)),
            ("k_loss", lin(c.k_loss)),
            ("b_const", bare(c.env.b_const)),
            ("c_const", bare(c.env.c_const)),
            ("eta_nlos", lin(c.env.eta_nlos)),
            ("epsilon", bare(self.epsilon)),
        ]
    }

    pub fn to_text(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn units() {
        assert!((parse_value("beta", "5dB").unwrap() - 3.1622776601683795).abs() < 1e-12);
        assert_eq!(parse_value("beta", "2lin").unwrap(), 2.0);
        assert!((parse_value("eta_nlos", "20dB").unwrap() - 0.01).abs() < 1e-15);
        assert!((parse_value("noise", "-120dBm").unwrap() - 1e-15).abs() < 1e-27);
        assert!((parse_value("k_loss", "-30dB").unwrap() - 1e-3).abs() < 1e-15);
        assert!((parse_value("p_uav", "30dBm").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(parse_value("d0", "15").unwrap(), 15.0);
    }

    #[test]
    fn ambiguous_and_unknown_inputs_are_rejected() {
        for (k, v) in [("beta", "5"), ("noise", "1e-15"), ("eta_nlos", "0.01"), ("k_loss", "0.001")] {
            assert!(parse_value(k, v).is_err(), "{k}={v}");
        }
        assert!(parse_value("d0", "15dB").is_err());
        assert!(parse_value("gamma", "1").is_err());
        assert!(parse_value("d0", "abc").is_err());
    }

    #[test]
    fn file_with_comments() {
        let c = RunConfig::parse("# defaults\nbeta = 10dB\n\nlambda_d=2e-4 # denser\n").unwrap();
        assert!((c.system.beta - 10.0).abs() < 1e-12);
        assert_eq!(c.system.lambda_d, 2e-4);
        assert!(RunConfig::parse("beta").is_err());
    }

    #[test]
    fn default_text_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    proptest! {
        #[test]
        fn text_round_trips(beta in 1e-3f64..1e3, lam in 0.0f64..1e-3, h in 1.0f64..3000.0) {
            let mut c = RunConfig::default();
            c.system.beta = beta;
            c.system.lambda_d = lam;
            c.system.altitude = h;
            prop_assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
        }
    }
}
