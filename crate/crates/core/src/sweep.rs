//! One-dimensional parameter sweeps and their CSV records.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    avg_rates, d2d_coverage_avg, d2d_coverage_no_uav, d2d_coverage_point, d2d_outage_multislot,
    du_coverage_avg_bounds, du_coverage_no_d2d, du_coverage_point_bounds, StopPointSchedule,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::{to_linear_db, SystemConfig, UserPosition};
use crate::montecarlo::{simulate_coverage_sweep, simulate_outage_multislot, TrialPlan};
use crate::planner::{
    layout_radius, min_stop_points, min_transmit_power, mission_delay, open_tour, stop_point_layout,
    uav_coverage_radius, AltitudeChoice, DelayBreakdown, PlanOptions, StopPlan,
};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Threshold in dB.
    Beta,
    Altitude,
    LambdaD,
    D0,
    /// Number of stop points, which is also the number of transmission slots.
    M,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 5] = [
        SweepVariable::Beta,
        SweepVariable::Altitude,
        SweepVariable::LambdaD,
        SweepVariable::D0,
        SweepVariable::M,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Beta => "beta",
            SweepVariable::Altitude => "altitude",
            SweepVariable::LambdaD => "lambda_d",
            SweepVariable::D0 => "d0",
            SweepVariable::M => "m",
        }
    }

    /// CSV column name, carrying the unit where it is not the config's.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Beta => "beta_db",
            v => v.name(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|v| v.name()).collect();
            Error::Parse(format!("unknown sweep variable {s:?}; valid: {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    D2dCoverage,
    D2dNoUav,
    DuLower,
    DuUpper,
    DuNoD2d,
    DuRate,
    D2dRate,
    SumRate,
    D2dCenter,
    DuCenterLower,
    DuCenterUpper,
    McD2dCenter,
    McDuCenter,
    Outage,
    McOutage,
    PlanAltitude,
    CoverageRadius,
    Stops,
    DiskRadius,
    PUavMin,
    TravelTime,
    Delay,
}

impl Metric {
    pub const ALL: [Metric; 22] = [
        Metric::D2dCoverage,
        Metric::D2dNoUav,
        Metric::DuLower,
        Metric::DuUpper,
        Metric::DuNoD2d,
        Metric::DuRate,
        Metric::D2dRate,
        Metric::SumRate,
        Metric::D2dCenter,
        Metric::DuCenterLower,
        Metric::DuCenterUpper,
        Metric::McD2dCenter,
        Metric::McDuCenter,
        Metric::Outage,
        Metric::McOutage,
        Metric::PlanAltitude,
        Metric::CoverageRadius,
        Metric::Stops,
        Metric::DiskRadius,
        Metric::PUavMin,
        Metric::TravelTime,
        Metric::Delay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::D2dCoverage => "d2d_coverage",
            Metric::D2dNoUav => "d2d_no_uav",
            Metric::DuLower => "du_lower",
            Metric::DuUpper => "du_upper",
            Metric::DuNoD2d => "du_no_d2d",
            Metric::DuRate => "du_rate",
            Metric::D2dRate => "d2d_rate",
            Metric::SumRate => "sum_rate",
            Metric::D2dCenter => "d2d_center",
            Metric::DuCenterLower => "du_center_lower",
            Metric::DuCenterUpper => "du_center_upper",
            Metric::McD2dCenter => "mc_d2d_center",
            Metric::McDuCenter => "mc_du_center",
            Metric::Outage => "outage",
            Metric::McOutage => "mc_outage",
            Metric::PlanAltitude => "plan_altitude",
            Metric::CoverageRadius => "coverage_radius",
            Metric::Stops => "stops",
            Metric::DiskRadius => "disk_radius",
            Metric::PUavMin => "p_uav_min",
            Metric::TravelTime => "travel_time",
            Metric::Delay => "delay",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            Error::Parse(format!("unknown metric {s:?}; valid metrics: {}", Self::valid_names()))
        })
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    }

    /// Comma-separated list of metric names.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        let list = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Metric::parse)
            .collect::<Result<Vec<_>>>()?;
        if list.is_empty() {
            return Err(Error::Parse(format!("no metrics given; valid metrics: {}", Self::valid_names())));
        }
        Ok(list)
    }

    fn is_plan(self) -> bool {
        matches!(
            self,
            Metric::PlanAltitude
                | Metric::CoverageRadius
                | Metric::Stops
                | Metric::DiskRadius
                | Metric::PUavMin
                | Metric::TravelTime
                | Metric::Delay
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub outputs: Vec<Metric>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, grid: Vec<f64>, outputs: Vec<Metric>) -> Result<Self> {
        let s = SweepSpec {
            variable,
            grid,
            outputs,
        };
        s.validate()?;
        Ok(s)
    }

    /// Parses `var=a:b:step` or `var=v1,v2,...`.
    pub fn parse(sweep: &str, metrics: &str) -> Result<Self> {
        let (var, range) = sweep
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected var=a:b:step, got {sweep:?}")))?;
        let variable = SweepVariable::parse(var.trim())?;
        let grid = parse_grid(range.trim())?;
        SweepSpec::new(variable, grid, Metric::parse_list(metrics)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("grid", "must not be empty"));
        }
        if self.grid.iter().any(|x| !x.is_finite()) || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("grid", "must be finite and strictly increasing"));
        }
        if self.variable == SweepVariable::M && self.grid.iter().any(|&x| x < 1.0 || x.fract() != 0.0) {
            return Err(Error::config("m", "grid values must be positive integers"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("metrics", "at least one metric is required"));
        }
        Ok(())
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("cannot parse grid value {t:?}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Parse(format!("range {s:?} needs a <= b and step > 0")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Parse(format!("expected a:b:step or a comma list, got {s:?}"))),
    }
}

/// Monte Carlo and planning settings shared by every row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub trials: u64,
    pub seed: u64,
    pub plan: PlanOptions,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            trials: 100_000,
            seed: 42,
            plan: PlanOptions::default(),
        }
    }
}

/// Self-describing output of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub config: RunConfig,
    pub seed: u64,
    pub trials: u64,
    pub spec: SweepSpec,
    /// One column per metric, in the order of `spec.outputs`.
    pub columns: Vec<Vec<f64>>,
}

/// Formats with 9 significant digits, using the shortest text that parses
/// back to the rounded value.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else if (1e-4..1e9).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl RunRecord {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool={}", self.tool);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# trials={}", self.trials);
        let _ = writeln!(out, "# sweep={}", self.spec.variable.name());
        for (k, v) in self.config.pairs() {
            let _ = writeln!(out, "# {k}={v}");
        }
        let mut header = vec![self.spec.variable.column()];
        header.extend(self.spec.outputs.iter().map(|m| m.name()));
        let _ = writeln!(out, "{}", header.join(","));
        for (i, x) in self.spec.grid.iter().enumerate() {
            let mut row = vec![format_sig9(*x)];
            row.extend(self.columns.iter().map(|c| format_sig9(c[i])));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn column(&self, metric: Metric) -> Option<&[f64]> {
        let i = self.spec.outputs.iter().position(|&m| m == metric)?;
        Some(&self.columns[i])
    }
}

struct PlanSummary {
    altitude: f64,
    coverage_radius: f64,
    m: f64,
    disk_radius: f64,
    p_uav_min: f64,
    delay: DelayBreakdown,
}

const NAN_DELAY: DelayBreakdown = DelayBreakdown {
    travel_time: f64::NAN,
    residence_total: f64::NAN,
    total: f64::NAN,
};

fn nan_if_infeasible(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::Infeasible(_)) => Ok(f64::NAN),
        other => other,
    }
}

fn plan_summary(cfg: &SystemConfig, epsilon: f64, m: Option<usize>, opts: &PlanOptions) -> Result<PlanSummary> {
    let altitude = opts.resolve_altitude(cfg, epsilon)?;
    let at = cfg.with_altitude(altitude);
    let coverage_radius = nan_if_infeasible(uav_coverage_radius(&at, epsilon))?;
    match m {
        Some(m) => {
            let layout = stop_point_layout(m, cfg.r_cell)?;
            let p_uav_min = nan_if_infeasible(min_transmit_power(&at, m, epsilon))?;
            let order = open_tour(&layout.positions);
            let plan = StopPlan {
                m: layout.positions.len(),
                positions: order.iter().map(|&i| layout.positions[i]).collect(),
                disk_radius: layout.radius,
                p_uav_min,
                delay: NAN_DELAY,
                epsilon,
                altitude,
                coverage_radius,
            };
            let mp = opts.mission;
            let delay = mission_delay(cfg, &plan, mp.t_service, mp.speed, mp.access)?;
            Ok(PlanSummary {
                altitude,
                coverage_radius,
                m: m as f64,
                disk_radius: layout_radius(m, cfg.r_cell),
                p_uav_min,
                delay,
            })
        }
        None => match min_stop_points(
            &at,
            epsilon,
            &PlanOptions {
                altitude: AltitudeChoice::Fixed,
                ..*opts
            },
        ) {
            Ok(p) => Ok(PlanSummary {
                altitude,
                coverage_radius,
                m: p.m as f64,
                disk_radius: p.disk_radius,
                p_uav_min: p.p_uav_min,
                delay: p.delay,
            }),
            Err(Error::Infeasible(_)) => Ok(PlanSummary {
                altitude,
                coverage_radius,
                m: f64::NAN,
                disk_radius: f64::NAN,
                p_uav_min: f64::NAN,
                delay: NAN_DELAY,
            }),
            Err(e) => Err(e),
        },
    }
}

/// Schedule of `m` stops in tour order at the configured altitude.
pub fn tour_schedule(cfg: &SystemConfig, m: usize) -> Result<StopPointSchedule> {
    let layout = stop_point_layout(m, cfg.r_cell)?;
    let order = open_tour(&layout.positions);
    StopPointSchedule::new(
        order.iter().map(|&i| layout.positions[i]).collect(),
        cfg.altitude,
        cfg.r_cell,
    )
}

fn eval_row(run: &RunConfig, var: SweepVariable, x: f64, spec: &SweepSpec, settings: &SweepSettings) -> Result<Vec<f64>> {
    let mut cfg = run.system;
    let mut m = None;
    let mut opts = settings.plan;
    match var {
        SweepVariable::Beta => cfg.beta = to_linear_db(x),
        SweepVariable::Altitude => {
            cfg.altitude = x;
            opts.altitude = AltitudeChoice::Fixed;
        }
        SweepVariable::LambdaD => cfg.lambda_d = x,
        SweepVariable::D0 => cfg.d0 = x,
        SweepVariable::M => m = Some(x as usize),
    }
    cfg.validate()?;
    let quad = QuadratureSpec::default();
    let center = UserPosition::at_range(0.0);
    let wants = |f: fn(Metric) -> bool| spec.outputs.iter().any(|&o| f(o));

    let du_bounds = if wants(|o| matches!(o, Metric::DuLower | Metric::DuUpper)) {
        Some(du_coverage_avg_bounds(&cfg, &quad)?)
    } else {
        None
    };
    let rates = if wants(|o| matches!(o, Metric::DuRate | Metric::D2dRate | Metric::SumRate)) {
        Some(avg_rates(&cfg, &quad)?)
    } else {
        None
    };
    let center_bounds = if wants(|o| matches!(o, Metric::DuCenterLower | Metric::DuCenterUpper)) {
        Some(du_coverage_point_bounds(&cfg, &center)?)
    } else {
        None
    };
    let mc_plan = TrialPlan::for_config(&cfg, settings.trials, settings.seed);
    let mc_center = if wants(|o| matches!(o, Metric::McD2dCenter | Metric::McDuCenter)) {
        Some(simulate_coverage_sweep(&cfg, &[center], &mc_plan, &[cfg.beta], &[cfg.lambda_d])?)
    } else {
        None
    };
    let schedule = if wants(|o| matches!(o, Metric::Outage | Metric::McOutage)) {
        Some(tour_schedule(&cfg, m.unwrap_or(1))?)
    } else {
        None
    };
    let plan = if wants(Metric::is_plan) {
        Some(plan_summary(&cfg, run.epsilon, m, &opts)?)
    } else {
        None
    };

    spec.outputs
        .iter()
        .map(|&metric| {
            Ok(match metric {
                Metric::D2dCoverage => d2d_coverage_avg(&cfg, &quad)?,
                Metric::D2dNoUav => d2d_coverage_no_uav(&cfg)?,
                Metric::DuLower => du_bounds.expect("computed").lower,
                Metric::DuUpper => du_bounds.expect("computed").upper,
                Metric::DuNoD2d => du_coverage_no_d2d(&cfg, &quad)?,
                Metric::DuRate => rates.expect("computed").0,
                Metric::D2dRate => rates.expect("computed").1,
                Metric::SumRate => {
                    let (du, d2d) = rates.expect("computed");
                    let area = std::f64::consts::PI * cfg.r_cell * cfg.r_cell;
                    area * (cfg.lambda_du * du + cfg.lambda_d * d2d)
                }
                Metric::D2dCenter => d2d_coverage_point(&cfg, &center)?,
                Metric::DuCenterLower => center_bounds.expect("computed").lower,
                Metric::DuCenterUpper => center_bounds.expect("computed").upper,
                Metric::McD2dCenter => mc_center.as_ref().expect("computed").d2d[0].mean,
                Metric::McDuCenter => mc_center.as_ref().expect("computed").du[0].mean,
                Metric::Outage => d2d_outage_multislot(&cfg, schedule.as_ref().expect("computed"), &center, &quad)?,
                Metric::McOutage => {
                    let s = schedule.as_ref().expect("computed");
                    simulate_outage_multislot(&cfg, s, &center, &mc_plan.with_slots(s.len()))?.mean
                }
                Metric::PlanAltitude => plan.as_ref().expect("computed").altitude,
                Metric::CoverageRadius => plan.as_ref().expect("computed").coverage_radius,
                Metric::Stops => plan.as_ref().expect("computed").m,
                Metric::DiskRadius => plan.as_ref().expect("computed").disk_radius,
                Metric::PUavMin => plan.as_ref().expect("computed").p_uav_min,
                Metric::TravelTime => plan.as_ref().expect("computed").delay.travel_time,
                Metric::Delay => plan.as_ref().expect("computed").delay.total,
            })
        })
        .collect()
}

/// Evaluates every metric at every grid value. Rows run in parallel; each
/// row's Monte Carlo draws depend only on the seed, so the output does not
/// depend on the thread count.
pub fn run_sweep(run: &RunConfig, spec: &SweepSpec, settings: &SweepSettings) -> Result<RunRecord> {
    run.validate()?;
    spec.validate()?;
    let rows = spec
        .grid
        .par_iter()
        .map(|&x| eval_row(run, spec.variable, x, spec, settings))
        .collect::<Result<Vec<_>>>()?;
    let columns = (0..spec.outputs.len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    Ok(RunRecord {
        tool: format!("uavd2d {}", crate::VERSION),
        config: *run,
        seed: settings.seed,
        trials: settings.trials,
        spec: spec.clone(),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("100:500:100").unwrap(), vec![100.0, 200.0, 300.0, 400.0, 500.0]);
        assert_eq!(parse_grid("0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_grid("1e-4,2e-4").unwrap(), vec![1e-4, 2e-4]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::parse("beta=0:20:5", "d2d_coverage,du_lower").is_ok());
        assert!(SweepSpec::parse("beta=5,1", "d2d_coverage").is_err());
        assert!(SweepSpec::parse("m=1,2.5", "stops").is_err());
        assert!(SweepSpec::parse("gamma=1", "stops").is_err());
        let e = SweepSpec::parse("beta=1", "bogus").unwrap_err().to_string();
        assert!(e.contains("sum_rate") && e.contains("bogus"));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.1), "0.1");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(123456789012.0), "1.23456789e11");
        assert_eq!(format_sig9(1e-15), "1e-15");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(f64::NAN), "nan");
        assert_eq!(format_sig9(2.0 / 3.0 * 1e-5), "6.66666667e-6");
    }

    #[test]
    fn columns_follow_declaration_order() {
        let spec = SweepSpec::parse("beta=0:10:5", "du_upper,d2d_coverage,du_lower").unwrap();
        let rec = run_sweep(&RunConfig::default(), &spec, &SweepSettings::default()).unwrap();
        let csv = rec.to_csv();
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "beta_db,du_upper,d2d_coverage,du_lower");
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
        let lo = rec.column(Metric::DuLower).unwrap();
        let hi = rec.column(Metric::DuUpper).unwrap();
        assert!(lo.iter().zip(hi).all(|(l, h)| l <= h));
        let d2d = rec.column(Metric::D2dCoverage).unwrap();
        assert!(d2d.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn m_sweep_plan_columns() {
        let spec = SweepSpec::parse("m=1,3,4", "stops,travel_time,outage").unwrap();
        let settings = SweepSettings {
            plan: PlanOptions::fixed_altitude(),
            ..SweepSettings::default()
        };
        let rec = run_sweep(&RunConfig::default(), &spec, &settings).unwrap();
        assert_eq!(rec.column(Metric::Stops).unwrap(), &[1.0, 3.0, 4.0]);
        let tt = rec.column(Metric::TravelTime).unwrap();
        assert_eq!(tt[0], 0.0);
        assert!((tt[1] - 3f64.sqrt() * 100.0).abs() < 1e-9);
        assert!((tt[2] - 300.0).abs() < 1e-9);
        let out = rec.column(Metric::Outage).unwrap();
        assert!(out[1] > out[0]);
        assert!(out.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}
