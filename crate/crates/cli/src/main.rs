use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use uavd2d_core::analytic::{
    d2d_coverage_avg, d2d_coverage_no_uav, du_coverage_avg_bounds, du_coverage_no_d2d, sum_rate,
};
use uavd2d_core::planner::{
    certify_cover, min_stop_points, AltitudeChoice, MissionParams, CERTIFICATE_GRID,
};
use uavd2d_core::sweep::{run_sweep, SweepSettings};
use uavd2d_core::validation::{run_validation, ValidationOptions};
use uavd2d_core::{AccessMode, Error, PlanOptions, QuadratureSpec, RunConfig, SweepSpec};

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(name = "uavd2d", version, about = "UAV and D2D coverage, rate and planning toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration value, e.g. --set beta=10dB. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 100_000, global = true)]
    trials: u64,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Coverage target for planning.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltitudeArg {
    /// Keep the configured altitude.
    Fixed,
    /// Maximize the coverage radius.
    Radius,
    /// Maximize the cell-averaged downlink coverage.
    Du,
}

impl From<AltitudeArg> for AltitudeChoice {
    fn from(a: AltitudeArg) -> Self {
        match a {
            AltitudeArg::Fixed => AltitudeChoice::Fixed,
            AltitudeArg::Radius => AltitudeChoice::MaxCoverageRadius,
            AltitudeArg::Du => AltitudeChoice::MaxDuCoverage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AccessArg {
    Tdma,
    Fdma,
}

#[derive(Args)]
struct PlanArgs {
    /// Altitude used for planning.
    #[arg(long, value_enum, default_value_t = AltitudeArg::Radius)]
    plan_altitude: AltitudeArg,
    /// Service time in seconds, per user for TDMA or per stop for FDMA.
    #[arg(long, default_value_t = 20.0)]
    service_time: f64,
    /// UAV speed in m/s.
    #[arg(long, default_value_t = 10.0)]
    speed: f64,
    #[arg(long, value_enum, default_value_t = AccessArg::Fdma)]
    access: AccessArg,
}

impl PlanArgs {
    fn options(&self) -> PlanOptions {
        PlanOptions {
            altitude: self.plan_altitude.into(),
            mission: MissionParams {
                t_service: self.service_time,
                speed: self.speed,
                access: match self.access {
                    AccessArg::Tdma => AccessMode::Tdma,
                    AccessArg::Fdma => AccessMode::Fdma,
                },
            },
            ..PlanOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coverage and sum rate for one configuration.
    Coverage,
    /// Sweep one parameter and write CSV.
    Sweep {
        /// var=a:b:step or var=v1,v2,... with var one of beta (dB), altitude, lambda_d, d0, m.
        #[arg(long)]
        sweep: String,
        /// Comma-separated metric names.
        #[arg(long)]
        metrics: String,
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Stop points, power and delay for the coverage target.
    Plan {
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Compare analytic results against simulation.
    Validate,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            Error::InvalidConfig { .. }
            | Error::Parse(_)
            | Error::DivergentInterference { .. }
            | Error::TruncationTooSmall { .. }
            | Error::DegenerateGeometry => EXIT_CONFIG,
            Error::Quadrature { .. } | Error::LayoutCoverage { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| Failure {
            code: EXIT_CONFIG,
            message: format!("{}: {e}", path.display()),
        })?;
        cfg.apply_text(&text)?;
    }
    for s in &common.set {
        cfg.apply(s)?;
    }
    if let Some(eps) = common.epsilon {
        cfg.epsilon = eps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn config_preamble(cfg: &RunConfig, common: &Common) -> String {
    let mut s = format!(
        "# tool=uavd2d {}\n# seed={}\n# trials={}\n",
        uavd2d_core::VERSION,
        common.seed,
        common.trials
    );
    for (k, v) in cfg.pairs() {
        s.push_str(&format!("# {k}={v}\n"));
    }
    s
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(io_failure),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io_failure)
        }
    }
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    tool: String,
    seed: u64,
    trials: u64,
    config: &'a RunConfig,
    result: T,
}

fn json<T: Serialize>(cfg: &RunConfig, common: &Common, result: T) -> String {
    let rec = Record {
        tool: format!("uavd2d {}", uavd2d_core::VERSION),
        seed: common.seed,
        trials: common.trials,
        config: cfg,
        result,
    };
    serde_json::to_string_pretty(&rec).expect("records serialize") + "\n"
}

#[derive(Serialize)]
struct CoverageResult {
    d2d_coverage: Option<f64>,
    d2d_no_uav: Option<f64>,
    du_lower: f64,
    du_upper: f64,
    du_no_d2d: f64,
    sum_rate: f64,
}

fn cmd_coverage(cfg: &RunConfig, common: &Common) -> Result<String, Failure> {
    let c = &cfg.system;
    let quad = QuadratureSpec::default();
    let has_d2d = c.lambda_d > 0.0;
    let du = du_coverage_avg_bounds(c, &quad)?;
    let r = CoverageResult {
        d2d_coverage: if has_d2d { Some(d2d_coverage_avg(c, &quad)?) } else { None },
        d2d_no_uav: if has_d2d { Some(d2d_coverage_no_uav(c)?) } else { None },
        du_lower: du.lower,
        du_upper: du.upper,
        du_no_d2d: du_coverage_no_d2d(c, &quad)?,
        sum_rate: sum_rate(c, &quad)?,
    };
    if common.format == Format::Json {
        return Ok(json(cfg, common, r));
    }
    let mut s = config_preamble(cfg, common);
    if let (Some(a), Some(b)) = (r.d2d_coverage, r.d2d_no_uav) {
        s.push_str(&format!("d2d_coverage {a:.9}\nd2d_no_uav {b:.9}\n"));
    }
    s.push_str(&format!(
        "du_lower {:.9}\ndu_upper {:.9}\ndu_no_d2d {:.9}\nsum_rate {:.9e}\n",
        r.du_lower, r.du_upper, r.du_no_d2d, r.sum_rate
    ));
    Ok(s)
}

fn cmd_sweep(cfg: &RunConfig, common: &Common, sweep: &str, metrics: &str, plan: &PlanArgs) -> Result<String, Failure> {
    let spec = SweepSpec::parse(sweep, metrics)?;
    let settings = SweepSettings {
        trials: common.trials,
        seed: common.seed,
        plan: plan.options(),
    };
    let rec = run_sweep(cfg, &spec, &settings)?;
    Ok(match common.format {
        Format::Text => rec.to_csv(),
        Format::Json => serde_json::to_string_pretty(&rec).expect("records serialize") + "\n",
    })
}

#[derive(Serialize)]
struct PlanResult {
    plan: uavd2d_core::StopPlan,
    certificate: bool,
}

fn cmd_plan(cfg: &RunConfig, common: &Common, plan: &PlanArgs) -> Result<String, Failure> {
    let p = min_stop_points(&cfg.system, cfg.epsilon, &plan.options())?;
    let certificate = certify_cover(&p.positions, p.disk_radius * (1.0 + 1e-6), cfg.system.r_cell, CERTIFICATE_GRID);
    if common.format == Format::Json {
        return Ok(json(cfg, common, PlanResult { plan: p, certificate }));
    }
    let mut s = config_preamble(cfg, common);
    s.push_str(&format!(
        "epsilon {}\naltitude {:.3}\ncoverage_radius {:.3}\nm {}\ndisk_radius {:.3}\np_uav_min {:.6e}\n",
        p.epsilon, p.altitude, p.coverage_radius, p.m, p.disk_radius, p.p_uav_min
    ));
    s.push_str(&format!(
        "travel_time {:.3}\nresidence_total {:.3}\ndelay {:.3}\n",
        p.delay.travel_time, p.delay.residence_total, p.delay.total
    ));
    s.push_str(&format!("certificate {}\n", if certificate { "pass" } else { "fail" }));
    s.push_str("stops (tour order)\n");
    for q in &p.positions {
        s.push_str(&format!("  {:.3} {:.3}\n", q[0], q[1]));
    }
    if !certificate {
        return Err(Failure {
            code: 1,
            message: format!("{s}coverage certificate failed"),
        });
    }
    Ok(s)
}

fn cmd_validate(cfg: &RunConfig, common: &Common) -> Result<String, Failure> {
    let opts = ValidationOptions {
        trials: common.trials,
        seed: common.seed,
        ..ValidationOptions::default()
    };
    let report = run_validation(&cfg.system, &opts)?;
    let text = match common.format {
        Format::Json => json(cfg, common, &report),
        Format::Text => {
            let mut s = config_preamble(cfg, common);
            for c in &report.checks {
                s.push_str(&format!(
                    "{} {}: error {:.3e} tolerance {:.3e} margin {:.3e} ({})\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.error,
                    c.tolerance,
                    c.margin,
                    c.detail
                ));
            }
            s
        }
    };
    if report.passed() {
        Ok(text)
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        emit(common, &text)?;
        Err(Failure {
            code: EXIT_VALIDATION,
            message: format!("failed checks: {}", names.join(", ")),
        })
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    let cfg = load_config(common)?;
    let text = match &cli.command {
        Command::Coverage => cmd_coverage(&cfg, common)?,
        Command::Sweep { sweep, metrics, plan } => cmd_sweep(&cfg, common, sweep, metrics, plan)?,
        Command::Plan { plan } => cmd_plan(&cfg, common, plan)?,
        Command::Validate => cmd_validate(&cfg, common)?,
    };
    emit(common, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
