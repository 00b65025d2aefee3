use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::unit_interference;
use super::streams::{trial_rng, DU_AUX, FIELD, FIELD_BASE};
use super::{EstimateWithCI, TrialPlan};
use crate::analytic::StopPointSchedule;
use crate::error::{Error, Result};
use crate::model::{los_probability_at_elevation, LinkGeometry, SystemConfig, UserPosition};

const CHUNK: u64 = 512;

/// Runs `trials` trials in fixed-size chunks and sums integer counters, so
/// the result does not depend on the number of worker threads.
fn run_trials<S, I, F>(trials: u64, counters: usize, init: I, trial: F) -> Vec<u64>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, u64, &mut [u64]) + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut state = init();
            let mut counts = vec![0u64; counters];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                trial(&mut state, t, &mut counts);
            }
            counts
        })
        .reduce(
            || vec![0u64; counters],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Area limit of the unit-density field equivalent to the plan's truncation
/// disk at the reference density.
fn area_limit(cfg: &SystemConfig, plan: &TrialPlan, densities: &[f64]) -> f64 {
    let reference = if cfg.lambda_d > 0.0 {
        cfg.lambda_d
    } else {
        densities.iter().copied().fold(0.0, f64::max)
    };
    PI * reference * plan.trunc_radius * plan.trunc_radius
}

struct UavLink {
    p_los: f64,
    los_power: f64,
    nlos_power: f64,
}

impl UavLink {
    fn new(cfg: &SystemConfig, altitude: f64, ground_range: f64) -> Result<Self> {
        let g = LinkGeometry::new(altitude, ground_range)?;
        let los_power = cfg.k_loss * cfg.p_uav * g.slant_range.powf(-cfg.alpha_u);
        Ok(UavLink {
            p_los: los_probability_at_elevation(g.elevation_deg, &cfg.env),
            los_power,
            nlos_power: los_power * cfg.env.eta_nlos,
        })
    }

    fn power(&self, u: f64) -> f64 {
        if u < self.p_los {
            self.los_power
        } else {
            self.nlos_power
        }
    }
}

/// Joint D2D and downlink coverage estimates over a grid of receiver
/// positions, D2D densities and thresholds, all from the same draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSweep {
    pub positions: Vec<UserPosition>,
    pub densities: Vec<f64>,
    pub betas: Vec<f64>,
    pub d2d: Vec<EstimateWithCI>,
    pub du: Vec<EstimateWithCI>,
}

impl CoverageSweep {
    fn index(&self, pos: usize, density: usize, beta: usize) -> usize {
        (pos * self.densities.len() + density) * self.betas.len() + beta
    }

    pub fn d2d_at(&self, pos: usize, density: usize, beta: usize) -> EstimateWithCI {
        self.d2d[self.index(pos, density, beta)]
    }

    pub fn du_at(&self, pos: usize, density: usize, beta: usize) -> EstimateWithCI {
        self.du[self.index(pos, density, beta)]
    }
}

/// Coverage of a D2D receiver and of a downlink user at every
/// (position, density, beta) combination.
///
/// `plan.trunc_radius` applies at `cfg.lambda_d`; other densities use the
/// radius holding the same expected number of interferers. Each trial draws
/// one interference sample and one LoS state per receiver type, shared by
/// all grid points, so the estimates are monotone in beta and density.
pub fn simulate_coverage_sweep(
    cfg: &SystemConfig,
    positions: &[UserPosition],
    plan: &TrialPlan,
    betas: &[f64],
    densities: &[f64],
) -> Result<CoverageSweep> {
    plan.validate(cfg)?;
    if positions.is_empty() || betas.is_empty() || densities.is_empty() {
        return Err(Error::config("sweep", "positions, betas and densities must be non-empty"));
    }
    if betas.iter().any(|&b| !(b >= 0.0)) || densities.iter().any(|&d| !(d >= 0.0)) {
        return Err(Error::config("sweep", "betas and densities must be non-negative"));
    }
    let links = positions
        .iter()
        .map(|p| UavLink::new(cfg, cfg.altitude, p.r))
        .collect::<Result<Vec<_>>>()?;
    let limit = area_limit(cfg, plan, densities);
    let alpha = cfg.alpha_d;
    let kpd = cfg.k_loss * cfg.p_d2d;
    let scale: Vec<f64> = densities.iter().map(|&l| kpd * l.powf(0.5 * alpha)).collect();
    let signal = kpd * cfg.d0.powf(-alpha);
    let (nd, nb) = (densities.len(), betas.len());
    let per_kind = positions.len() * nd * nb;
    let seed = plan.seed;

    let counts = run_trials(
        plan.trials,
        2 * per_kind,
        || [0.0f64],
        |j, t, counts| {
            let mut slot = [trial_rng(seed, t, 1)];
            let u_los: f64 = slot[0].gen();
            let g0: f64 = Exp1.sample(&mut slot[0]);
            let u_du: f64 = trial_rng(seed, t, DU_AUX).gen();
            let mut field = trial_rng(seed, t, FIELD);
            unit_interference(&mut field, &mut slot, limit, alpha, j);
            let desired = g0 * signal;
            for (p, link) in links.iter().enumerate() {
                let uav_at_d2d = link.power(u_los);
                let uav_at_du = link.power(u_du);
                for (d, s) in scale.iter().enumerate() {
                    let interference = s * j[0];
                    let base = (p * nd + d) * nb;
                    for (b, &beta) in betas.iter().enumerate() {
                        if desired >= beta * (interference + uav_at_d2d + cfg.noise) {
                            counts[base + b] += 1;
                        }
                        if uav_at_du >= beta * (interference + cfg.noise) {
                            counts[per_kind + base + b] += 1;
                        }
                    }
                }
            }
        },
    );
    let est = |c: &[u64]| c.iter().map(|&k| EstimateWithCI::from_counts(k, plan.trials)).collect();
    Ok(CoverageSweep {
        positions: positions.to_vec(),
        densities: densities.to_vec(),
        betas: betas.to_vec(),
        d2d: est(&counts[..per_kind]),
        du: est(&counts[per_kind..]),
    })
}

/// D2D coverage at `pos`, with the UAV hovering above the origin.
pub fn simulate_d2d_coverage(cfg: &SystemConfig, pos: &UserPosition, plan: &TrialPlan) -> Result<EstimateWithCI> {
    let s = simulate_coverage_sweep(cfg, &[*pos], plan, &[cfg.beta], &[cfg.lambda_d])?;
    Ok(s.d2d[0])
}

/// Downlink coverage at `pos`.
pub fn simulate_du_coverage(cfg: &SystemConfig, pos: &UserPosition, plan: &TrialPlan) -> Result<EstimateWithCI> {
    let s = simulate_coverage_sweep(cfg, &[*pos], plan, &[cfg.beta], &[cfg.lambda_d])?;
    Ok(s.du[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSharing {
    /// One interferer field per trial, common to all slots.
    Shared,
    /// A fresh field per slot.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LosDraw {
    /// Fresh LoS/NLoS state per slot.
    PerSlot,
    /// One uniform per trial compared against every slot's LoS probability.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultislotOptions {
    pub field: FieldSharing,
    pub los: LosDraw,
}

impl Default for MultislotOptions {
    fn default() -> Self {
        MultislotOptions {
            field: FieldSharing::Shared,
            los: LosDraw::PerSlot,
        }
    }
}

/// Probability that at least one scheduled slot fails, with interferer
/// positions shared across slots and fading drawn per slot.
pub fn simulate_outage_multislot(
    cfg: &SystemConfig,
    schedule: &StopPointSchedule,
    pos: &UserPosition,
    plan: &TrialPlan,
) -> Result<EstimateWithCI> {
    simulate_outage_multislot_with(cfg, schedule, pos, plan, MultislotOptions::default())
}

pub fn simulate_outage_multislot_with(
    cfg: &SystemConfig,
    schedule: &StopPointSchedule,
    pos: &UserPosition,
    plan: &TrialPlan,
    opts: MultislotOptions,
) -> Result<EstimateWithCI> {
    plan.validate(cfg)?;
    let m = schedule.len();
    if m == 0 || plan.slots != m {
        return Err(Error::config(
            "slots",
            format!("plan has {} slots but the schedule has {m} stops", plan.slots),
        ));
    }
    let xy = pos.xy();
    let links = (0..m)
        .map(|i| UavLink::new(cfg, schedule.altitude, schedule.ground_range(i, xy)))
        .collect::<Result<Vec<_>>>()?;
    let limit = area_limit(cfg, plan, &[cfg.lambda_d]);
    let alpha = cfg.alpha_d;
    let kpd = cfg.k_loss * cfg.p_d2d;
    let scale = kpd * cfg.lambda_d.powf(0.5 * alpha);
    let signal = kpd * cfg.d0.powf(-alpha);
    let seed = plan.seed;

    let failures = run_trials(
        plan.trials,
        1,
        || (vec![0.0f64; m], Vec::with_capacity(m), vec![0.0f64; m], vec![0.0f64; m]),
        |(j, rngs, u, g0), t, counts| {
            rngs.clear();
            for i in 0..m {
                let mut r = trial_rng(seed, t, i as u64 + 1);
                u[i] = r.gen();
                g0[i] = Exp1.sample(&mut r);
                rngs.push(r);
            }
            match opts.field {
                FieldSharing::Shared => {
                    let mut field = trial_rng(seed, t, FIELD);
                    unit_interference(&mut field, rngs, limit, alpha, j);
                }
                FieldSharing::Independent => {
                    for i in 0..m {
                        let mut field = trial_rng(seed, t, FIELD_BASE + i as u64 + 1);
                        unit_interference(&mut field, &mut rngs[i..i + 1], limit, alpha, &mut j[i..i + 1]);
                    }
                }
            }
            let failed = (0..m).any(|i| {
                let draw = match opts.los {
                    LosDraw::PerSlot => u[i],
                    LosDraw::Frozen => u[0],
                };
                g0[i] * signal < cfg.beta * (scale * j[i] + links[i].power(draw) + cfg.noise)
            });
            if failed {
                counts[0] += 1;
            }
        },
    );
    Ok(EstimateWithCI::from_counts(failures[0], plan.trials))
}

/// Empirical CDF `P[I_d <= t]` of the aggregate D2D interference.
pub fn simulate_interference_cdf(cfg: &SystemConfig, plan: &TrialPlan, t_grid: &[f64]) -> Result<Vec<EstimateWithCI>> {
    plan.validate(cfg)?;
    let limit = area_limit(cfg, plan, &[cfg.lambda_d]);
    let alpha = cfg.alpha_d;
    let scale = cfg.k_loss * cfg.p_d2d * cfg.lambda_d.powf(0.5 * alpha);
    let seed = plan.seed;
    let counts = run_trials(
        plan.trials,
        t_grid.len(),
        || [0.0f64],
        |j, t, counts| {
            let mut slot = [trial_rng(seed, t, 1)];
            let mut field = trial_rng(seed, t, FIELD);
            unit_interference(&mut field, &mut slot, limit, alpha, j);
            let i = scale * j[0];
            for (c, &x) in counts.iter_mut().zip(t_grid) {
                if i <= x {
                    *c += 1;
                }
            }
        },
    );
    Ok(counts
        .into_iter()
        .map(|k| EstimateWithCI::from_counts(k, plan.trials))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{d2d_coverage_point, d2d_outage_multislot};
    use crate::quadrature::QuadratureSpec;

    fn cfg() -> SystemConfig {
        SystemConfig {
            p_uav: 0.05,
            ..SystemConfig::default()
        }
    }

    fn plan(c: &SystemConfig, trials: u64) -> TrialPlan {
        TrialPlan::for_config(c, trials, 7)
    }

    #[test]
    fn zero_threshold_always_covers() {
        let c = cfg();
        let s = simulate_coverage_sweep(&c, &[UserPosition::at_range(300.0)], &plan(&c, 2000), &[0.0], &[c.lambda_d])
            .unwrap();
        assert_eq!(s.d2d[0].mean, 1.0);
        assert_eq!(s.du[0].mean, 1.0);
    }

    #[test]
    fn single_slot_outage_is_the_complement_of_coverage() {
        let c = cfg();
        let pos = UserPosition::new(250.0, 1.0).unwrap();
        let p = plan(&c, 4000);
        let cov = simulate_d2d_coverage(&c, &pos, &p).unwrap();
        let sched = StopPointSchedule::repeated([0.0, 0.0], 1, c.altitude);
        let out = simulate_outage_multislot(&c, &sched, &pos, &p).unwrap();
        assert_eq!(out.mean, 1.0 - cov.mean);
    }

    #[test]
    fn failures_nest_as_slots_are_added() {
        let c = cfg();
        let pos = UserPosition::at_range(100.0);
        let mut prev = 0.0;
        for m in 1..=6 {
            let sched = StopPointSchedule::repeated([100.0, 0.0], m, c.altitude);
            let out = simulate_outage_multislot(&c, &sched, &pos, &plan(&c, 3000).with_slots(m)).unwrap();
            assert!(out.mean >= prev, "m={m}");
            prev = out.mean;
        }
    }

    #[test]
    fn shared_field_correlates_successes() {
        let c = cfg();
        let pos = UserPosition::at_range(0.0);
        let m = 5;
        let sched = StopPointSchedule::repeated([0.0, 0.0], m, c.altitude);
        let p = plan(&c, 20_000).with_slots(m);
        let shared = simulate_outage_multislot(&c, &sched, &pos, &p).unwrap();
        let indep = simulate_outage_multislot_with(
            &c,
            &sched,
            &pos,
            &p,
            MultislotOptions {
                field: FieldSharing::Independent,
                los: LosDraw::PerSlot,
            },
        )
        .unwrap();
        let slack = 3.0 * (shared.sigma().powi(2) + indep.sigma().powi(2)).sqrt();
        assert!(shared.mean < indep.mean - slack, "{shared:?} {indep:?}");
    }

    #[test]
    fn multislot_matches_the_analytic_outage() {
        let c = cfg();
        let pos = UserPosition::new(300.0, 0.5).unwrap();
        let sched = StopPointSchedule::new(vec![[0.0, 0.0], [400.0, 0.0], [-200.0, 300.0]], c.altitude, c.r_cell).unwrap();
        let mc = simulate_outage_multislot(&c, &sched, &pos, &plan(&c, 20_000).with_slots(3)).unwrap();
        let exact = d2d_outage_multislot(&c, &sched, &pos, &QuadratureSpec::default()).unwrap();
        assert!((mc.mean - exact).abs() <= (3.0 * mc.sigma()).max(0.015), "{mc:?} vs {exact}");
    }

    #[test]
    fn coverage_matches_the_analytic_value() {
        let c = cfg();
        let pos = UserPosition::new(200.0, 2.0).unwrap();
        let mc = simulate_d2d_coverage(&c, &pos, &plan(&c, 20_000)).unwrap();
        let exact = d2d_coverage_point(&c, &pos).unwrap();
        assert!((mc.mean - exact).abs() <= (3.0 * mc.sigma()).max(0.01), "{mc:?} vs {exact}");
    }

    #[test]
    fn slot_count_must_match_the_schedule() {
        let c = cfg();
        let sched = StopPointSchedule::repeated([0.0, 0.0], 3, c.altitude);
        let r = simulate_outage_multislot(&c, &sched, &UserPosition::at_range(0.0), &plan(&c, 10));
        assert!(r.is_err());
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let c = cfg();
        let pos = [UserPosition::at_range(0.0), UserPosition::at_range(700.0)];
        let p = plan(&c, 3000);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_coverage_sweep(&c, &pos, &p, &[1.0, 3.0], &[1e-4, 2e-4]).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn sweep_estimates_are_monotone() {
        let c = cfg();
        let betas = [0.5, 1.0, 3.0, 10.0];
        let dens = [0.5e-4, 1e-4, 2e-4];
        let s = simulate_coverage_sweep(&c, &[UserPosition::at_range(400.0)], &plan(&c, 2000), &betas, &dens).unwrap();
        for d in 0..dens.len() {
            for b in 1..betas.len() {
                assert!(s.d2d_at(0, d, b).mean <= s.d2d_at(0, d, b - 1).mean);
                assert!(s.du_at(0, d, b).mean <= s.du_at(0, d, b - 1).mean);
            }
        }
        for b in 0..betas.len() {
            for d in 1..dens.len() {
                assert!(s.d2d_at(0, d, b).mean <= s.d2d_at(0, d - 1, b).mean);
            }
        }
    }
}
