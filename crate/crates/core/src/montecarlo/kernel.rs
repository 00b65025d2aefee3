use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// `q^(-alpha/2)` with fast paths for the common exponents.
#[inline(always)]
fn path_gain(q: f64, alpha: f64) -> f64 {
    if alpha == 3.0 {
        1.0 / (q * q.sqrt())
    } else if alpha == 4.0 {
        1.0 / (q * q)
    } else {
        q.powf(-0.5 * alpha)
    }
}

/// Aggregate interference of a unit-density, unit-power Rayleigh field seen
/// at the origin, one value per fading stream in `fading`.
///
/// Points arrive in order of increasing area `pi r^2` until it exceeds
/// `area_limit`. All streams share the point positions.
pub(crate) fn unit_interference<F: Rng, S: Rng>(field: &mut F, fading: &mut [S], area_limit: f64, alpha: f64, out: &mut [f64]) {
    debug_assert_eq!(fading.len(), out.len());
    out.iter_mut().for_each(|o| *o = 0.0);
    let mut area = 0.0;
    match fading {
        [one] => {
            let mut acc = 0.0;
            loop {
                let e: f64 = Exp1.sample(field);
                area += e;
                if area > area_limit {
                    break;
                }
                let g: f64 = Exp1.sample(one);
                acc += g * path_gain(area / PI, alpha);
            }
            out[0] = acc;
        }
        _ => loop {
            let e: f64 = Exp1.sample(field);
            area += e;
            if area > area_limit {
                break;
            }
            let w = path_gain(area / PI, alpha);
            for (rng, o) in fading.iter_mut().zip(out.iter_mut()) {
                let g: f64 = Exp1.sample(rng);
                *o += g * w;
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;

    #[test]
    fn gain_fast_paths_agree() {
        for q in [0.3, 1.0, 17.5, 1e6] {
            for a in [3.0, 4.0] {
                let fast = path_gain(q, a);
                let slow = q.powf(-0.5 * a);
                assert!(((fast - slow) / slow).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn laplace_transform_matches_pgfl() {
        // E[exp(-s I)] = exp(-int_0^A s w(a) / (1 + s w(a)) da), w(a) = (a/pi)^(-alpha/2)
        let (alpha, area_limit, s) = (3.0, 500.0, 0.5);
        let trials = 40_000u64;
        let mut acc = 0.0;
        let mut out = [0.0];
        for t in 0..trials {
            let mut f = trial_rng(5, t, 0);
            let mut g = [trial_rng(5, t, 1)];
            unit_interference(&mut f, &mut g, area_limit, alpha, &mut out);
            acc += (-s * out[0]).exp();
        }
        let emp = acc / trials as f64;
        let n = 1_000_000;
        let h = area_limit / n as f64;
        let mut integral = 0.0;
        for i in 0..n {
            let a = (i as f64 + 0.5) * h;
            let w = path_gain(a / PI, alpha);
            integral += s * w / (1.0 + s * w) * h;
        }
        let expect = (-integral).exp();
        assert!((emp - expect).abs() < 0.01, "{emp} vs {expect}");
    }
}
