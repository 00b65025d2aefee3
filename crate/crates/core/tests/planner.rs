use std::f64::consts::PI;

use proptest::prelude::*;
use uavd2d_core::planner::{
    certify_cover, layout_radius, min_stop_points, min_transmit_power, open_tour, path_length, stop_point_layout,
    stops_for_radius, uav_coverage_radius, CERTIFICATE_GRID,
};
use uavd2d_core::{AccessMode, Error, PlanOptions, SystemConfig};

const R_CELL: f64 = 1000.0;

fn rotate(points: &[[f64; 2]], theta: f64) -> Vec<[f64; 2]> {
    let (s, c) = theta.sin_cos();
    points.iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect()
}

fn tour_length(points: &[[f64; 2]]) -> f64 {
    path_length(points, &open_tour(points))
}

#[test]
fn layouts_cover_the_cell_and_shrink() {
    let mut prev = f64::INFINITY;
    for m in 1..=40 {
        let l = stop_point_layout(m, R_CELL).unwrap();
        assert!(l.positions.len() <= m);
        assert!(certify_cover(&l.positions, l.radius * (1.0 + 1e-6), R_CELL, CERTIFICATE_GRID), "m={m}");
        // Plateaus of the lattice search agree only to the bisection tolerance.
        assert!(l.radius <= prev * (1.0 + 1e-8), "m={m}: {} after {prev}", l.radius);
        prev = l.radius;
    }
}

#[test]
fn shrunken_layouts_leave_holes() {
    for m in 3..=12 {
        let l = stop_point_layout(m, R_CELL).unwrap();
        assert!(!certify_cover(&l.positions, 0.97 * l.radius, R_CELL, CERTIFICATE_GRID), "m={m}");
    }
}

#[test]
fn tours_visit_every_stop_once() {
    for m in 1..=30 {
        let l = stop_point_layout(m, R_CELL).unwrap();
        let mut order = open_tour(&l.positions);
        order.sort_unstable();
        assert_eq!(order, (0..l.positions.len()).collect::<Vec<_>>());
    }
}

#[test]
fn plan_is_consistent() {
    let cfg = SystemConfig::default();
    let p = min_stop_points(&cfg, 0.5, &PlanOptions::fixed_altitude()).unwrap();
    assert_eq!(p.altitude, cfg.altitude);
    assert_eq!(p.m, p.positions.len());
    assert!(p.disk_radius <= p.coverage_radius + 1e-6);
    assert!(p.p_uav_min <= cfg.p_uav);
    assert!(certify_cover(&p.positions, p.disk_radius * (1.0 + 1e-6), R_CELL, CERTIFICATE_GRID));
    assert!((p.delay.total - p.delay.travel_time - p.delay.residence_total).abs() < 1e-9);
    assert_eq!(p.delay.residence_total, 20.0 * p.m as f64);
    // At the minimized power the UAV still reaches the layout radius.
    let at = SystemConfig {
        p_uav: p.p_uav_min,
        ..cfg
    };
    assert!(uav_coverage_radius(&at, 0.5).unwrap() >= p.disk_radius - 0.1);
}

#[test]
fn tdma_residence_scales_with_the_served_area() {
    let cfg = SystemConfig::default();
    let p = min_stop_points(&cfg, 0.5, &PlanOptions::fixed_altitude()).unwrap();
    let d = uavd2d_core::planner::mission_delay(&cfg, &p, 2.0, 10.0, AccessMode::Tdma).unwrap();
    let users = cfg.lambda_du * PI * R_CELL * R_CELL;
    let expected = p.m as f64 * 2.0 * (p.disk_radius / R_CELL).powi(2) * users;
    assert!((d.residence_total - expected).abs() < 1e-9 * expected);
    assert_eq!(d.travel_time, p.delay.travel_time);
}

#[test]
fn target_out_of_range_is_rejected() {
    let cfg = SystemConfig::default();
    for eps in [0.0, 1.0, -0.1, 1.5] {
        assert!(matches!(
            min_stop_points(&cfg, eps, &PlanOptions::fixed_altitude()),
            Err(Error::InvalidConfig { .. })
        ));
    }
}

#[test]
fn stricter_target_never_needs_fewer_stops() {
    let cfg = SystemConfig::default();
    let opts = PlanOptions::fixed_altitude();
    let mut prev = 0;
    for eps in [0.2, 0.3, 0.4, 0.5, 0.6] {
        let m = min_stop_points(&cfg, eps, &opts).map(|p| p.m).unwrap_or(usize::MAX);
        assert!(m >= prev, "eps={eps}: {m} after {prev}");
        prev = m;
    }
}

#[test]
fn denser_d2d_never_lowers_the_power_at_equal_stop_count() {
    let base = SystemConfig::default();
    let eps = 0.5;
    let mut prev = 0.0;
    let mut prev_m = None;
    for lambda in [0.5e-4, 0.6e-4, 0.7e-4] {
        let cfg = base.with_lambda_d(lambda);
        let m = min_stop_points(&cfg, eps, &PlanOptions::fixed_altitude()).unwrap().m;
        if let Some(pm) = prev_m {
            if pm == m {
                let p = min_transmit_power(&cfg, m, eps).unwrap();
                assert!(p >= prev * (1.0 - 2e-3), "lambda={lambda}: {p} < {prev}");
            }
        }
        prev = min_transmit_power(&cfg, m, eps).unwrap();
        prev_m = Some(m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stop_count_is_non_increasing_in_radius(a in 50.0..1000.0f64, b in 50.0..1000.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(stops_for_radius(hi, R_CELL) <= stops_for_radius(lo, R_CELL));
    }

    #[test]
    fn chosen_layout_fits_the_radius(r in 50.0..1000.0f64) {
        let m = stops_for_radius(r, R_CELL);
        prop_assert!(layout_radius(m, R_CELL) <= r + 1e-6);
        if m > 1 {
            prop_assert!(layout_radius(m - 1, R_CELL) > r + 1e-9 * R_CELL);
        }
    }

    #[test]
    fn tour_length_is_rotation_invariant(m in 1usize..=20, theta in 0.0..(2.0 * PI)) {
        let l = stop_point_layout(m, R_CELL).unwrap();
        let a = tour_length(&l.positions);
        let b = tour_length(&rotate(&l.positions, theta));
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1.0), "m={} {} vs {}", m, a, b);
    }

    #[test]
    fn tour_is_a_two_opt_local_optimum(pts in prop::collection::vec((-1000.0..1000.0f64, -1000.0..1000.0f64), 1..12)) {
        let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let order = open_tour(&pts);
        let len = path_length(&pts, &order);
        for i in 0..order.len().saturating_sub(1) {
            for j in i + 2..order.len() {
                let mut alt = order.clone();
                alt[i + 1..=j].reverse();
                prop_assert!(path_length(&pts, &alt) >= len - 1e-6);
            }
        }
    }
}
