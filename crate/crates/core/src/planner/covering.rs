//! Disk covering: tabulated minimal radii and concrete stop layouts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal covering radius ratio `R_min / R_c` for `m = 1..=12` disks.
pub fn table_ratio(m: usize) -> Option<f64> {
    let r = match m {
        1 | 2 => 1.0,
        3 => 3f64.sqrt() / 2.0,
        4 => 2f64.sqrt() / 2.0,
        5 => 0.61,
        6 => 0.556,
        7 => 0.5,
        8 => 0.437,
        9 => 0.422,
        10 => 0.398,
        11 => 0.38,
        12 => 0.361,
        _ => return None,
    };
    Some(r)
}

/// Covering density of the hexagonal lattice, `2 pi / sqrt(27)`.
pub const HEX_COVERING_DENSITY: f64 = 1.2092;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringEntry {
    pub m: usize,
    pub radius_ratio: f64,
}

pub fn covering_entry(m: usize) -> CoveringEntry {
    CoveringEntry {
        m,
        radius_ratio: covering_radius(m, 1.0),
    }
}

/// Radius needed for `m` equal disks to cover a disk of radius `r_cell`:
/// tabulated up to 12, hexagonal-lattice asymptotics beyond.
pub fn covering_radius(m: usize, r_cell: f64) -> f64 {
    assert!(m >= 1, "at least one disk is required");
    match table_ratio(m) {
        Some(r) => r * r_cell,
        None => r_cell * (HEX_COVERING_DENSITY / m as f64).sqrt(),
    }
}

/// Stop positions together with the radius at which they cover the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub positions: Vec<[f64; 2]>,
    pub radius: f64,
}

// Near-optimal coverings of the unit disk found by numerical minimax
// optimization. Each radius is the exact covering radius of its
// configuration rounded up in the sixth decimal, or the tabulated ratio when
// that is larger.
const UNIT_LAYOUTS: [(&[[f64; 2]], f64); 7] = [
    (LAYOUT_5, 0.61),
    (LAYOUT_6, 0.556527),
    (LAYOUT_8, 0.445042),
    (LAYOUT_9, 0.422),
    (LAYOUT_10, 0.398),
    (LAYOUT_11, 0.38),
    (LAYOUT_12, 0.361103),
];

include!("layouts.in");

fn ring(k: usize, dist: f64, phase: f64) -> impl Iterator<Item = [f64; 2]> {
    (0..k).map(move |i| {
        let t = phase + 2.0 * PI * i as f64 / k as f64;
        [dist * t.cos(), dist * t.sin()]
    })
}

fn unit_layout(m: usize) -> Layout {
    let (positions, radius): (Vec<[f64; 2]>, f64) = match m {
        1 => (vec![[0.0, 0.0]], 1.0),
        // A second stop never shrinks the radius below the cell's; it sits
        // on a diameter.
        2 => (vec![[0.0, 0.0], [0.5, 0.0]], 1.0),
        3 => (ring(3, 0.5, PI / 2.0).collect(), 3f64.sqrt() / 2.0),
        4 => (ring(4, 2f64.sqrt() / 2.0, PI / 4.0).collect(), 2f64.sqrt() / 2.0),
        7 => (
            std::iter::once([0.0, 0.0]).chain(ring(6, 3f64.sqrt() / 2.0, 0.0)).collect(),
            0.5,
        ),
        5 | 6 | 8..=12 => {
            let idx = match m {
                5 => 0,
                6 => 1,
                _ => m - 6,
            };
            let (pts, r) = UNIT_LAYOUTS[idx];
            (pts.to_vec(), r)
        }
        _ => {
            // Boundary losses keep small lattices above the 12-stop layout.
            let hex = hex_layout(m);
            let twelve = unit_layout(12);
            return if twelve.radius <= hex.radius { twelve } else { hex };
        }
    };
    Layout { positions, radius }
}

/// Stop layout for `m` stops on a cell of radius `r_cell`, with the radius
/// at which it provably covers the cell. For `m > 12` the layout is a
/// clipped hexagonal lattice and may use fewer than `m` stops.
pub fn stop_point_layout(m: usize, r_cell: f64) -> Result<Layout> {
    if m == 0 {
        return Err(Error::config("m", "at least one stop is required"));
    }
    let unit = unit_layout(m);
    let layout = Layout {
        positions: unit.positions.iter().map(|p| [p[0] * r_cell, p[1] * r_cell]).collect(),
        radius: unit.radius * r_cell,
    };
    if !certify_cover(&layout.positions, layout.radius * (1.0 + 1e-6), r_cell, CERTIFICATE_GRID) {
        return Err(Error::LayoutCoverage {
            m,
            radius: layout.radius,
        });
    }
    Ok(layout)
}

/// Radius at which `stop_point_layout(m, r_cell)` covers the cell.
pub fn layout_radius(m: usize, r_cell: f64) -> f64 {
    unit_layout(m).radius * r_cell
}

pub const CERTIFICATE_GRID: usize = 401;

/// True when every point of an `n` x `n` grid over the cell disk lies within
/// `radius` of some position.
pub fn certify_cover(positions: &[[f64; 2]], radius: f64, r_cell: f64, n: usize) -> bool {
    let r2 = radius * radius;
    let cell2 = r_cell * r_cell;
    let step = 2.0 * r_cell / (n - 1) as f64;
    for i in 0..n {
        let x = -r_cell + step * i as f64;
        for j in 0..n {
            let y = -r_cell + step * j as f64;
            if x * x + y * y > cell2 {
                continue;
            }
            if !positions.iter().any(|p| (p[0] - x).powi(2) + (p[1] - y).powi(2) <= r2) {
                return false;
            }
        }
    }
    true
}

/// Distance from the origin to a regular hexagon.
fn hexagon_distance(center: [f64; 2], circumradius: f64, phase: f64) -> f64 {
    let v: Vec<[f64; 2]> = ring(6, circumradius, phase)
        .map(|p| [p[0] + center[0], p[1] + center[1]])
        .collect();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for k in 0..6 {
        let a = v[k];
        let b = v[(k + 1) % 6];
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        // Origin relative to the edge; vertices run counter-clockwise.
        if ex * (-a[1]) - ey * (-a[0]) < 0.0 {
            inside = false;
        }
        let t = ((-a[0]) * ex + (-a[1]) * ey) / (ex * ex + ey * ey);
        let t = t.clamp(0.0, 1.0);
        best = best.min((a[0] + t * ex).hypot(a[1] + t * ey));
    }
    if inside {
        0.0
    } else {
        best
    }
}

/// Hexagonal lattice variants: the lattice point sits at the origin, or the
/// origin falls on a cell vertex or an edge midpoint; two orientations each.
fn hex_centers(rho: f64, variant: usize) -> Vec<[f64; 2]> {
    let phase = if variant % 2 == 0 { 0.0 } else { PI / 6.0 };
    // Hexagon with circumradius rho and vertex angle `phase` tiles with
    // lattice vectors of length sqrt(3) rho, rotated by 30 degrees.
    let s = 3f64.sqrt() * rho;
    let a1 = [s * (phase + PI / 6.0).cos(), s * (phase + PI / 6.0).sin()];
    let a2 = [s * (phase + PI / 2.0).cos(), s * (phase + PI / 2.0).sin()];
    let offset = match variant / 2 {
        0 => [0.0, 0.0],
        1 => [rho * phase.cos(), rho * phase.sin()],
        _ => {
            let c = 3f64.sqrt() / 2.0 * rho;
            [c * (phase + PI / 6.0).cos(), c * (phase + PI / 6.0).sin()]
        }
    };
    let span = (2.0 / s).ceil() as i64 + 2;
    let mut out = Vec::new();
    for i in -span..=span {
        for j in -span..=span {
            let c = [
                i as f64 * a1[0] + j as f64 * a2[0] - offset[0],
                i as f64 * a1[1] + j as f64 * a2[1] - offset[1],
            ];
            if c[0].hypot(c[1]) > 1.0 + rho {
                continue;
            }
            if hexagon_distance(c, rho, phase) <= 1.0 {
                out.push(c);
            }
        }
    }
    out
}

/// Smallest-radius hexagonal covering of the unit disk with at most `m`
/// cells. Centers outside the disk are pulled onto its boundary, which only
/// brings them closer to every point of the disk.
fn hex_layout(m: usize) -> Layout {
    let start = (HEX_COVERING_DENSITY / m as f64).sqrt();
    let mut best: Option<(f64, usize)> = None;
    for variant in 0..6 {
        let count = |rho: f64| hex_centers(rho, variant).len();
        let mut prev = start;
        let mut rho = start;
        while count(rho) > m {
            prev = rho;
            rho *= 1.002;
        }
        let (mut lo, mut hi) = (prev, rho);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if count(mid) > m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best.map_or(true, |(r, _)| hi < r) {
            best = Some((hi, variant));
        }
    }
    let (rho, variant) = best.expect("six variants");
    let positions = hex_centers(rho, variant)
        .into_iter()
        .map(|c| {
            let d = c[0].hypot(c[1]);
            if d > 1.0 {
                [c[0] / d, c[1] / d]
            } else {
                c
            }
        })
        .collect();
    Layout { positions, radius: rho }
}
