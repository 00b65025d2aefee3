//! Open tours over stop points: nearest neighbour followed by 2-opt.

const TIE: f64 = 1e-9;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Length of the open path visiting `points` in `order`.
pub fn path_length(points: &[[f64; 2]], order: &[usize]) -> f64 {
    order.windows(2).fold(0.0, |acc, w| acc + dist(points[w[0]], points[w[1]]))
}

/// Visiting order starting from the stop nearest the cell center. Ties go
/// to the lower index; distances within a relative 1e-9 count as ties so the
/// order survives rotations of the layout.
pub fn open_tour(points: &[[f64; 2]]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let scale = points.iter().map(|p| p[0].hypot(p[1])).fold(1.0, f64::max);
    let nearest = |from: [f64; 2], candidates: &mut dyn Iterator<Item = usize>| -> usize {
        let mut best: Option<(usize, f64)> = None;
        for i in candidates {
            let d = dist(from, points[i]);
            match best {
                Some((_, bd)) if d >= bd - TIE * scale => {}
                _ => best = Some((i, d)),
            }
        }
        best.expect("non-empty").0
    };
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut cur = nearest([0.0, 0.0], &mut (0..n));
    order.push(cur);
    used[cur] = true;
    while order.len() < n {
        cur = nearest(points[cur], &mut (0..n).filter(|&i| !used[i]));
        order.push(cur);
        used[cur] = true;
    }
    two_opt(points, &mut order, scale);
    order
}

/// 2-opt on an open path with a fixed first stop. Reversing a suffix is
/// allowed since the path has no closing edge.
fn two_opt(points: &[[f64; 2]], order: &mut [usize], scale: f64) {
    let n = order.len();
    if n < 3 {
        return;
    }
    let eps = TIE * scale;
    loop {
        let mut improved = false;
        for i in 1..n - 1 {
            for j in i + 1..n {
                let a = points[order[i - 1]];
                let b = points[order[i]];
                let c = points[order[j]];
                let before = dist(a, b) + if j + 1 < n { dist(c, points[order[j + 1]]) } else { 0.0 };
                let after = dist(a, c) + if j + 1 < n { dist(b, points[order[j + 1]]) } else { 0.0 };
                if after < before - eps {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}
