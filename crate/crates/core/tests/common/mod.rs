//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use arcfillet::geom::Point2;
use arcfillet::gridmap::OccupancyGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid(
    rng: &mut impl Rng,
    w: usize,
    h: usize,
    density: f64,
    res: f64,
) -> OccupancyGrid {
    let cells = (0..w * h).map(|_| rng.random::<f64>() < density).collect();
    OccupancyGrid::from_cells(w, h, res, cells).unwrap()
}

/// Dilation by checking every occupied cell against every cell.
pub fn brute_inflate(grid: &OccupancyGrid, cells: usize) -> Vec<bool> {
    let (w, h) = (grid.width(), grid.height());
    let k = cells as i64;
    let occupied: Vec<(i64, i64)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| grid.is_occupied(x, y))
        .map(|(x, y)| (x as i64, y as i64))
        .collect();
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = occupied.iter().any(|&(ox, oy)| {
                let (dx, dy) = (ox - x as i64, oy - y as i64);
                dx * dx + dy * dy <= k * k
            });
        }
    }
    out
}

/// Liang-Barsky clip of segment `ab` against the closed box `[lo, hi]`.
pub fn segment_meets_box(a: Point2, b: Point2, lo: Point2, hi: Point2) -> bool {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-d.x, a.x - lo.x),
        (d.x, hi.x - a.x),
        (-d.y, a.y - lo.y),
        (d.y, hi.y - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Collision by testing the segment against every occupied cell's box.
pub fn brute_segment_collides(grid: &OccupancyGrid, a: Point2, b: Point2) -> bool {
    let lo = grid.origin();
    let hi = grid.max_corner();
    let inside = |p: Point2| p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    if !inside(a) || !inside(b) {
        return true;
    }
    let cell = 1.0 / grid.resolution();
    (0..grid.height()).any(|y| {
        (0..grid.width()).any(|x| {
            if !grid.is_occupied(x, y) {
                return false;
            }
            let c0 = lo + Point2::new(x as f64 * cell, y as f64 * cell);
            segment_meets_box(a, b, c0, c0 + Point2::new(cell, cell))
        })
    })
}

/// Minimum simple-path weight from `s` to `g` by exhaustive DFS.
pub fn enumerate_min_path(
    n: usize,
    edges: &[(usize, usize, f64)],
    s: usize,
    g: usize,
) -> Option<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j, w) in edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    fn dfs(
        v: usize,
        g: usize,
        acc: f64,
        seen: &mut [bool],
        adj: &[Vec<(usize, f64)>],
        best: &mut Option<f64>,
    ) {
        if v == g {
            *best = Some(best.map_or(acc, |b: f64| b.min(acc)));
            return;
        }
        for &(u, w) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                dfs(u, g, acc + w, seen, adj, best);
                seen[u] = false;
            }
        }
    }
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut best = None;
    dfs(s, g, 0.0, &mut seen, &adj, &mut best);
    best
}

/// One-sided sign test: P(X ≥ successes) for X ~ Binomial(trials, 1/2).
pub fn sign_test_p(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for k in successes..=trials {
        total += binomial(trials, k);
    }
    total / 2f64.powi(trials as i32)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Counts of pairs with `a < b` and with `a > b`; ties are dropped.
pub fn sign_counts(pairs: impl IntoIterator<Item = (f64, f64)>) -> (usize, usize) {
    pairs.into_iter().fold((0, 0), |(lt, gt), (a, b)| {
        if a < b {
            (lt + 1, gt)
        } else if a > b {
            (lt, gt + 1)
        } else {
            (lt, gt)
        }
    })
}

/// Corner with interior angle `alpha` at `p1`, edges of length `l1` and `l2`.
/// `turn` picks which side the outgoing edge lies on.
pub fn corner(p1: Point2, heading: f64, alpha: f64, l1: f64, l2: f64, turn: bool) -> [Point2; 3] {
    let p0 = p1 + Point2::from_polar(l1, heading);
    let out = if turn {
        heading + alpha
    } else {
        heading - alpha
    };
    let p2 = p1 + Point2::from_polar(l2, out);
    [p0, p1, p2]
}

/// Distance from `p` to the infinite line through `a` and `b`.
pub fn line_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    ((p - a).cross(d)).abs() / d.norm()
}

/// Angle between two directions, in [0, π].
pub fn angle_between(u: Point2, v: Point2) -> f64 {
    u.cross(v).atan2(u.dot(v)).abs()
}
