//! Exact line/pixel intersection lengths.
//!
//! The line is clipped against the grid rectangle, cut at every interior grid
//! line it crosses, and each piece is assigned to the pixel containing its
//! midpoint. Pixels are half-open in column and row coordinates, which decides
//! ownership for lines running exactly along a pixel edge.

use super::GridSpec;

/// Pieces shorter than this fraction of a pixel are dropped.
const MIN_PIECE: f64 = 1e-12;

/// Traces the infinite line `origin + t * direction` through `grid` and returns
/// `(pixel_index, length_mm)` pairs in traversal order. Pixel indices are
/// zero-based raster indices. A line missing the grid yields an empty list.
pub fn trace_ray(origin: (f64, f64), direction: (f64, f64), grid: &GridSpec) -> Vec<(usize, f64)> {
    let norm = direction.0.hypot(direction.1);
    if !(norm > 0.0) {
        return Vec::new();
    }
    let (dx, dy) = (direction.0 / norm, direction.1 / norm);
    let (ox, oy) = origin;
    let p = grid.pixel_size;
    let x_lo = -0.5 * grid.width_mm();
    let x_hi = 0.5 * grid.width_mm();
    let y_lo = -0.5 * grid.height_mm();
    let y_hi = 0.5 * grid.height_mm();

    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    let parallel = 1e-15;
    if dx.abs() > parallel {
        let (a, b) = ((x_lo - ox) / dx, (x_hi - ox) / dx);
        t_min = t_min.max(a.min(b));
        t_max = t_max.min(a.max(b));
    } else if ox < x_lo || ox >= x_hi {
        return Vec::new();
    }
    if dy.abs() > parallel {
        let (a, b) = ((y_lo - oy) / dy, (y_hi - oy) / dy);
        t_min = t_min.max(a.min(b));
        t_max = t_max.min(a.max(b));
    } else if oy > y_hi || oy <= y_lo {
        return Vec::new();
    }
    if !(t_max - t_min > MIN_PIECE * p) {
        return Vec::new();
    }

    let mut cuts = Vec::with_capacity(grid.rows + grid.cols + 2);
    cuts.push(t_min);
    if dx.abs() > parallel {
        for i in 1..grid.cols {
            let t = (x_lo + i as f64 * p - ox) / dx;
            if t > t_min && t < t_max {
                cuts.push(t);
            }
        }
    }
    if dy.abs() > parallel {
        for i in 1..grid.rows {
            let t = (y_hi - i as f64 * p - oy) / dy;
            if t > t_min && t < t_max {
                cuts.push(t);
            }
        }
    }
    cuts.push(t_max);
    cuts.sort_unstable_by(f64::total_cmp);

    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let length = w[1] - w[0];
        if length <= MIN_PIECE * p {
            continue;
        }
        let t_mid = 0.5 * (w[0] + w[1]);
        let mx = ox + t_mid * dx;
        let my = oy + t_mid * dy;
        let col = (((mx - x_lo) / p).floor().max(0.0) as usize).min(grid.cols - 1);
        let row = (((y_hi - my) / p).floor().max(0.0) as usize).min(grid.rows - 1);
        let index = row * grid.cols + col;
        match out.last_mut() {
            Some((last, len)) if *last == index => *len += length,
            _ => out.push((index, length)),
        }
    }
    out
}
