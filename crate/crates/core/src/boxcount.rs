//! Box-counting dimension of a polyline.
//!
//! Cells are half-open squares `[i·s, (i+1)·s) × [j·s, (j+1)·s)` offset by the
//! grid origin. A segment occupies every cell its points fall in, found by
//! walking the grid lines the segment crosses. Two rules settle the
//! measure-zero cases:
//!
//! * a point lying exactly on the curve's maximum x (or y) grid line belongs
//!   to the last cell below it, so the extreme vertex does not open a new row;
//! * a segment crossing a grid corner exactly steps diagonally, entering only
//!   the cell beyond the corner and neither of the side cells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::par::{map_indexed, Execution};

pub const DEFAULT_LEVELS: usize = 10;
pub const MIN_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxLevel {
    pub box_size: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountEstimate {
    /// From the coarsest to the finest box size.
    pub levels: Vec<BoxLevel>,
    pub dimension: f64,
    pub intercept: f64,
    pub r2: f64,
    pub origin: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `ys` on `xs`. `None` with fewer than two
/// points or no spread in `xs`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Grid geometry shared by all segments of one count.
struct Grid {
    size: f64,
    origin: Point,
    last: (i64, i64),
}

impl Grid {
    fn new(curve: &Polyline, size: f64, origin: Point) -> Self {
        let (lo, hi) = curve.bbox();
        let last = |lo: f64, hi: f64, o: f64| -> i64 {
            let q = (hi - o) / size;
            let f = q.floor();
            if f == q && f > ((lo - o) / size).floor() {
                f as i64 - 1
            } else {
                f as i64
            }
        };
        Grid {
            size,
            origin,
            last: (last(lo.x, hi.x, origin.x), last(lo.y, hi.y, origin.y)),
        }
    }

    fn cell(&self, p: Point) -> (i64, i64) {
        let ix = (((p.x - self.origin.x) / self.size).floor() as i64).min(self.last.0);
        let iy = (((p.y - self.origin.y) / self.size).floor() as i64).min(self.last.1);
        (ix, iy)
    }

    /// Appends every cell visited by the segment `a → b`.
    fn walk(&self, a: Point, b: Point, out: &mut Vec<(i64, i64)>) {
        let (mut ix, mut iy) = self.cell(a);
        let (ex, ey) = self.cell(b);
        out.push((ix, iy));
        let axis = |i: i64, e: i64, from: f64, delta: f64, o: f64| -> (i64, u64, f64, f64) {
            let step = (e - i).signum();
            if step == 0 || delta == 0.0 {
                return (step, (e - i).unsigned_abs(), f64::INFINITY, f64::INFINITY);
            }
            let boundary = if step > 0 { (i + 1) as f64 } else { i as f64 } * self.size + o;
            (
                step,
                (e - i).unsigned_abs(),
                (boundary - from) / delta,
                self.size / delta.abs(),
            )
        };
        let (sx, mut rx, mut tx, dtx) = axis(ix, ex, a.x, b.x - a.x, self.origin.x);
        let (sy, mut ry, mut ty, dty) = axis(iy, ey, a.y, b.y - a.y, self.origin.y);
        while rx > 0 || ry > 0 {
            let (step_x, step_y) = match (rx > 0, ry > 0) {
                (true, true) => (tx <= ty, ty <= tx),
                (x, y) => (x, y),
            };
            if step_x {
                ix += sx;
                rx -= 1;
                tx += dtx;
            }
            if step_y {
                iy += sy;
                ry -= 1;
                ty += dty;
            }
            out.push((ix, iy));
        }
    }
}

/// Number of distinct grid cells touched by the polyline.
pub fn count_boxes(curve: &Polyline, box_size: f64, origin: Point) -> Result<usize> {
    if !(box_size > 0.0 && box_size.is_finite()) {
        return Err(Error::invalid(format!(
            "box size must be positive, got {box_size}"
        )));
    }
    Ok(occupied_cells(curve, box_size, origin).len())
}

/// Sorted, distinct cells touched by the polyline.
pub fn occupied_cells(curve: &Polyline, box_size: f64, origin: Point) -> Vec<(i64, i64)> {
    let grid = Grid::new(curve, box_size, origin);
    let mut cells = Vec::with_capacity(curve.len() * 2);
    for (a, b) in curve.segments() {
        grid.walk(a, b, &mut cells);
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

pub fn box_dimension(curve: &Polyline, num_levels: usize) -> Result<BoxCountEstimate> {
    box_dimension_with(curve, num_levels, Execution::default())
}

/// Dimension from a dyadic ladder of box sizes `S/4, S/8, …, S/2^(num_levels+1)`,
/// where `S` is the longer side of the bounding box, anchored at its minimum corner.
pub fn box_dimension_with(
    curve: &Polyline,
    num_levels: usize,
    exec: Execution,
) -> Result<BoxCountEstimate> {
    if num_levels < MIN_LEVELS {
        return Err(Error::invalid(format!(
            "box counting needs at least {MIN_LEVELS} levels, got {num_levels}"
        )));
    }
    if num_levels > 40 {
        return Err(Error::SizeLimit(format!(
            "box counting is capped at 40 levels, got {num_levels}"
        )));
    }
    let (lo, hi) = curve.bbox();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    if extent <= 0.0 {
        return Err(Error::invalid("curve has zero extent"));
    }
    let levels = map_indexed(exec, num_levels, |k| {
        let box_size = extent / (1u64 << (k + 2)) as f64;
        BoxLevel {
            box_size,
            count: occupied_cells(curve, box_size, lo).len(),
        }
    });
    let xs: Vec<f64> = levels.iter().map(|l| (1.0 / l.box_size).ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| (l.count as f64).ln()).collect();
    let fit = least_squares(&xs, &ys).expect("box sizes are distinct");
    if !(0.9..=2.0).contains(&fit.slope) {
        log::warn!(
            "box-counting dimension {:.4} outside the expected [0.9, 2.0] envelope",
            fit.slope
        );
    }
    Ok(BoxCountEstimate {
        levels,
        dimension: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        origin: lo,
    })
}
