//! Planar polylines, curve generators and Bezier smoothing.
//!
//! Every generator places its vertices at equal arc length along the curve.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::rng::Stream;

/// Largest Koch iteration accepted by [`gen_koch`] (4^9 segments).
pub const MAX_KOCH_ITERATIONS: u32 = 9;

/// Growth rate of the golden spiral per radian, `ln(phi) / (pi / 2)`.
pub const GOLDEN_SPIRAL_GROWTH: f64 = 0.1759;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// An ordered vertex sequence, open or closed.
///
/// A closed polyline does not repeat its first vertex; the closing segment
/// from the last vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Point>,
    closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Point>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "a polyline needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("vertex {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "vertices {i} and {} are identical",
                i + 1
            )));
        }
        if closed && points.first() == points.last() {
            return Err(Error::invalid(
                "closed polyline repeats its first vertex at the end",
            ));
        }
        Ok(Polyline { points, closed })
    }

    pub fn open(points: Vec<Point>) -> Result<Self> {
        Self::new(points, false)
    }

    /// Builds a polyline from raw vertices, dropping consecutive duplicates and,
    /// for rings, a repeated closing vertex.
    pub fn from_vertices_lossy(mut points: Vec<Point>, closed: bool) -> Result<Self> {
        points.dedup();
        if closed && points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        Self::new(points, closed)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// Segments in order, including the closing segment of a ring.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Applies `f` to every vertex. Fails if the result violates the polyline invariants.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Self::new(self.points.iter().map(|&p| f(p)).collect(), self.closed)
    }

    /// Rotation by `angle` radians about the origin followed by translation.
    pub fn rigid_motion(&self, angle: f64, dx: f64, dy: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        self.map_points(|p| Point::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy))
    }
}

/// `scale = (1/3)^k`, `detail = 4^k` for Koch iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPair {
    pub scale: f64,
    pub detail: u64,
}

fn require_count(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::invalid(format!(
            "vertex count must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Upper half of the radius-`r` circle, from `(r, 0)` to `(-r, 0)`.
pub fn gen_half_circle(n: usize, r: f64) -> Result<Polyline> {
    require_count(n, 3)?;
    require_positive("radius", r)?;
    let step = PI / (n - 1) as f64;
    let points = (0..n)
        .map(|k| {
            let theta = k as f64 * step;
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    Polyline::open(points)
}

/// Half of the ellipse `x²/a² + y²/b² = 1` at equal arc length.
///
/// The upper half runs from `(a, 0)` to `(-a, 0)`; the lower half continues
/// around the ellipse from `(-a, 0)` back to `(a, 0)`.
pub fn gen_half_ellipse(n: usize, a: f64, b: f64, upper: bool) -> Result<Polyline> {
    require_count(n, 3)?;
    require_positive("semi-axis a", a)?;
    require_positive("semi-axis b", b)?;
    let t0 = if upper { 0.0 } else { PI };
    let params = equal_arc_parameters(
        |t: f64| (a * t.sin()).hypot(b * t.cos()),
        t0,
        t0 + PI,
        n,
    );
    let points = params
        .into_iter()
        .map(|t| Point::new(a * t.cos(), b * t.sin()))
        .collect();
    Polyline::open(points)
}

/// Parameters `t_0 = lo, …, t_{n-1} = hi` splitting `∫ speed` into equal parts.
///
/// `speed` must be strictly positive on `[lo, hi]`.
fn equal_arc_parameters<F: Fn(f64) -> f64>(speed: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let total = adaptive_simpson(&speed, lo, hi, 1e-13);
    let gap = total / (n - 1) as f64;
    let mut params = Vec::with_capacity(n);
    params.push(lo);
    let mut t_prev = lo;
    let mut s_prev = 0.0;
    for k in 1..n - 1 {
        let target = k as f64 * gap;
        let mut t = t_prev + (target - s_prev) / speed(t_prev);
        let mut s = s_prev;
        for _ in 0..50 {
            s = s_prev + adaptive_simpson(&speed, t_prev, t, 1e-15);
            let residual = s - target;
            if residual.abs() <= 1e-14 * total {
                break;
            }
            t = (t - residual / speed(t)).clamp(t_prev, hi);
        }
        params.push(t);
        t_prev = t;
        s_prev = s;
    }
    params.push(hi);
    params
}

/// Logarithmic spiral `r = a·e^{bθ}` for `θ ∈ [0, theta_max]` at equal arc length.
///
/// Arc length from the origin angle is `(a/b)·√(1+b²)·(e^{bθ} − 1)`, which
/// inverts in closed form.
pub fn gen_log_spiral(n: usize, a: f64, b: f64, theta_max: f64) -> Result<Polyline> {
    require_count(n, 3)?;
    require_positive("initial radius", a)?;
    require_positive("growth rate", b)?;
    require_positive("total angle", theta_max)?;
    let span = (b * theta_max).exp_m1();
    let points = (0..n)
        .map(|k| {
            let theta = if k == n - 1 {
                theta_max
            } else {
                (k as f64 / (n - 1) as f64 * span).ln_1p() / b
            };
            let r = a * (b * theta).exp();
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    Polyline::open(points)
}

/// Spiral with the default parameters: unit initial radius, golden growth, three turns.
pub fn gen_log_spiral_default(n: usize) -> Result<Polyline> {
    gen_log_spiral(n, 1.0, GOLDEN_SPIRAL_GROWTH, 6.0 * PI)
}

/// Koch curve on the unit segment from `(0, 0)` to `(1, 0)`, bumps pointing up.
pub fn gen_koch(iterations: u32) -> Result<Polyline> {
    if iterations > MAX_KOCH_ITERATIONS {
        return Err(Error::SizeLimit(format!(
            "Koch iterations capped at {MAX_KOCH_ITERATIONS}, got {iterations}"
        )));
    }
    let (s, c) = (PI / 3.0).sin_cos();
    let mut points = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(4 * (points.len() - 1) + 1);
        next.push(points[0]);
        for w in points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let d = q.sub(p).scale(1.0 / 3.0);
            let first = p.add(d);
            let peak = first.add(Point::new(c * d.x - s * d.y, s * d.x + c * d.y));
            let second = p.add(d.scale(2.0));
            next.extend([first, peak, second, q]);
        }
        points = next;
    }
    Polyline::open(points)
}

pub fn koch_scaling_table(iterations: u32) -> Vec<ScalingPair> {
    (0..=iterations)
        .map(|k| ScalingPair {
            scale: (1.0f64 / 3.0).powi(k as i32),
            detail: 4u64.pow(k),
        })
        .collect()
}

/// Least-squares slope of `ln(detail)` against `ln(scale)`.
pub fn loglog_slope(table: &[ScalingPair]) -> Option<f64> {
    let xs: Vec<f64> = table.iter().map(|p| p.scale.ln()).collect();
    let ys: Vec<f64> = table.iter().map(|p| (p.detail as f64).ln()).collect();
    crate::boxcount::least_squares(&xs, &ys).map(|fit| fit.slope)
}

/// `[1, 1/2, …, 1/n]`.
pub fn gen_zipf_series(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 1.0 / k as f64).collect()
}

/// Interpolating cubic Bezier spline through every vertex of `curve`.
///
/// Inner control points come from centripetal Catmull-Rom tangents; open ends
/// use a reflected phantom vertex, which makes the end tangent point along
/// the end segment. Each input segment is replaced by `samples_per_segment`
/// uniform parameter steps, so an open curve of `n` vertices yields
/// `(n - 1)·m + 1` vertices and a ring yields `n·m`.
pub fn smooth_bezier(curve: &Polyline, samples_per_segment: usize) -> Result<Polyline> {
    if samples_per_segment == 0 {
        return Err(Error::invalid("samples_per_segment must be at least 1"));
    }
    let pts = curve.points();
    let n = pts.len();
    let closed = curve.is_closed();
    let seg_count = if closed { n } else { n - 1 };
    let m = samples_per_segment;

    let at = |i: isize| -> Point {
        if closed {
            pts[i.rem_euclid(n as isize) as usize]
        } else if i < 0 {
            pts[0].scale(2.0).sub(pts[1])
        } else if i as usize >= n {
            pts[n - 1].scale(2.0).sub(pts[n - 2])
        } else {
            pts[i as usize]
        }
    };

    let mut out = Vec::with_capacity(seg_count * m + 1);
    for seg in 0..seg_count {
        let i = seg as isize;
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let (c1, c2) = centripetal_controls(p0, p1, p2, p3);
        out.push(p1);
        for k in 1..m {
            out.push(cubic_bezier(p1, c1, c2, p2, k as f64 / m as f64));
        }
    }
    if !closed {
        out.push(pts[n - 1]);
    }
    Polyline::from_vertices_lossy(out, closed)
}

fn centripetal_controls(p0: Point, p1: Point, p2: Point, p3: Point) -> (Point, Point) {
    let d01 = p0.distance(p1).sqrt();
    let d12 = p1.distance(p2).sqrt();
    let d23 = p2.distance(p3).sqrt();
    let tangent = |a: Point, b: Point, c: Point, dab: f64, dbc: f64| -> Point {
        // Barry-Goldman derivative at b, rescaled to the unit parameter of the middle span.
        let t = b
            .sub(a)
            .scale(1.0 / dab)
            .sub(c.sub(a).scale(1.0 / (dab + dbc)))
            .add(c.sub(b).scale(1.0 / dbc));
        t.scale(d12)
    };
    let m1 = tangent(p0, p1, p2, d01, d12);
    let m2 = tangent(p1, p2, p3, d12, d23);
    (p1.add(m1.scale(1.0 / 3.0)), p2.sub(m2.scale(1.0 / 3.0)))
}

fn cubic_bezier(p0: Point, p1: Point, p2: Point, p3: Point, u: f64) -> Point {
    let v = 1.0 - u;
    let (b0, b1, b2, b3) = (v * v * v, 3.0 * v * v * u, 3.0 * v * u * u, u * u * u);
    Point::new(
        b0 * p0.x + b1 * p1.x + b2 * p2.x + b3 * p3.x,
        b0 * p0.y + b1 * p1.y + b2 * p2.y + b3 * p3.y,
    )
}

/// Total length, closing segment included for rings.
pub fn arc_length(curve: &Polyline) -> f64 {
    curve.segments().map(|(a, b)| a.distance(b)).sum()
}

/// Seeded midpoint-displacement ring with a coastline-like outline.
///
/// Starts from a regular hexagon of unit radius and, `levels` times, inserts
/// the midpoint of every edge pushed along the edge normal by
/// `roughness · edge length · U(-1, 1)`.
pub fn gen_midpoint_ring(levels: u32, roughness: f64, seed: u64) -> Result<Polyline> {
    if levels > 14 {
        return Err(Error::SizeLimit(format!(
            "midpoint ring capped at 14 levels, got {levels}"
        )));
    }
    if !(0.0..0.5).contains(&roughness) {
        return Err(Error::invalid(format!(
            "roughness must lie in [0, 0.5), got {roughness}"
        )));
    }
    let mut rng = Stream::new(seed, 0);
    let mut ring: Vec<Point> = (0..6)
        .map(|k| {
            let t = k as f64 * PI / 3.0;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    for _ in 0..levels {
        let n = ring.len();
        let mut next = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (p, q) = (ring[i], ring[(i + 1) % n]);
            let d = q.sub(p);
            let offset = roughness * (2.0 * rng.uniform() - 1.0);
            let mid = p.add(q).scale(0.5).add(Point::new(-d.y, d.x).scale(offset));
            next.push(p);
            next.push(mid);
        }
        ring = next;
    }
    Polyline::new(ring, true)
}
