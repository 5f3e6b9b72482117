//! Recursive bend decomposition and bend-based generalization.
//!
//! For a chain running from vertex `i` to vertex `j`, the interior vertex
//! farthest from the chord `(i, j)` is the apex of the bend `(i, apex, j)`;
//! the two halves are then decomposed the same way until no interior vertex
//! is left. Every interior vertex therefore becomes the apex of exactly one
//! bend, and smaller bends nest inside larger ones.
//!
//! Rings are cut at vertex 0 and at the vertex farthest from it, and the two
//! resulting chains are decomposed independently. Vertex indices of the
//! second chain are "unrolled": index `n` stands for vertex 0, so a bend always
//! satisfies `start < apex < end`. Use [`BendDecomposition::vertex`] to map an
//! index back to the polyline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::headtail::HeadTailResult;
use crate::par::{argmax_lowest, Execution};

/// How the size of a bend is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BendMetric {
    /// Perpendicular distance from the apex to the chord.
    #[default]
    Offset,
    /// Area of the start/apex/end triangle.
    TriangleArea,
}

impl BendMetric {
    pub fn name(self) -> &'static str {
        match self {
            BendMetric::Offset => "offset",
            BendMetric::TriangleArea => "triangle-area",
        }
    }
}

impl std::str::FromStr for BendMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offset" => Ok(BendMetric::Offset),
            "triangle-area" => Ok(BendMetric::TriangleArea),
            other => Err(Error::invalid(format!("unknown bend metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bend {
    /// Pre-order id; also the position in [`BendDecomposition::bends`].
    pub id: usize,
    pub start: usize,
    pub apex: usize,
    pub end: usize,
    pub size: f64,
    pub depth: u32,
    pub parent: Option<usize>,
    /// Head/tail class, 1 for the smallest bends.
    pub class: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BendDecomposition {
    pub bends: Vec<Bend>,
    /// Vertex count of the decomposed curve.
    pub source_n: usize,
    /// Vertices where a ring was cut; empty for open curves.
    pub chain_splits: Vec<usize>,
    pub closed: bool,
    pub metric: BendMetric,
    /// Set once classes have been assigned.
    pub ht_index: Option<u32>,
}

impl BendDecomposition {
    /// Maps a (possibly unrolled) bend vertex index back to the polyline.
    pub fn vertex(&self, index: usize) -> usize {
        index % self.source_n
    }

    /// Chain endpoints as unrolled `(start, end)` index pairs.
    pub fn chains(&self) -> Vec<(usize, usize)> {
        match self.chain_splits.as_slice() {
            [] => vec![(0, self.source_n - 1)],
            [_, cut] => vec![(0, *cut), (*cut, self.source_n)],
            _ => unreachable!("rings are cut exactly once"),
        }
    }

    /// Number of interior vertices over all chains.
    pub fn interior_vertex_count(&self) -> usize {
        self.chains().iter().map(|(s, e)| e - s - 1).sum()
    }

    pub fn max_class(&self) -> Option<u32> {
        self.bends.iter().filter_map(|b| b.class).max()
    }
}

pub fn decompose(curve: &Polyline) -> Result<BendDecomposition> {
    decompose_with(curve, BendMetric::Offset, Execution::default())
}

pub fn decompose_with(
    curve: &Polyline,
    metric: BendMetric,
    exec: Execution,
) -> Result<BendDecomposition> {
    let n = curve.len();
    let pts = curve.points();
    let closed = curve.is_closed();
    if (!closed && n < 3) || (closed && n < 4) {
        return Err(Error::invalid(format!(
            "bend decomposition needs at least {} vertices for {} curve, got {n}",
            if closed { 4 } else { 3 },
            if closed { "a closed" } else { "an open" }
        )));
    }
    let at = |i: usize| pts[i % n];

    let (chains, chain_splits) = if closed {
        let (cut, _) = argmax_lowest(exec, 1, n, |i| pts[0].distance(pts[i]))
            .expect("ring has interior vertices");
        (vec![(0, cut), (cut, n)], vec![0, cut])
    } else {
        (vec![(0, n - 1)], Vec::new())
    };

    let mut bends = Vec::with_capacity(n - 2);
    for (lo, hi) in chains {
        // Right child is pushed first so ids come out in pre-order.
        let mut stack = vec![(lo, hi, 0u32, None::<usize>)];
        while let Some((i, j, depth, parent)) = stack.pop() {
            if j - i < 2 {
                continue;
            }
            let (a, b) = (at(i), at(j));
            let (apex, offset) = argmax_lowest(exec, i + 1, j, |k| chord_offset(a, b, at(k)))
                .expect("chain has an interior vertex");
            let size = match metric {
                BendMetric::Offset => offset,
                BendMetric::TriangleArea => 0.5 * offset * a.distance(b),
            };
            let id = bends.len();
            bends.push(Bend {
                id,
                start: i,
                apex,
                end: j,
                size,
                depth,
                parent,
                class: None,
            });
            stack.push((apex, j, depth + 1, Some(id)));
            stack.push((i, apex, depth + 1, Some(id)));
        }
    }

    Ok(BendDecomposition {
        bends,
        source_n: n,
        chain_splits,
        closed,
        metric,
        ht_index: None,
    })
}

/// Distance from `p` to the line through `a` and `b`; distance to `a` when they coincide.
pub fn chord_offset(a: Point, b: Point, p: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return a.distance(p);
    }
    (dx * (p.y - a.y) - dy * (p.x - a.x)).abs() / len
}

/// Bend sizes in bend-id order, optionally without the zero-size (collinear) bends.
pub fn bend_sizes(d: &BendDecomposition, exclude_zero: bool) -> Vec<f64> {
    d.bends
        .iter()
        .map(|b| b.size)
        .filter(|&s| !exclude_zero || s > 0.0)
        .collect()
}

/// Labels every bend with its head/tail class.
///
/// `ht` must come from the positive bend sizes of `d`; zero-size bends go to class 1.
pub fn assign_classes(d: &BendDecomposition, ht: &HeadTailResult) -> Result<BendDecomposition> {
    let mut out = d.clone();
    let mut histogram = vec![0usize; ht.ht_index as usize];
    for bend in &mut out.bends {
        let class = if bend.size > 0.0 {
            let c = ht.class_of(bend.size);
            histogram[c as usize - 1] += 1;
            c
        } else {
            1
        };
        bend.class = Some(class);
    }
    if histogram != ht.class_counts {
        return Err(Error::invalid(format!(
            "head/tail result does not match these bends: class counts {:?} vs {:?}",
            ht.class_counts, histogram
        )));
    }
    out.ht_index = Some(ht.ht_index);
    Ok(out)
}

/// Keeps the chain endpoints and the apexes of bends with `class >= level`.
///
/// Level 1 returns the curve unchanged; level `ht_index + 1` leaves only the
/// chain endpoints.
pub fn generalize(curve: &Polyline, d: &BendDecomposition, level: u32) -> Result<Polyline> {
    let ht = d
        .ht_index
        .ok_or_else(|| Error::invalid("bend classes have not been assigned"))?;
    if curve.len() != d.source_n || curve.is_closed() != d.closed {
        return Err(Error::invalid(
            "decomposition was computed for a different curve",
        ));
    }
    if level < 1 || level > ht + 1 {
        return Err(Error::invalid(format!(
            "generalization level must lie in 1..={}, got {level}",
            ht + 1
        )));
    }
    let n = d.source_n;
    let mut keep = vec![false; n];
    for (s, e) in d.chains() {
        keep[d.vertex(s)] = true;
        keep[d.vertex(e)] = true;
    }
    for b in &d.bends {
        if b.class.unwrap_or(1) >= level {
            keep[d.vertex(b.apex)] = true;
        }
    }
    let points = curve
        .points()
        .iter()
        .zip(&keep)
        .filter_map(|(p, &k)| k.then_some(*p))
        .collect();
    Polyline::from_vertices_lossy(points, curve.is_closed())
}
