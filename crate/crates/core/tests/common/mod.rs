//! Strategies and property checks shared by the property tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use bendscale::analysis::{analyze, AnalysisOptions};
use bendscale::bends::{assign_classes, bend_sizes, decompose, generalize};
use bendscale::boxcount::count_boxes;
use bendscale::headtail::head_tail_breaks;
use bendscale::json::to_json_string;
use bendscale::par::Execution;
use bendscale::{Point, Polyline};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Runner with a fixed RNG so every run sees the same cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/coastline_fixture.geojson")
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// Polylines with `n` vertices in the square `[-extent, extent]²`, open or closed.
pub fn polyline(n: std::ops::Range<usize>, extent: f64) -> impl Strategy<Value = Polyline> {
    (prop::collection::vec((-extent..extent, -extent..extent), n), any::<bool>()).prop_filter_map(
        "too few distinct vertices",
        |(xy, closed)| {
            let pts = xy.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            let p = Polyline::from_vertices_lossy(pts, closed).ok()?;
            (p.len() >= if p.is_closed() { 4 } else { 3 }).then_some(p)
        },
    )
}

/// Random walk with `n` steps; more curve-like than uniform vertices.
pub fn walk(n: std::ops::Range<usize>) -> impl Strategy<Value = Polyline> {
    (prop::collection::vec((0.1f64..1.0, -1.2f64..1.2), n), any::<bool>()).prop_filter_map(
        "degenerate walk",
        |(steps, closed)| {
            let (mut x, mut y, mut heading) = (0.0, 0.0, 0.0f64);
            let mut pts = vec![Point::new(x, y)];
            for (len, turn) in steps {
                heading += turn;
                x += len * heading.cos();
                y += len * heading.sin();
                pts.push(Point::new(x, y));
            }
            let p = Polyline::from_vertices_lossy(pts, closed).ok()?;
            (p.len() >= 4).then_some(p)
        },
    )
}

/// Positive series spanning several orders of magnitude.
pub fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-8.0f64..8.0).prop_map(f64::exp), len)
}

pub fn bend_count_matches_interior_vertices(cases: u32) -> Result<(), String> {
    check(cases, polyline(3..60, 100.0), |curve| {
        let d = decompose(&curve).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(d.bends.len(), d.interior_vertex_count());
        prop_assert_eq!(d.bends.len(), curve.len() - 2);
        let apexes: BTreeSet<usize> = d.bends.iter().map(|b| d.vertex(b.apex)).collect();
        prop_assert_eq!(apexes.len(), d.bends.len());
        Ok(())
    })
}

pub fn headtail_scale_and_permutation_invariant(cases: u32) -> Result<(), String> {
    let strategy = series(1..300).prop_flat_map(|v| {
        let shuffled = Just(v.clone()).prop_shuffle();
        (Just(v), shuffled, -6.0f64..6.0)
    });
    check(cases, strategy, |(values, shuffled, log_scale)| {
        let base = head_tail_breaks(&values, 0.4).unwrap();
        let permuted = head_tail_breaks(&shuffled, 0.4).unwrap();
        prop_assert_eq!(&permuted, &base);

        let c = 10f64.powf(log_scale);
        let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
        let s = head_tail_breaks(&scaled, 0.4).unwrap();
        prop_assert_eq!(s.ht_index, base.ht_index);
        prop_assert_eq!(&s.class_counts, &base.class_counts);
        for (a, b) in s.breaks.iter().zip(&base.breaks) {
            prop_assert!((a / c - b).abs() <= 1e-12 * b, "break {} vs {}", a / c, b);
        }
        Ok(())
    })
}

/// Cells hit by points sampled every `box_size * step` along each segment.
///
/// A step shorter than a box crosses at most one vertical and one horizontal
/// grid line, so a thin corner clip between two samples shows up as a
/// diagonal jump; such intervals are bisected until the jump resolves.
pub fn raster_cells(curve: &Polyline, box_size: f64, origin: Point, step: f64) -> BTreeSet<(i64, i64)> {
    let cell = |p: Point| {
        (
            ((p.x - origin.x) / box_size).floor() as i64,
            ((p.y - origin.y) / box_size).floor() as i64,
        )
    };
    let mut cells = BTreeSet::new();
    for (a, b) in curve.segments() {
        let at = |t: f64| cell(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        let m = (a.distance(b) / (box_size * step)).ceil().max(1.0) as usize;
        for k in 0..=m {
            cells.insert(at(k as f64 / m as f64));
        }
        for k in 0..m {
            let mut stack = vec![(k as f64 / m as f64, (k + 1) as f64 / m as f64)];
            while let Some((t0, t1)) = stack.pop() {
                let (c0, c1) = (at(t0), at(t1));
                if c0.0 == c1.0 || c0.1 == c1.1 || t1 - t0 < 1e-15 {
                    continue;
                }
                let mid = 0.5 * (t0 + t1);
                cells.insert(at(mid));
                stack.push((t0, mid));
                stack.push((mid, t1));
            }
        }
    }
    cells
}

pub fn count_boxes_matches_raster(cases: u32, step: f64) -> Result<(), String> {
    let strategy = (
        polyline(2..8, 10.0),
        0.5f64..4.0,
        (-25.0f64..-10.0, -25.0f64..-10.0),
    );
    check(cases, strategy, |(curve, size, (ox, oy))| {
        let origin = Point::new(ox, oy);
        let want = raster_cells(&curve, size, origin, step).len();
        prop_assert_eq!(count_boxes(&curve, size, origin).unwrap(), want);
        Ok(())
    })
}

pub fn generalize_identity_and_monotone(cases: u32) -> Result<(), String> {
    check(cases, walk(20..150), |curve| {
        let d = decompose(&curve).unwrap();
        let sizes = bend_sizes(&d, true);
        prop_assume!(!sizes.is_empty());
        let ht = head_tail_breaks(&sizes, 0.4).unwrap();
        let d = assign_classes(&d, &ht).unwrap();
        prop_assert_eq!(&generalize(&curve, &d, 1).unwrap(), &curve);
        let mut previous = curve.len();
        for level in 2..=ht.ht_index + 1 {
            let g = generalize(&curve, &d, level).unwrap();
            prop_assert!(g.len() <= previous, "level {} grew to {}", level, g.len());
            previous = g.len();
        }
        prop_assert_eq!(previous, 2);
        Ok(())
    })
}

/// Two runs per seed, parallel then sequential, must serialize identically.
pub fn reports_are_byte_identical(seeds: &[u64], replicates: usize) -> Result<(), String> {
    let curves = [
        ("spiral", bendscale::geometry::gen_log_spiral_default(300).unwrap()),
        (
            "fixture",
            bendscale::io::parse_geometry(&fixture_path(), bendscale::io::GeometryFormat::GeoJson)
                .map_err(|e| e.to_string())?,
        ),
    ];
    for (id, curve) in &curves {
        for &seed in seeds {
            let mut outputs = Vec::new();
            for execution in [Execution::Parallel, Execution::Parallel, Execution::Sequential] {
                let opts = AnalysisOptions {
                    replicates,
                    execution,
                    ..AnalysisOptions::default()
                };
                let report = analyze(curve, id, seed, &opts).map_err(|e| e.to_string())?;
                outputs.push(to_json_string(&report).map_err(|e| e.to_string())?);
            }
            if outputs.iter().any(|o| *o != outputs[0]) {
                return Err(format!("{id} seed {seed}: reports differ"));
            }
        }
    }
    Ok(())
}
