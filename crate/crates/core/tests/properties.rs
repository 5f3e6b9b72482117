mod common;

use bendscale::bends::{assign_classes, bend_sizes, decompose};
use bendscale::boxcount::box_dimension;
use bendscale::geometry::{gen_half_circle, gen_log_spiral_default, smooth_bezier};
use bendscale::headtail::head_tail_breaks;
use bendscale::io::{parse_geometry, GeometryFormat};
use proptest::prelude::*;

#[test]
fn bend_count_equals_interior_vertices() {
    common::bend_count_matches_interior_vertices(1000).unwrap();
}

#[test]
fn headtail_ignores_scale_and_order() {
    common::headtail_scale_and_permutation_invariant(1000).unwrap();
}

#[test]
fn count_boxes_matches_rasterization() {
    common::count_boxes_matches_raster(100, 1e-3).unwrap();
}

#[test]
fn generalize_levels() {
    common::generalize_identity_and_monotone(300).unwrap();
}

#[test]
fn reports_repeat_exactly() {
    common::reports_are_byte_identical(&[1, 42], 20).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(300) })]

    #[test]
    fn class_counts_partition_the_series(values in common::series(1..400), limit in 0.05f64..1.0) {
        let r = head_tail_breaks(&values, limit).unwrap();
        prop_assert_eq!(r.class_counts.iter().sum::<usize>(), values.len());
        prop_assert_eq!(r.class_counts.len() as u32, r.ht_index);
        prop_assert!(r.breaks.windows(2).all(|w| w[0] < w[1]));
        for &v in &values {
            prop_assert!((1..=r.ht_index).contains(&r.class_of(v)));
        }
        // every split but possibly the last kept the head within the limit
        let n = r.head_fractions.len();
        prop_assert!(r.head_fractions.iter().take(n.saturating_sub(1)).all(|&f| f <= limit));
    }

    /// Restarting from the values of class `k < ht` and above replays the rest of
    /// the run. The final head of a run that stopped for lack of a split
    /// (rather than on the limit) has no further structure.
    #[test]
    fn heads_replay_the_rest_of_the_run(values in common::series(1..400)) {
        let r = head_tail_breaks(&values, 0.4).unwrap();
        for k in 2..r.ht_index {
            let head: Vec<f64> = values.iter().copied().filter(|&v| r.class_of(v) >= k).collect();
            let sub = head_tail_breaks(&head, 0.4).unwrap();
            prop_assert_eq!(sub.ht_index, r.ht_index - (k - 1));
            prop_assert_eq!(&sub.breaks[..], &r.breaks[k as usize - 1..]);
        }
        if r.head_fractions.last().is_none_or(|&f| f <= 0.4) {
            let head = r.final_head(&values);
            prop_assert_eq!(head_tail_breaks(&head, 0.4).unwrap().ht_index, 1);
        }
    }

    #[test]
    fn bends_survive_rigid_motion(
        curve in common::walk(10..120),
        angle in -3.2f64..3.2,
        dx in -1e3f64..1e3,
        dy in -1e3f64..1e3,
    ) {
        let moved = curve.rigid_motion(angle, dx, dy).unwrap();
        let a = decompose(&curve).unwrap();
        let b = decompose(&moved).unwrap();
        let scale = 1e-9 * (1.0 + dx.abs() + dy.abs());
        // apex choice may flip between near-equal offsets, so compare sizes
        let mut sa = bend_sizes(&a, false);
        let mut sb = bend_sizes(&b, false);
        sa.sort_by(f64::total_cmp);
        sb.sort_by(f64::total_cmp);
        prop_assert_eq!(sa.len(), sb.len());
        if a.bends.iter().map(|x| x.apex).eq(b.bends.iter().map(|x| x.apex)) {
            for (x, y) in sa.iter().zip(&sb) {
                prop_assert!((x - y).abs() <= scale, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn smoothing_interpolates_vertices(curve in common::walk(4..60), m in 1usize..8) {
        let s = smooth_bezier(&curve, m).unwrap();
        let n = curve.len();
        prop_assert_eq!(s.len(), if curve.is_closed() { n * m } else { (n - 1) * m + 1 });
        for (i, p) in curve.points().iter().enumerate() {
            prop_assert_eq!(s.points()[i * m], *p);
        }
    }
}

#[test]
fn box_dimension_survives_rigid_motion() {
    let spiral = gen_log_spiral_default(720).unwrap();
    let fixture = parse_geometry(&common::fixture_path(), GeometryFormat::GeoJson).unwrap();
    for curve in [spiral, fixture] {
        let d0 = box_dimension(&curve, 10).unwrap().dimension;
        for (angle, dx, dy) in [(0.3, 10.0, -5.0), (1.9, -200.0, 40.0), (-2.6, 0.5, 0.25)] {
            let d = box_dimension(&curve.rigid_motion(angle, dx, dy).unwrap(), 10).unwrap().dimension;
            assert!((d - d0).abs() <= 0.03, "{d0} vs {d} at angle {angle}");
        }
    }
}

#[test]
fn half_circle_generalization_keeps_the_top() {
    let c = gen_half_circle(6000, 1.0).unwrap();
    let d = decompose(&c).unwrap();
    let ht = head_tail_breaks(&bend_sizes(&d, true), 0.4).unwrap();
    let d = assign_classes(&d, &ht).unwrap();
    let mut previous = usize::MAX;
    for level in 1..=ht.ht_index {
        let g = bendscale::bends::generalize(&c, &d, level).unwrap();
        assert!(g.len() < previous);
        previous = g.len();
        let top = g.points().iter().any(|p| p.x.abs() < 1e-3 && (p.y - 1.0).abs() < 1e-6);
        assert!(top, "level {level} lost the top of the arc");
    }
}

#[test]
fn fourteen_vertex_outline_densifies_to_25k_vertices() {
    let outline = bendscale::geometry::gen_midpoint_ring(1, 0.3, 3).unwrap().points()[..12].to_vec();
    let mut pts = outline;
    pts.push(bendscale::Point::new(2.0, 0.5));
    pts.push(bendscale::Point::new(2.5, -0.5));
    let curve = bendscale::Polyline::open(pts).unwrap();
    assert_eq!(curve.len(), 14);
    assert_eq!(smooth_bezier(&curve, 1970).unwrap().len(), 25_611);
}
