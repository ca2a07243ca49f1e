use extgeom::curve::{cone_explicit_curve, curve_functional};
use extgeom::domain::{build_cone_domain, build_regular_polygon, Domain, KochSnowflake};
use extgeom::dyadic::{layer_count, whitney_of_square};
use extgeom::geom::{point_segment_distance, segment_meets_closed_rect, segment_rect_distance, Point, Rect};
use extgeom::porosity::epsilon_schedule;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -4.0..4.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segment_rect_distance_is_zero_exactly_on_contact(
        ax in coord(), ay in coord(), bx in coord(), by in coord(),
        x0 in coord(), y0 in coord(), w in 0.01..2.0f64, h in 0.01..2.0f64,
    ) {
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        let r = Rect::from_coords(x0, y0, x0 + w, y0 + h);
        let d = segment_rect_distance(a, b, &r);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d == 0.0, segment_meets_closed_rect(a, b, &r));
        // Never more than the distance from the rectangle's corners to the segment.
        let corner = r.corners().iter().map(|&c| point_segment_distance(c, a, b)).fold(f64::INFINITY, f64::min);
        prop_assert!(d <= corner + 1e-12);
    }

    #[test]
    fn epsilon_schedule_lands_in_its_dyadic_window(c in 1.0..1e6f64) {
        let s = epsilon_schedule(c).unwrap();
        prop_assert!(s.eps > 2f64.powi(-15) / c && s.eps <= 2f64.powi(-14) / c);
        prop_assert_eq!(s.eps, 2f64.powi(-s.m));
        prop_assert!(!s.clamped);
    }

    #[test]
    fn cone_json_round_trips(eps in 0.01..0.49f64) {
        let d = build_cone_domain(eps).unwrap();
        let back = Domain::<f64>::from_json(&d.to_json()).unwrap();
        prop_assert_eq!(back.vertices(), d.vertices());
        prop_assert!((d.area() - (4.0 + eps)).abs() < 1e-12);
    }

    #[test]
    fn koch_edge_addresses_invert(lambda in (1.0 / 3.0)..0.49f64, depth in 1usize..6, seed in any::<u64>()) {
        let ks = KochSnowflake::new(lambda).unwrap();
        let j = (seed % (3 * 4u64.pow(depth as u32))) as usize;
        prop_assert_eq!(ks.edge_index(&ks.edge_address(depth, j)), j);
    }

    #[test]
    fn explicit_cone_curves_scale_with_the_functional(eps in 0.05..0.5f64, y1 in 0.0..0.9f64, x2 in 0.6..1.0f64, s in 0.25..4.0f64) {
        let d = build_cone_domain(eps).unwrap();
        let z1 = Point::new(-eps * (1.0 - y1), y1);
        let z2 = Point::new(x2, 0.0);
        let curve = cone_explicit_curve(eps, z1, z2).unwrap();
        let f = curve_functional(&d, &curve, 1.5).unwrap();
        let ds = Domain::new("scaled", Default::default(), d.vertices().iter().map(|&v| v * s).collect()).unwrap();
        let cs: Vec<_> = curve.iter().map(|&p| p * s).collect();
        let fs = curve_functional(&ds, &cs, 1.5).unwrap();
        prop_assert!((fs / (f * s.sqrt()) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn square_layers_follow_the_closed_form() {
    let w = whitney_of_square::<f64>(9);
    for j in 2..=9 {
        let n = 1usize << j;
        assert_eq!(layer_count(&w, j).unwrap(), (n - 2) * (n - 2) - (n - 4) * (n - 4));
    }
}

#[test]
fn polygon_boundary_distance_matches_the_apothem() {
    let d = build_regular_polygon(64, Point::new(0.0, 0.0), 1.0).unwrap();
    let apothem = (std::f64::consts::PI / 64.0).cos();
    assert!((d.distance_to_boundary(Point::origin()) - apothem).abs() < 1e-12);
}
