use extgeom::curve::{build_complement_graph, complement_bbox, john_constant, weighted_geodesic};
use extgeom::dimension::{box_dimension, polygon_segments};
use extgeom::domain::{build_cone_domain, build_koch_snowflake};
use extgeom::dyadic::{check_whitney_bounds, whitney_of_open_set, DomainRegion, Side};
use extgeom::report::{emit_report, run_sweep, ExperimentConfig};
use extgeom::{Domain32, Point32};

#[test]
fn single_precision_pipeline_runs() {
    let d: Domain32 = build_koch_snowflake(1.0f32 / 3.0, 6).unwrap();
    let region = DomainRegion::new(&d, Side::Interior);
    let w = whitney_of_open_set(&region, &d.bbox().expand(0.1), 7, 1.0).unwrap();
    assert!(w.len() > 100);
    assert!(check_whitney_bounds(&w, &region).is_empty());
    let fit = box_dimension(&polygon_segments(d.vertices()), 2, 6, 1.0, None).unwrap();
    assert!((fit.slope - 1.26).abs() < 0.1, "{}", fit.slope);
    let cone = build_cone_domain(0.25f32).unwrap();
    let g = build_complement_graph(&cone, &complement_bbox(&cone), 1.0 / 32.0, 1.5).unwrap();
    let r = weighted_geodesic(&g, Point32::new(-0.6, 0.0), Point32::new(0.6, 0.0)).unwrap();
    assert!(r.functional.is_finite() && r.functional > 0.0);
}

#[test]
fn cone_john_constant_tracks_the_aperture() {
    let d = build_cone_domain(0.25).unwrap();
    let j = john_constant(&d, d.diam() / 512.0, 8, 3).unwrap();
    assert!(j.j > 0.15 && j.j < 0.3, "{}", j.j);
}

#[test]
fn sweep_writes_every_report_file() {
    let dir = std::env::temp_dir().join(format!("extgeom-pipeline-{}", std::process::id()));
    let cfg = ExperimentConfig::parse("domain = koch\nlambda = 1/3\ndepth = 8\nanalyses = whitney, boxdim\nk_min = 4\nk_max = 8\nwhitney_level = 8").unwrap();
    let records = run_sweep(&cfg).unwrap();
    assert!(records.iter().all(|r| r.pass), "{records:?}");
    let outcome = emit_report(&records, &dir).unwrap();
    assert_eq!(outcome.exit_code, 0);
    for f in ["report.json", "report.csv", "raw.csv", "report.txt"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
