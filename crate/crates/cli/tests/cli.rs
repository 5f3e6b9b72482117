use std::path::Path;
use std::process::{Command, Output};

fn bendscale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bendscale"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "0,0\n1,zz\n").unwrap();
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "1 2 3\n").unwrap();

    assert_eq!(bendscale(&["--help"]).status.code(), Some(0));
    assert_eq!(bendscale(&["boxdim", path(&bad)]).status.code(), Some(2));
    assert_eq!(bendscale(&["fit-powerlaw", path(&short)]).status.code(), Some(3));
    assert_eq!(bendscale(&["gen", "koch", "--iterations", "10"]).status.code(), Some(4));
    assert_eq!(bendscale(&["gen", "half-circle", "--n", "2"]).status.code(), Some(4));
    assert_eq!(bendscale(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(bendscale(&["ht", path(&short), "--head-limit", "1.5"]).status.code(), Some(4));
    assert_eq!(bendscale(&["boxdim", "/nonexistent/x.csv"]).status.code(), Some(1));
    let parse = bendscale(&["boxdim", path(&bad)]);
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 2"));
}

#[test]
fn zipf_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("zipf.txt");
    assert!(bendscale(&["gen", "zipf", "--n", "10", "-o", path(&z)]).status.success());
    let out = bendscale(&["ht", path(&z)]);
    let text = stdout(&out);
    assert!(text.contains("ht_index: 3"), "{text}");
    assert!(text.contains("class_counts: 7, 2, 1"), "{text}");

    let json: serde_json::Value = serde_json::from_slice(&bendscale(&["--json", "ht", path(&z)]).stdout).unwrap();
    assert_eq!(json["ht_index"], 3);
    assert!((json["breaks"][0].as_f64().unwrap() - 0.2929).abs() < 5e-4);
}

#[test]
fn analyze_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("spiral.geojson");
    assert!(bendscale(&["gen", "spiral", "--n", "300", "-o", path(&curve)]).status.success());
    let run = |out: &Path| {
        let o = bendscale(&["analyze", path(&curve), "--replicates", "200", "--seed", "7", "-o", path(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run(&dir.path().join("a.json"));
    let b = run(&dir.path().join("b.json"));
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["curve_id"], "spiral");
    assert_eq!(report["ht_index"], 5);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["parameters"]["replicates"], 200);
    assert_eq!(report["recurrence_count"], 4);
    // floats carry 17 significant digits
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().any(|l| l.contains("\"alpha\": 1.50") && l.contains('e')), "{text}");
}

#[test]
fn formats_convert_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let wkt = dir.path().join("ring.wkt");
    let csv = dir.path().join("ring.csv");
    assert!(bendscale(&["gen", "midpoint-ring", "--levels", "5", "-o", path(&wkt)]).status.success());
    assert!(std::fs::read_to_string(&wkt).unwrap().starts_with("LINESTRING ("));
    assert!(bendscale(&["smooth", path(&wkt), "--factor", "1", "-o", path(&csv)]).status.success());
    let a = stdout(&bendscale(&["--json", "boxdim", path(&wkt)]));
    let b = stdout(&bendscale(&["--json", "boxdim", path(&csv)]));
    assert_eq!(a, b);
}

#[test]
fn generalize_and_smooth_change_vertex_counts() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("hc.csv");
    assert!(bendscale(&["gen", "half-circle", "--n", "250", "-o", path(&c)]).status.success());
    let lines = |p: &Path| std::fs::read_to_string(p).unwrap().lines().count() - 1;
    assert_eq!(lines(&c), 250);

    let s = dir.path().join("smooth.csv");
    assert!(bendscale(&["smooth", path(&c), "--factor", "6", "-o", path(&s)]).status.success());
    assert_eq!(lines(&s), 249 * 6 + 1);

    let mut previous = usize::MAX;
    for level in 1..=5 {
        let g = dir.path().join(format!("g{level}.csv"));
        let out = bendscale(&["generalize", path(&c), "--level", &level.to_string(), "-o", path(&g)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let n = lines(&g);
        assert!(n < previous);
        previous = n;
    }
    assert_eq!(previous, 2);
    assert_eq!(bendscale(&["generalize", path(&c), "--level", "6"]).status.code(), Some(4));
}

#[test]
fn plot_data_tables() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.txt");
    std::fs::write(&v, "1\n0.5\n0.3333333333333333\n").unwrap();
    let out = stdout(&bendscale(&["plot-data", path(&v), "--values", "--kind", "rank-size"]));
    assert!(out.starts_with("rank,size\n1,1\n2,0.5\n3,0.333"), "{out}");

    let k = dir.path().join("k.geojson");
    assert!(bendscale(&["gen", "koch", "--iterations", "4", "-o", path(&k)]).status.success());
    let classed = dir.path().join("classed.csv");
    assert!(bendscale(&["plot-data", path(&k), "--kind", "classed-bends", "-o", path(&classed)]).status.success());
    let table = std::fs::read_to_string(&classed).unwrap();
    assert!(table.starts_with("vertex,x,y,class\n0,0,0,0\n"));
    assert_eq!(table.lines().count(), 257 + 1);

    let boxes = stdout(&bendscale(&["plot-data", path(&k), "--kind", "boxcount-loglog", "--box-levels", "5"]));
    assert_eq!(boxes.lines().next(), Some("box_size,count,log_inv_size,log_count"));
    assert_eq!(boxes.lines().count(), 6);

    let bad = bendscale(&["plot-data", path(&k), "--kind", "histogram"]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn straight_line_is_reported_not_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let line = dir.path().join("line.csv");
    let body: String = (0..100).map(|i| format!("{i},0\n")).collect();
    std::fs::write(&line, format!("x,y\n{body}")).unwrap();
    let out = bendscale(&["--json", "analyze", path(&line), "--replicates", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["ht_index"], 1);
    assert_eq!(r["n_bends"], 0);
    assert_eq!(r["is_fractal_def3"], false);
    assert_eq!(r["alpha"], serde_json::Value::Null);
}
