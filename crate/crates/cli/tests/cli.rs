use std::f64::consts::{FRAC_PI_6, PI};
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_scq")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, s) = run(args);
    (code, serde_json::from_str(&s).unwrap_or_else(|e| panic!("{e}: {s}")))
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn csv_rows(s: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn header_ok(doc: &Value) {
    assert!(doc["tool_version"].is_string());
    assert!(doc["tolerances"]["spps_tail"].as_f64().unwrap() > 0.0);
}

#[test]
fn identity_map() {
    let (code, d) = json(&["map", "--alpha", "1", "--lambda", "0", "--t", "0.5"]);
    assert_eq!(code, 0);
    header_ok(&d);
    let (w1, w1i) = pair(&d["w1"]);
    assert!((w1 - 1.0).abs() < 1e-10 && w1i == 0.0);
    let (p_re, p_im) = pair(&d["p2"]);
    assert!(p_re == 0.0 && (p_im - 1.0).abs() < 1e-10);
    assert!((d["kappa1"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let boundary = d["boundary"].as_array().unwrap();
    assert_eq!(boundary.len(), 257);
    for p in boundary {
        let (x, y) = pair(p);
        assert!((x.hypot(y) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn extremal_map_has_meeting_vertices() {
    let (code, d) = json(&["map", "--alpha", "0.2", "--t", "0.5236", "--lambda", "1.30611"]);
    assert_eq!(code, 0);
    let turned = d["kappa2"].as_f64().unwrap() * pair(&d["p2"]).1;
    assert!((turned - 1.0 - (0.2 * PI).sin()).abs() < 1e-4, "{turned}");
}

#[test]
fn rectangle_and_disk_problems_agree() {
    let (_, r) = json(&["map", "--alpha", "0.4", "--tau", "1.3i", "--mu", "0.2"]);
    assert_eq!(r["problem"], "rectangle");
    let t = r["t"].as_f64().unwrap().to_string();
    let (_, d) = json(&["map", "--alpha", "0.4", "--t", &t, "--mu", "0.2"]);
    assert!((r["kappa1"].as_f64().unwrap() - d["kappa1"].as_f64().unwrap()).abs() < 1e-7);
    assert!((pair(&r["p2"]).1 - pair(&d["p2"]).1).abs() < 1e-7);
}

#[test]
fn malformed_input_is_a_usage_error() {
    for args in [
        &["map", "--alpha", "1", "--bogus", "2"][..],
        &["map", "--alpha", "x", "--t", "0.5", "--lambda", "0"],
        &["map", "--alpha", "1", "--t", "0.5", "--lambda", "0", "--tol", "-1"],
        &["univalence", "--alpha", "0.5", "--grid", "1"],
        &["map", "--alpha", "1", "--lambda", "0"],
        &["frobnicate"],
    ] {
        let (code, d) = json(args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(d["error"]["kind"], "usage", "{args:?}");
        header_ok(&d);
    }
}

#[test]
fn inverse_problem_recovers_forward_values() {
    let (_, fwd) = json(&["map", "--alpha", "0.3", "--t", "0.7", "--lambda", "0.2"]);
    let k = fwd["kappa1"].as_f64().unwrap().to_string();
    let p = pair(&fwd["p2"]).1.to_string();
    let (code, inv) = json(&["params", "--alpha", "0.3", "--kappa1", &k, "--p2", &p]);
    assert_eq!(code, 0);
    assert!((inv["t"].as_f64().unwrap() - 0.7).abs() < 1e-8);
    assert!((inv["lambda"].as_f64().unwrap() - 0.2).abs() < 1e-8);
}

#[test]
fn single_univalence_interval() {
    let t = FRAC_PI_6.to_string();
    let (code, d) = json(&["univalence", "--alpha", "0.2", "--t", &t]);
    assert_eq!(code, 0);
    header_ok(&d);
    assert!((d["lambda_min"].as_f64().unwrap() + 0.479608).abs() < 1e-6);
    assert!((d["lambda_max"].as_f64().unwrap() - 1.30611).abs() < 1e-5);
    assert_eq!(d["status"], "ok");
}

#[test]
fn univalence_sweep_rows() {
    let (code, s) = run(&["univalence", "--alpha", "0.5", "--grid", "50"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&s);
    assert_eq!(
        header,
        [
            "t",
            "lambda_min",
            "lambda_max",
            "arccot4lambda_min",
            "arccot4lambda_max",
            "sturm_lo",
            "sturm_hi",
            "nehari_lo",
            "nehari_hi",
            "status"
        ]
    );
    assert_eq!(rows.len(), 50);
    for (k, r) in rows.iter().enumerate() {
        let t: f64 = r[0].parse().unwrap();
        assert!((t - (k + 1) as f64 * PI / 2.0 / 51.0).abs() < 1e-14);
        for c in [&r[3], &r[4]] {
            let v: f64 = c.parse().unwrap();
            assert!(v > 0.0 && v < PI);
        }
        assert_eq!(r[9], "ok");
    }
}

#[test]
fn covering_table() {
    let (code, s) = run(&["fuchsian", "--table"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&s);
    assert_eq!(header, ["a", "t", "s_over_pi", "Hprime0", "trace"]);
    assert_eq!(rows.len(), 9);
    let reference =
        [(0.1, 1.37146, 0.32213, 11.027), (0.5, 0.64350, 0.13330, 86.582), (0.9, 0.10517, 0.02132, 3560.92)];
    for (a, t, s, tr) in reference {
        let r = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == a).unwrap();
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - t).abs() <= 1e-5);
        assert!((v[2] - s).abs() <= 2e-5);
        assert!(((v[4] - tr) / tr).abs() <= 1e-3);
        assert!(v[3] > 0.0 && v[3] < 1.0);
    }
}

#[test]
fn geodesic_polyline_winds_around_both_punctures() {
    let (code, s) = run(&["fuchsian", "--a", "0.5", "--geodesic", "256"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&s);
    assert_eq!(header, ["x", "y"]);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert_eq!(pts.first(), pts.last());
    let winding = |cx: f64| {
        let total: f64 = pts
            .windows(2)
            .map(|w| {
                let (a, b) = ((w[0].0 - cx, w[0].1), (w[1].0 - cx, w[1].1));
                (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1)
            })
            .sum();
        (total / (2.0 * PI)).round() as i32
    };
    assert_eq!(winding(0.5), 1);
    assert_eq!(winding(-0.5), 1);
    assert_eq!(winding(0.0), 1);
    assert!(pts.iter().all(|p| p.0.hypot(p.1) < 1.0));
}

#[test]
fn puncture_outside_disk_is_a_domain_error() {
    let (code, d) = json(&["fuchsian", "--a", "1.5"]);
    assert_eq!(code, 2);
    assert_eq!(d["error"]["kind"], "domain");
    header_ok(&d);
}

#[test]
fn single_cover_document() {
    let (code, d) = json(&["fuchsian", "--a", "0.5"]);
    assert_eq!(code, 0);
    assert!((d["s_over_pi"].as_f64().unwrap() - 0.1333).abs() < 2e-5);
    let a1 = &d["A1"];
    assert_eq!(a1.as_array().unwrap().len(), 2);
    assert!(pair(&a1[0][0]).0.is_finite());
}

#[test]
fn wp_zero_documents() {
    let (code, d) = json(&["wp-zero", "--tau", "i"]);
    assert_eq!(code, 0);
    let (zx, zy) = pair(&d["z0"]);
    let w1 = pair(&d["omega1"]).0;
    let w2 = pair(&d["omega2"]).1;
    assert!((zx - w1).abs() < 1e-10 && (zy - w2).abs() < 1e-10);
    for tau in ["0.3i", "0.8i", "1.7i", "4i"] {
        let (code, d) = json(&["wp-zero", "--tau", tau]);
        assert_eq!(code, 0, "{tau}");
        assert!(d["residual"].as_f64().unwrap() < 1e-8, "{tau}");
    }
    for tau in ["0.7", "0.2+1i", "-1i"] {
        let (code, d) = json(&["wp-zero", "--tau", tau]);
        assert_eq!(code, 2, "{tau}");
        assert_eq!(d["error"]["kind"], "domain");
    }
}

#[test]
fn geometry_from_right_edge() {
    let (code, d) = json(&["geometry", "--alpha", "0.3", "--kappa1", "0.8", "--theta1", "0.9"]);
    assert_eq!(code, 0);
    assert!((d["interior_angle"].as_f64().unwrap() - 0.3 * PI).abs() < 1e-10);
    let (code, d) = json(&["geometry", "--alpha", "0.3", "--height", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(pair(&d["v"]), (1.0, 0.5));
}

#[test]
fn output_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("boundary.csv");
    let p = path.to_str().unwrap();
    let (code, s) = run(&[
        "map", "--alpha", "1", "--t", "0.5", "--lambda", "0", "--steps", "16", "--format", "csv", "--out", p,
    ]);
    assert_eq!(code, 0);
    assert!(s.is_empty());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["x", "y"]);
    assert_eq!(rows.len(), 17);
}

#[test]
fn output_is_deterministic() {
    let args = ["map", "--alpha", "0.6", "--t", "0.9", "--lambda", "0.1", "--steps", "32"];
    assert_eq!(run(&args).1, run(&args).1);
}
