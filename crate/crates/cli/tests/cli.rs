use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

const BIN: &str = env!("CARGO_BIN_EXE_geodesic-lab");

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("GEODESIC_LAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Value printed after `key` on its own line.
fn field(out: &Output, key: &str) -> f64 {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse::<f64>()))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{}", stdout(out)))
        .unwrap()
}

fn write_curve(dir: &Path, name: &str, radius: f64, closed: bool, points: &[[f64; 3]]) -> PathBuf {
    let mut text = format!("r={radius},closed={}\n", u8::from(closed));
    for p in points {
        text.push_str(&format!("{},{},{}\n", p[0], p[1], p[2]));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn latitude(z: f64, n: usize) -> Vec<[f64; 3]> {
    let rho = (1.0 - z * z).sqrt();
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [rho * t.cos(), rho * t.sin(), z]
        })
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn crofton_on_the_equator() {
    let dir = tempfile::tempdir().unwrap();
    let eq = write_curve(dir.path(), "eq.csv", 1.0, true, &latitude(0.0, 128));
    let out = run(&["crofton", path_str(&eq), "--samples", "100000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!((field(&out, "estimate") - 2.0 * PI).abs() < 1e-6);
    assert!((field(&out, "ratio") - 1.0).abs() < 1e-6);
    let json_line = stdout(&out).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&json_line).unwrap();
    assert_eq!(v["crofton"]["samples"], 100000);
}

#[test]
fn crofton_on_a_one_radian_arc() {
    let dir = tempfile::tempdir().unwrap();
    let arc: Vec<[f64; 3]> = (0..=10).map(|k| [(0.1 * k as f64).cos(), (0.1 * k as f64).sin(), 0.0]).collect();
    let path = write_curve(dir.path(), "arc.csv", 1.0, false, &arc);
    let out = run(&["crofton", path_str(&path), "--samples", "100000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((field(&out, "estimate") - 1.0).abs() < 0.02);
    assert!((field(&out, "exact_length") - 1.0).abs() < 1e-12);
}

#[test]
fn crofton_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["crofton", path_str(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "r=1,closed=1\n1,0,0\n0,1,0\n0,0,one\n").unwrap();
    let out = run(&["crofton", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
    let eq = write_curve(dir.path(), "eq.csv", 1.0, true, &latitude(0.0, 16));
    assert_eq!(run(&["crofton", path_str(&eq), "--samples", "10"]).status.code(), Some(2));
}

#[test]
fn greatcircle_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let north = write_curve(dir.path(), "n.csv", 2.0, true, &latitude(0.5, 40));
    let out = run(&["greatcircle-test", path_str(&north)]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let pole: Vec<f64> = line
        .trim()
        .strip_prefix("MISSES pole=(")
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or_else(|| panic!("unexpected output {line}"))
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((pole[2] - 1.0).abs() < 1e-6);

    let eq = write_curve(dir.path(), "eq.csv", 1.0, true, &latitude(0.0, 40));
    let out = run(&["greatcircle-test", path_str(&eq)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "MEETS-ALL");

    // A short zig-zag loop around the north pole region.
    let short: Vec<[f64; 3]> = (0..12)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 12.0;
            let z = if k % 2 == 0 { 0.3 } else { 0.6 };
            let rho = (1.0 - z * z as f64).sqrt();
            [rho * t.cos(), rho * t.sin(), z]
        })
        .collect();
    let path = write_curve(dir.path(), "short.csv", 1.0, true, &short);
    assert!(stdout(&run(&["greatcircle-test", path_str(&path)])).starts_with("MISSES"));

    let open = write_curve(dir.path(), "open.csv", 1.0, false, &latitude(0.0, 8));
    assert_eq!(run(&["greatcircle-test", path_str(&open)]).status.code(), Some(2));
}

#[test]
fn minsurf_equator_reaches_the_disk_area() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("m.obj");
    let out = run(&[
        "minsurf", "--radius", "1", "--boundary", "equator", "--refine", "5", "--through-center", "--out",
        path_str(&obj),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let ratio = field(&out, "ratio");
    assert!((0.98..=1.02).contains(&ratio), "ratio {ratio}");
    let text = fs::read_to_string(&obj).unwrap();
    assert!(text.contains("# R=1"));
    assert!(text.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn minsurf_wavy_through_center_is_at_least_geodesic() {
    let out = run(&["minsurf", "--radius", "1", "--boundary", "wavy:3:0.25", "--refine", "4", "--through-center"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(field(&out, "ratio") >= 0.97);
}

#[test]
fn minsurf_exit_codes() {
    assert_eq!(run(&["minsurf", "--radius", "1", "--refine", "0"]).status.code(), Some(2));
    assert_eq!(run(&["minsurf", "--radius", "1", "--boundary", "spiral"]).status.code(), Some(2));
    assert_eq!(run(&["minsurf", "--radius", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["minsurf", "--radius", "1", "--boundary", "file:/no/such.csv"]).status.code(), Some(2));
    let out = run(&["minsurf", "--radius", "1", "--boundary", "wavy:2:0.3", "--refine", "3", "--max-iters", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("no/such/dir/m.obj");
    let out = run(&["minsurf", "--radius", "1", "--refine", "2", "--out", path_str(&unwritable)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn minsurf_accepts_file_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_curve(dir.path(), "loop.csv", 1.0, true, &latitude(0.2, 16));
    let spec = format!("file:{}", path.display());
    let out = run(&["minsurf", "--radius", "1.5", "--boundary", &spec, "--refine", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn bound_examples() {
    let out = run(&["bound", "--h", "2", "--area", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&out, "n(h)"), 13.0);
    for r in ["0.3", "1", "2.5"] {
        let out = run(&["bound", "--h", "1", "--R", r]);
        assert_eq!(field(&out, "n(h)"), 1.0);
    }

    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("p.json");
    fs::write(&profile, r#"{"label":"s","samples":[{"inj":0.5,"dist":0.7},{"inj":0.6,"dist":0.4}]}"#).unwrap();
    let out = run(&["bound", "--h", "2", "--profile", path_str(&profile), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["r"], 0.4);
    let direct = run(&["bound", "--h", "2", "--R", "0.4", "--json"]);
    assert_eq!(stdout(&out), stdout(&direct));

    let out = run(&["bound", "--table", "3", "--area", "1"]);
    let rows: Vec<String> = stdout(&out).lines().skip(2).map(String::from).collect();
    let n: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(n, ["1", "1", "13", "26"]);
}

#[test]
fn bound_input_errors() {
    assert_eq!(run(&["bound", "--h", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--h", "2", "--R", "1", "--area", "3"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--R", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--h", "-1", "--R", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--h", "2", "--R", "0"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--h", "2", "--profile", "/no/such.json"]).status.code(), Some(2));
}

#[test]
fn general_input_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run_with_env(&["bound", "--h", "2", "--area", "1"], &[("GEODESIC_LAB_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_with_env(&["bound", "--h", "2", "--area", "1"], &[("GEODESIC_LAB_THREADS", "2")]);
    assert_eq!(out.status.code(), Some(0));
}

fn strip_runtimes(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("runtime_seconds");
    }
    v
}

#[test]
fn quick_verification_is_fast_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let start = Instant::now();
    let out = run_with_env(
        &["verify", "--seed", "7", "--level", "quick", "--out", path_str(&a)],
        &[("GEODESIC_LAB_THREADS", "1")],
    );
    assert!(start.elapsed().as_secs_f64() < 60.0);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run_with_env(
        &["verify", "--seed", "7", "--level", "quick", "--out", path_str(&b)],
        &[("GEODESIC_LAB_THREADS", "3")],
    );
    assert_eq!(out.status.code(), Some(0));
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    assert_eq!(strip_runtimes(&ta), strip_runtimes(&tb));
    assert_eq!(strip_runtimes(&ta)["schema"], 1);
}

#[test]
fn verify_input_errors() {
    assert_eq!(run(&["verify", "--level", "medium"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let locked = dir.path().join("locked");
    fs::create_dir(&locked).unwrap();
    let mut perms = fs::metadata(&locked).unwrap().permissions();
    perms.set_readonly(true);
    fs::set_permissions(&locked, perms).unwrap();
    // Root ignores directory permissions, so also try a path under a regular file.
    let under_file = dir.path().join("file");
    fs::write(&under_file, "").unwrap();
    for target in [locked.join("r.json"), under_file.join("r.json")] {
        let probe = fs::File::create(&target);
        if probe.is_ok() {
            let _ = fs::remove_file(&target);
            continue;
        }
        let start = Instant::now();
        let out = run(&["verify", "--level", "quick", "--out", path_str(&target)]);
        assert_eq!(out.status.code(), Some(2));
        assert!(start.elapsed().as_secs_f64() < 5.0, "should fail before running checks");
    }
}
