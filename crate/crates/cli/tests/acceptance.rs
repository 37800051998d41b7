//! Acceptance suite: runs `geodesic-lab verify --seed 42` at the full level
//! under two thread caps, re-judges every criterion from the reports, and
//! prints one PASS/FAIL line per criterion.

use std::fs;
use std::process::{Command, ExitCode};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_geodesic-lab");

fn verify(threads: &str, out: &std::path::Path) -> Value {
    let status = Command::new(BIN)
        .args(["verify", "--seed", "42", "--level", "full", "--out"])
        .arg(out)
        .env("GEODESIC_LAB_THREADS", threads)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    let text = fs::read_to_string(out).unwrap_or_else(|e| panic!("verify exited {status}, no report: {e}"));
    serde_json::from_str(&text).expect("report is JSON")
}

struct Report<'a>(&'a Value);

impl Report<'_> {
    fn check(&self, name: &str) -> &Value {
        self.0["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("report has no check `{name}`"))
    }

    fn measured(&self, name: &str) -> f64 {
        self.check(name)["measured"].as_f64().unwrap_or(f64::NAN)
    }

    fn passed(&self, name: &str) -> bool {
        self.check(name)["pass"].as_bool().unwrap()
    }

    fn seconds(&self, names: &[&str]) -> f64 {
        names.iter().map(|n| self.check(n)["runtime_seconds"].as_f64().unwrap()).sum()
    }

    fn size(&self, key: &str) -> u64 {
        self.0["sizes"][key].as_u64().unwrap()
    }
}

fn strip_runtimes(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("runtime_seconds");
    }
    v
}

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    summary: String,
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let single = verify("1", &dir.path().join("threads1.json"));
    let multi = verify("4", &dir.path().join("threads4.json"));
    let r = Report(&single);
    let mut outcomes = Vec::new();

    let gc = r.measured("crofton_great_circle");
    let poly = r.measured("crofton_random_polylines");
    let t1 = r.seconds(&["crofton_great_circle", "crofton_random_polylines"]);
    outcomes.push(Outcome {
        id: 1,
        title: "Crofton estimator",
        pass: r.size("crofton_samples") >= 100_000
            && r.size("crofton_curves") >= 50
            && gc <= 0.005
            && poly <= 1.0
            && t1 < 10.0,
        summary: format!(
            "great circle rel err {gc:.2e} (<= 0.005), worst polyline deviation {poly:.3} of allowance (<= 1), {t1:.2}s (< 10s)"
        ),
    });

    let short = r.measured("short_curves_miss_a_great_circle");
    let t2 = r.seconds(&["short_curves_miss_a_great_circle"]);
    outcomes.push(Outcome {
        id: 2,
        title: "short closed curves miss a great circle",
        pass: r.size("short_curves") >= 500 && short == 0.0 && t2 < 30.0,
        summary: format!("{short} violations over {} curves, {t2:.2}s (< 30s)", r.size("short_curves")),
    });

    let meets = r.measured("meets_all_curves_are_long");
    outcomes.push(Outcome {
        id: 3,
        title: "meets-all curves have Crofton length >= 2πr",
        pass: r.size("meets_all_curves") >= 50 && meets == 0.0 && r.passed("meets_all_curves_are_long"),
        summary: format!(
            "{meets} violations; {}",
            r.check("meets_all_curves_are_long")["detail"].as_str().unwrap_or_default()
        ),
    });

    let e1 = r.measured("monotonicity_equator_r1");
    let e2 = r.measured("monotonicity_equator_r2");
    let rnd = r.measured("monotonicity_random_boundaries");
    let t4 = r.seconds(&["monotonicity_equator_r1", "monotonicity_equator_r2", "monotonicity_random_boundaries"]);
    outcomes.push(Outcome {
        id: 4,
        title: "minimal disks through the center",
        pass: r.size("monotonicity_refinement") == 5
            && r.size("monotonicity_boundaries") >= 20
            && e1 <= 0.02
            && e2 <= 0.02
            && rnd >= 0.97
            && t4 < 300.0,
        summary: format!(
            "|ratio-1| {e1:.2e} (R=1), {e2:.2e} (R=2) (<= 0.02); min random ratio {rnd:.4} (>= 0.97); {t4:.1}s (< 300s)"
        ),
    });

    let grad = r.measured("area_gradient_finite_differences");
    outcomes.push(Outcome {
        id: 5,
        title: "area gradient vs finite differences",
        pass: r.size("gradient_meshes") >= 100 && grad < 1e-5,
        summary: format!("worst relative error {grad:.2e} (< 1e-5) over {} meshes", r.size("gradient_meshes")),
    });

    let arith = r.measured("degree_threshold_arithmetic");
    let t6 = r.seconds(&["degree_threshold_arithmetic"]);
    outcomes.push(Outcome {
        id: 6,
        title: "degree threshold arithmetic",
        pass: r.size("threshold_grid") >= 20 && arith == 0.0 && t6 < 1.0,
        summary: format!("{arith} violations (n=13, 13 a(R) > 4π, tightness, 20x20 grid), {t6:.3}s (< 1s)"),
    });

    let res = r.measured("disk_area_resolution");
    let euc = r.measured("disk_area_exceeds_euclidean");
    outcomes.push(Outcome {
        id: 7,
        title: "disk area oracle",
        pass: res <= 5e-7 && euc > 1.0,
        summary: format!("a(1) resolution difference {res:.2e} (<= 5e-7), min a(r)/πr² {euc:.4} (> 1)"),
    });

    let same = strip_runtimes(single.clone()) == strip_runtimes(multi.clone());
    outcomes.push(Outcome {
        id: 8,
        title: "determinism",
        pass: same,
        summary: format!(
            "seed 42 reports with 1 and 4 threads {} apart from runtimes",
            if same { "identical" } else { "DIFFER" }
        ),
    });

    let mut all = true;
    for o in &outcomes {
        all &= o.pass;
        println!(
            "criterion {} {} {}: {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title,
            o.summary
        );
    }
    println!("acceptance {}", if all { "PASS" } else { "FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
