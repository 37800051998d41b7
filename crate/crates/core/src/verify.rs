//! The verification suite behind `geodesic-lab verify`.
//!
//! Each check measures one quantity, compares it with a fixed threshold and
//! records the outcome. The two levels share thresholds and differ only in
//! sample counts and suite sizes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::Vector3;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cover_bounds::{area_floor, genus_exceeds, threshold_for_area};
use crate::curve_gen::seeded_curve;
use crate::error::{GeometryError, Result};
use crate::hyperbolic::{disk_area, disk_area_with, euclidean_radius, radius_for_area, PoincarePoint, Precision};
use crate::minimal_surface::area::triangle_area;
use crate::minimal_surface::{
    area_gradient, equator_loop, mesh_boundary_disk, monotonicity_check, random_loop, MonotonicityOptions, TriMesh,
};
use crate::rng::{self, DOMAIN_BOUNDARIES, DOMAIN_MESH};
use crate::spherical::{arc_length, crofton_length, crossing_count, witness_search, SphericalCurve};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(GeometryError::InvalidParameter(format!(
                "level must be quick or full, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

/// Sample counts and suite sizes for one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteSizes {
    pub crofton_samples: usize,
    pub crofton_curves: usize,
    pub short_curves: usize,
    pub meets_all_curves: usize,
    pub monotonicity_refinement: u32,
    pub monotonicity_boundaries: usize,
    pub gradient_meshes: usize,
    pub threshold_grid: usize,
}

impl Level {
    /// Quick divides every suite by 5 and uses one refinement level less.
    pub fn sizes(self) -> SuiteSizes {
        match self {
            Level::Full => SuiteSizes {
                crofton_samples: 100_000,
                crofton_curves: 50,
                short_curves: 500,
                meets_all_curves: 50,
                monotonicity_refinement: 5,
                monotonicity_boundaries: 20,
                gradient_meshes: 100,
                threshold_grid: 20,
            },
            Level::Quick => SuiteSizes {
                crofton_samples: 20_000,
                crofton_curves: 10,
                short_curves: 100,
                meets_all_curves: 10,
                monotonicity_refinement: 4,
                monotonicity_boundaries: 4,
                gradient_meshes: 20,
                threshold_grid: 20,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    pub fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => measured <= threshold,
            Comparison::Below => measured < threshold,
            Comparison::AtLeast => measured >= threshold,
            Comparison::Above => measured > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The claim this check exercises.
    pub anchor: String,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool_version: String,
    pub seed: u64,
    pub level: Level,
    pub sizes: SuiteSizes,
    pub checks: Vec<Check>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// What a check function produces before it is timed and judged.
struct Measurement {
    measured: f64,
    /// Extra condition besides the threshold comparison, e.g. a suite being large enough.
    ok: bool,
    detail: String,
}

impl Measurement {
    fn new(measured: f64, detail: String) -> Self {
        Self {
            measured,
            ok: true,
            detail,
        }
    }
}

struct Spec {
    name: &'static str,
    anchor: &'static str,
    comparison: Comparison,
    threshold: f64,
    run: fn(&Context) -> Result<Measurement>,
}

struct Context {
    seed: u64,
    sizes: SuiteSizes,
}

const SPECS: &[Spec] = &[
    Spec {
        name: "crofton_great_circle",
        anchor: "Crofton: crossing counts with random great circles recover length (unit great circle, relative error)",
        comparison: Comparison::AtMost,
        threshold: 0.005,
        run: crofton_great_circle,
    },
    Spec {
        name: "crofton_random_polylines",
        anchor: "Crofton: estimate within max(3 stderr, 1%) of exact polyline length (worst normalized deviation)",
        comparison: Comparison::AtMost,
        threshold: 1.0,
        run: crofton_random_polylines,
    },
    Spec {
        name: "short_curves_miss_a_great_circle",
        anchor: "Closed curves shorter than 2πr are disjoint from some great circle (violations)",
        comparison: Comparison::AtMost,
        threshold: 0.0,
        run: short_curves_miss_a_great_circle,
    },
    Spec {
        name: "meets_all_curves_are_long",
        anchor: "Closed curves meeting every great circle have length at least 2πr (violations)",
        comparison: Comparison::AtMost,
        threshold: 0.0,
        run: meets_all_curves_are_long,
    },
    Spec {
        name: "monotonicity_equator_r1",
        anchor: "Minimal disk through the center of B(1) has area at least a(1); equatorial disk attains it (|ratio - 1|)",
        comparison: Comparison::AtMost,
        threshold: 0.02,
        run: monotonicity_equator_r1,
    },
    Spec {
        name: "monotonicity_equator_r2",
        anchor: "Minimal disk through the center of B(2) has area at least a(2); equatorial disk attains it (|ratio - 1|)",
        comparison: Comparison::AtMost,
        threshold: 0.02,
        run: monotonicity_equator_r2,
    },
    Spec {
        name: "monotonicity_random_boundaries",
        anchor: "Minimal disks through the center of B(1) have area at least a(1) (smallest area / a(1))",
        comparison: Comparison::AtLeast,
        threshold: 0.97,
        run: monotonicity_random_boundaries,
    },
    Spec {
        name: "area_gradient_finite_differences",
        anchor: "Analytic area gradient against central differences with step 1e-6 (worst relative error)",
        comparison: Comparison::Below,
        threshold: 1e-5,
        run: area_gradient_finite_differences,
    },
    Spec {
        name: "degree_threshold_arithmetic",
        anchor: "Degree threshold n(h) = floor(2π(2h-2)/a(R)) + 1 forces genus above h (violations)",
        comparison: Comparison::AtMost,
        threshold: 0.0,
        run: degree_threshold_arithmetic,
    },
    Spec {
        name: "disk_area_resolution",
        anchor: "Disk area a(1) agrees across two quadrature resolutions (relative difference)",
        comparison: Comparison::AtMost,
        threshold: 5e-7,
        run: disk_area_resolution,
    },
    Spec {
        name: "disk_area_exceeds_euclidean",
        anchor: "Hyperbolic disks are larger than Euclidean ones: a(r) > πr² for r in {0.5, 1, 2} (smallest a(r)/πr²)",
        comparison: Comparison::Above,
        threshold: 1.0,
        run: disk_area_exceeds_euclidean,
    },
];

/// Names of every check, in report order.
pub fn check_names() -> Vec<&'static str> {
    SPECS.iter().map(|s| s.name).collect()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

fn run_spec(spec: &Spec, ctx: &Context) -> Check {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| (spec.run)(ctx)));
    let runtime_seconds = start.elapsed().as_secs_f64();
    let (measured, pass, detail) = match outcome {
        Ok(Ok(m)) => (m.measured, m.ok && spec.comparison.holds(m.measured, spec.threshold), m.detail),
        Ok(Err(e)) => (f64::NAN, false, format!("error: {e}")),
        Err(payload) => (f64::NAN, false, format!("panic: {}", panic_message(payload))),
    };
    Check {
        name: spec.name.to_string(),
        anchor: spec.anchor.to_string(),
        measured,
        comparison: spec.comparison,
        threshold: spec.threshold,
        pass,
        detail,
        runtime_seconds,
    }
}

/// Runs the named checks (all of them when `only` is empty).
pub fn run_checks(seed: u64, level: Level, only: &[&str]) -> Result<VerificationReport> {
    for name in only {
        if !SPECS.iter().any(|s| s.name == *name) {
            return Err(GeometryError::InvalidParameter(format!("unknown check `{name}`")));
        }
    }
    let ctx = Context {
        seed,
        sizes: level.sizes(),
    };
    let checks: Vec<Check> = SPECS
        .iter()
        .filter(|s| only.is_empty() || only.contains(&s.name))
        .map(|s| run_spec(s, &ctx))
        .collect();
    let overall_pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        level,
        sizes: ctx.sizes,
        checks,
        overall_pass,
    })
}

pub fn run_verification(seed: u64, level: Level) -> VerificationReport {
    run_checks(seed, level, &[]).expect("all check names are known")
}

fn crofton_great_circle(ctx: &Context) -> Result<Measurement> {
    let circle = SphericalCurve::equator(1.0, 256)?;
    let est = crofton_length(&circle, ctx.sizes.crofton_samples, ctx.seed)?;
    let err = (est.length - 2.0 * PI).abs() / (2.0 * PI);
    Ok(Measurement::new(
        err,
        format!("estimate {:.6} vs 2π, stderr {:.2e}", est.length, est.std_error),
    ))
}

/// Radius of curve `i` in the random suites.
fn suite_radius(i: u64) -> f64 {
    [1.0, 0.5, 2.0][(i % 3) as usize]
}

fn crofton_random_polylines(ctx: &Context) -> Result<Measurement> {
    let n = ctx.sizes.crofton_curves as u64;
    let mut worst: f64 = 0.0;
    let mut worst_index = 0;
    for i in 0..n {
        let curve = seeded_curve(ctx.seed, i, suite_radius(i), 0.1, 2.5)?;
        let exact = arc_length(&curve);
        let est = crofton_length(&curve, ctx.sizes.crofton_samples, ctx.seed.wrapping_add(i + 1))?;
        let allowed = (3.0 * est.std_error).max(0.01 * exact);
        let deviation = (est.length - exact).abs() / allowed;
        if deviation > worst {
            worst = deviation;
            worst_index = i;
        }
    }
    Ok(Measurement::new(
        worst,
        format!("{n} curves, worst is curve {worst_index}"),
    ))
}

fn short_curves_miss_a_great_circle(ctx: &Context) -> Result<Measurement> {
    let n = ctx.sizes.short_curves as u64;
    let mut violations = 0;
    for i in 0..n {
        let r = suite_radius(i);
        let curve = seeded_curve(ctx.seed ^ 0x5348_4f52, i, r, 0.02, 0.999)?;
        if arc_length(&curve) >= 0.999 * 2.0 * PI * r {
            return Err(GeometryError::InvalidParameter(format!("curve {i} is not short")));
        }
        match witness_search(&curve)?.witness {
            Some(circle) if crossing_count(&curve, &circle) == 0 => {}
            _ => violations += 1,
        }
    }
    Ok(Measurement::new(violations as f64, format!("{n} curves below 0.999·2πr")))
}

fn meets_all_curves_are_long(ctx: &Context) -> Result<Measurement> {
    let wanted = ctx.sizes.meets_all_curves;
    let max_attempts = 20 * wanted as u64;
    let mut found = 0;
    let mut violations = 0;
    let mut lowest = f64::INFINITY;
    let mut attempts = 0;
    while found < wanted && attempts < max_attempts {
        let i = attempts;
        attempts += 1;
        let r = suite_radius(i);
        let curve = seeded_curve(ctx.seed ^ 0x4c4f_4e47, i, r, 0.9, 3.0)?;
        if witness_search(&curve)?.witness.is_some() {
            continue;
        }
        found += 1;
        let est = crofton_length(&curve, ctx.sizes.crofton_samples, ctx.seed.wrapping_add(1_000_000 + i))?;
        let floor = 2.0 * PI * r * (1.0 - 3.0 * est.relative_std_error());
        lowest = lowest.min(est.length / (2.0 * PI * r));
        if est.length < floor {
            violations += 1;
        }
    }
    let mut m = Measurement::new(
        violations as f64,
        format!("{found} meeting-all curves from {attempts} draws, smallest estimate / 2πr = {lowest:.4}"),
    );
    m.ok = found >= wanted;
    Ok(m)
}

fn equator_ratio(ctx: &Context, ball_radius: f64) -> Result<Measurement> {
    let options = MonotonicityOptions {
        refinement: ctx.sizes.monotonicity_refinement,
        ..MonotonicityOptions::default()
    };
    let out = monotonicity_check(&equator_loop(ball_radius, 16)?, ball_radius, &options)?;
    Ok(Measurement::new(
        (out.ratio - 1.0).abs(),
        format!("area / a(R) = {:.6} after {} iterations", out.ratio, out.report.iterations),
    ))
}

fn monotonicity_equator_r1(ctx: &Context) -> Result<Measurement> {
    equator_ratio(ctx, 1.0)
}

fn monotonicity_equator_r2(ctx: &Context) -> Result<Measurement> {
    equator_ratio(ctx, 2.0)
}

fn monotonicity_random_boundaries(ctx: &Context) -> Result<Measurement> {
    let options = MonotonicityOptions {
        refinement: ctx.sizes.monotonicity_refinement,
        ..MonotonicityOptions::default()
    };
    let n = ctx.sizes.monotonicity_boundaries as u64;
    let ratios: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(ctx.seed, DOMAIN_BOUNDARIES, i);
            let boundary = random_loop(&mut rng, 1.0, 16)?;
            Ok(monotonicity_check(&boundary, 1.0, &options)?.ratio)
        })
        .collect::<Result<_>>()?;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Measurement::new(min, format!("{n} boundaries, ratios in [{min:.4}, {max:.4}]")))
}

/// A random disk mesh with 20 to 200 free vertices, jittered off any
/// symmetric configuration.
pub fn random_test_mesh(seed: u64, index: u64) -> Result<TriMesh> {
    let mut rng = rng::stream(seed, DOMAIN_MESH, index);
    let ball_radius = 0.5 + 1.5 * rng.random::<f64>();
    let (n, refinement) = if rng.random::<bool>() {
        (rng.random_range(8..=16), 3)
    } else {
        (rng.random_range(20..=32), 2)
    };
    let boundary = random_loop(&mut rng, ball_radius, n)?;
    let through_center = rng.random::<bool>();
    let mut mesh = mesh_boundary_disk(&boundary, ball_radius, refinement, through_center)?;
    let scale = 0.3 * euclidean_radius(ball_radius) / (1u32 << refinement) as f64;
    for i in mesh.free_vertices() {
        let jitter = Vector3::new(
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
        ) * scale;
        let p = mesh.vertices()[i].coords() + jitter;
        mesh.move_vertex(i, PoincarePoint::from_vector(p))?;
    }
    Ok(mesh)
}

/// Central-difference gradient of the mesh area. Only the triangles around
/// the moved vertex are re-evaluated, which keeps cancellation error small.
pub fn finite_difference_gradient(mesh: &TriMesh, step: f64) -> Vec<(usize, Vector3<f64>)> {
    let mut around: HashMap<usize, Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &v in tri {
            around.entry(v).or_default().push(t);
        }
    }
    let mut positions: Vec<Vector3<f64>> = mesh.vertices().iter().map(|p| p.coords()).collect();
    let local = |pos: &[Vector3<f64>], ts: &[usize]| -> f64 {
        ts.iter()
            .map(|&t| {
                let [a, b, c] = mesh.triangles()[t];
                triangle_area(&pos[a], &pos[b], &pos[c])
            })
            .sum()
    };
    mesh.free_vertices()
        .into_iter()
        .map(|i| {
            let ts = &around[&i];
            let mut g = Vector3::zeros();
            for k in 0..3 {
                let orig = positions[i][k];
                positions[i][k] = orig + step;
                let plus = local(&positions, ts);
                positions[i][k] = orig - step;
                let minus = local(&positions, ts);
                positions[i][k] = orig;
                g[k] = (plus - minus) / (2.0 * step);
            }
            (i, g)
        })
        .collect()
}

/// `|g_analytic - g_fd| / |g_fd|` over the free vertices.
pub fn gradient_relative_error(mesh: &TriMesh, step: f64) -> f64 {
    let analytic = area_gradient(mesh);
    let numeric = finite_difference_gradient(mesh, step);
    let (mut diff, mut base) = (0.0, 0.0);
    for ((i, a), (j, n)) in analytic.iter().zip(&numeric) {
        debug_assert_eq!(i, j);
        diff += (a - n).norm_squared();
        base += n.norm_squared();
    }
    (diff / base).sqrt()
}

fn area_gradient_finite_differences(ctx: &Context) -> Result<Measurement> {
    let n = ctx.sizes.gradient_meshes as u64;
    let errors: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| Ok(gradient_relative_error(&random_test_mesh(ctx.seed, i)?, 1e-6)))
        .collect::<Result<_>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(Measurement::new(worst, format!("{n} random meshes")))
}

fn degree_threshold_arithmetic(ctx: &Context) -> Result<Measurement> {
    let mut violations = 0;
    let mut notes = Vec::new();

    let unit = threshold_for_area(2, 1.0)?;
    if unit.degree != 13 {
        violations += 1;
        notes.push(format!("n(2) = {} for a(R) = 1", unit.degree));
    }
    let r1 = radius_for_area(1.0)?;
    if !(area_floor(13, r1)? > 4.0 * PI) {
        violations += 1;
        notes.push("13 a(R) does not exceed 4π".into());
    }
    if genus_exceeds(12.0 * disk_area(r1)?, 2) {
        violations += 1;
        notes.push("degree 12 already exceeds genus 2".into());
    }

    let grid = ctx.sizes.threshold_grid;
    let mut sensitive = 0;
    for hi in 0..grid {
        let h = hi as i64 + 1;
        for ri in 0..grid {
            let r = 0.1 + 2.9 * ri as f64 / (grid - 1).max(1) as f64;
            let a = disk_area(r)?;
            let t = threshold_for_area(h, a)?;
            if t.boundary_sensitive {
                sensitive += 1;
            }
            let sound = genus_exceeds(t.degree as f64 * a, h);
            let tight = t.degree == 1 || !genus_exceeds((t.degree - 1) as f64 * a, h);
            if !sound || !tight {
                violations += 1;
                notes.push(format!("h={h} R={r:.3} n={}", t.degree));
            }
        }
    }
    let mut detail = format!("{grid}x{grid} grid, {sensitive} boundary-sensitive cells");
    if !notes.is_empty() {
        detail.push_str("; ");
        detail.push_str(&notes.join(", "));
    }
    Ok(Measurement::new(violations as f64, detail))
}

fn disk_area_resolution(_: &Context) -> Result<Measurement> {
    let coarse = disk_area_with(1.0, &Precision::default())?;
    let fine = disk_area_with(
        1.0,
        &Precision {
            abs_tol: 1e-13,
            circle_samples: 257,
        },
    )?;
    Ok(Measurement::new(
        (coarse - fine).abs() / fine,
        format!("a(1) = {coarse:.9} and {fine:.9}"),
    ))
}

fn disk_area_exceeds_euclidean(_: &Context) -> Result<Measurement> {
    let mut lowest = f64::INFINITY;
    let mut parts = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let a = disk_area(r)?;
        lowest = lowest.min(a / (PI * r * r));
        parts.push(format!("a({r}) = {a:.6}"));
    }
    Ok(Measurement::new(lowest, parts.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_parsing() {
        assert_eq!("quick".parse::<Level>().unwrap(), Level::Quick);
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("medium".parse::<Level>().is_err());
        assert_eq!(Level::Full.to_string(), "full");
    }

    #[test]
    fn anchors_are_present_and_names_unique() {
        let names = check_names();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(SPECS.iter().all(|s| !s.anchor.is_empty()));
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(run_checks(1, Level::Quick, &["nope"]).is_err());
    }

    #[test]
    fn panics_become_failures() {
        let spec = Spec {
            name: "boom",
            anchor: "a check that panics",
            comparison: Comparison::AtMost,
            threshold: 0.0,
            run: |_| panic!("deliberate"),
        };
        let ctx = Context {
            seed: 0,
            sizes: Level::Quick.sizes(),
        };
        let prev = panic::take_hook();
        panic::set_hook(Box::new(|_| {}));
        let check = run_spec(&spec, &ctx);
        panic::set_hook(prev);
        assert!(!check.pass);
        assert!(check.detail.contains("deliberate"));
    }

    #[test]
    fn cheap_checks_pass() {
        let report = run_checks(
            7,
            Level::Quick,
            &["degree_threshold_arithmetic", "disk_area_resolution", "disk_area_exceeds_euclidean"],
        )
        .unwrap();
        assert_eq!(report.checks.len(), 3);
        assert!(report.overall_pass, "{report:#?}");
    }
}
