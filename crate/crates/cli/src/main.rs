use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use geodesic_lab_core::cover_bounds::{bound_for_area, compute_r, exclusion_table_for_area};
use geodesic_lab_core::hyperbolic::{disk_area, radius_for_area};
use geodesic_lab_core::io::{load_boundary, read_curve_csv, read_profile_json, write_mesh_obj};
use geodesic_lab_core::minimal_surface::{mesh_boundary_disk, minimize_area, BoundarySpec, SolveOptions};
use geodesic_lab_core::spherical::{arc_length, crofton_length, witness_search};
use geodesic_lab_core::verify::{run_verification, Level};

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_CHECKS_FAILED: u8 = 1;
const THREADS_VAR: &str = "GEODESIC_LAB_THREADS";

#[derive(Parser)]
#[command(name = "geodesic-lab", version, about = "Hyperbolic minimal disks, spherical curves and degree thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the length of a spherical curve from great-circle crossings.
    Crofton {
        /// Curve CSV file
        curve: PathBuf,
        /// Number of random great circles
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Look for a great circle disjoint from a closed spherical curve.
    #[command(name = "greatcircle-test")]
    GreatcircleTest {
        /// Closed curve CSV file
        curve: PathBuf,
    },
    /// Minimize the area of a disk spanning a loop on the sphere of radius R.
    Minsurf(MinsurfArgs),
    /// Degree threshold that forces genus above h.
    Bound(BoundArgs),
    /// Run the verification suite and write a JSON report.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// `quick` or `full`
        #[arg(long, default_value = "full")]
        level: Level,
        /// Report path (stdout summary only when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MinsurfArgs {
    /// Hyperbolic radius of the bounding sphere
    #[arg(long)]
    radius: f64,
    /// `equator`, `tilt:<deg>`, `wavy:<modes>:<amp>` or `file:<curve.csv>`.
    #[arg(long, default_value = "equator")]
    boundary: BoundarySpec,
    /// Number of 1-to-4 subdivisions of the initial cone
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=8))]
    refine: u32,
    /// Pin a vertex at the center of the ball.
    #[arg(long)]
    through_center: bool,
    /// Write the relaxed mesh as OBJ
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SolveOptions::default().max_iters)]
    max_iters: usize,
    /// Absolute gradient-norm tolerance (default: 1e-6 times the initial area).
    #[arg(long)]
    grad_tol: Option<f64>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("scale").required(true).args(["r", "profile", "area"])))]
struct BoundArgs {
    /// Genus budget.
    #[arg(long)]
    h: Option<i64>,
    /// Ball radius.
    #[arg(long = "R")]
    r: Option<f64>,
    /// Profile JSON with injectivity radii and push-off distances.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Disk area a(R) given directly.
    #[arg(long)]
    area: Option<f64>,
    /// Print thresholds for every genus budget up to this value.
    #[arg(long)]
    table: Option<i64>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn crofton(curve: PathBuf, samples: usize, seed: u64) -> Result<u8> {
    let curve = read_curve_csv(&curve)?;
    let est = crofton_length(&curve, samples, seed)?;
    let exact = arc_length(&curve);
    let ratio = est.length / exact;
    println!("estimate     {:.9}", est.length);
    println!("std_error    {:.3e}", est.std_error);
    println!("exact_length {exact:.9}");
    println!("ratio        {ratio:.6}");
    println!(
        "{}",
        json!({ "crofton": { "estimate": est.length, "std_error": est.std_error,
            "exact_length": exact, "ratio": ratio, "samples": est.samples, "seed": est.seed } })
    );
    Ok(0)
}

fn greatcircle_test(curve: PathBuf) -> Result<u8> {
    let curve = read_curve_csv(&curve)?;
    match witness_search(&curve)?.witness {
        Some(circle) => {
            let p = circle.pole();
            println!("MISSES pole=({:.9},{:.9},{:.9})", p.x, p.y, p.z);
        }
        None => println!("MEETS-ALL"),
    }
    Ok(0)
}

fn minsurf(args: MinsurfArgs) -> Result<u8> {
    if !(args.radius > 0.0) || !args.radius.is_finite() {
        bail!("radius must be positive, got {}", args.radius);
    }
    if let Some(tol) = args.grad_tol {
        if !(tol > 0.0) {
            bail!("gradient tolerance must be positive, got {tol}");
        }
    }
    let boundary = load_boundary(&args.boundary, args.radius)?;
    let mesh = mesh_boundary_disk(&boundary, args.radius, args.refine, args.through_center)?;
    let options = SolveOptions {
        max_iters: args.max_iters,
        grad_tol: args.grad_tol,
        ..SolveOptions::default()
    };
    let (mesh, report) = minimize_area(&mesh, &options)?;
    let a = disk_area(args.radius)?;
    if let Some(out) = &args.out {
        write_mesh_obj(out, &mesh, report.final_area)?;
    }
    println!("boundary      {}", args.boundary);
    println!("final_area    {:.9}", report.final_area);
    println!("a(R)          {a:.9}");
    println!("ratio         {:.6}", report.final_area / a);
    println!("iterations    {}", report.iterations);
    println!("gradient_norm {:.3e}", report.final_gradient_norm);
    println!("stop          {}", serde_json::to_value(report.stop)?.as_str().unwrap_or_default());
    println!("converged     {}", report.converged);
    Ok(if report.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn bound(args: BoundArgs) -> Result<u8> {
    let (r, a) = match (args.r, &args.profile, args.area) {
        (Some(r), None, None) => {
            if !(r > 0.0) || !r.is_finite() {
                bail!("R must be positive, got {r}");
            }
            (r, disk_area(r)?)
        }
        (None, Some(path), None) => {
            let r = compute_r(&read_profile_json(path)?)?;
            (r, disk_area(r)?)
        }
        (None, None, Some(a)) => {
            if !(a > 0.0) || !a.is_finite() {
                bail!("area must be positive, got {a}");
            }
            (radius_for_area(a)?, a)
        }
        _ => bail!("give exactly one of --R, --profile and --area"),
    };
    match (args.h, args.table) {
        (Some(h), None) => {
            let b = bound_for_area(h, r, a)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&b)?);
            } else {
                println!("R          {r:.9}");
                println!("a(R)       {a:.9}");
                println!("h          {h}");
                println!("n(h)       {}", b.threshold);
                println!("quotient   {:.9}", b.quotient);
                println!("n a(R)     {:.9}", b.area_floor);
                if b.boundary_sensitive {
                    println!("warning: quotient is within 1e-9 of an integer");
                }
            }
        }
        (None, Some(h_max)) => {
            let rows = exclusion_table_for_area(h_max, a)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "R": r, "a_of_r": a, "rows": rows }))?);
            } else {
                println!("R = {r:.9}, a(R) = {a:.9}");
                println!("h,n,quotient,boundary_sensitive");
                for row in rows {
                    println!("{},{},{:.9},{}", row.h, row.n, row.quotient, row.boundary_sensitive);
                }
            }
        }
        _ => bail!("give exactly one of --h and --table"),
    }
    Ok(0)
}

fn verify(seed: u64, level: Level, out: Option<PathBuf>) -> Result<u8> {
    // Open the destination first so an unwritable path fails before the suite runs.
    let file = out
        .as_ref()
        .map(|p| fs::File::create(p).with_context(|| format!("creating {}", p.display())))
        .transpose()?;
    let report = run_verification(seed, level);
    if let (Some(mut file), Some(out)) = (file, &out) {
        writeln!(file, "{}", report.to_json()).with_context(|| format!("writing {}", out.display()))?;
    }
    for c in &report.checks {
        println!(
            "{} {:<36} measured {:<12.6e} threshold {:e} ({:.2}s)",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold,
            c.runtime_seconds
        );
    }
    println!("overall {}", if report.overall_pass { "PASS" } else { "FAIL" });
    Ok(if report.overall_pass { 0 } else { EXIT_CHECKS_FAILED })
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Crofton { curve, samples, seed } => crofton(curve, samples, seed),
        Command::GreatcircleTest { curve } => greatcircle_test(curve),
        Command::Minsurf(args) => minsurf(args),
        Command::Bound(args) => bound(args),
        Command::Verify { seed, level, out } => verify(seed, level, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
