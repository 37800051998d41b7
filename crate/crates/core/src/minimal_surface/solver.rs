//! Fixed-boundary area minimization by gradient descent.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::hyperbolic::{disk_area, PoincarePoint};

use super::area::{area_of, gradient_of, min_triangle_area};
use super::mesh::{mesh_boundary_disk, TriMesh, MIN_TRIANGLE_AREA};

/// Trial points must keep this Euclidean distance from the ideal boundary.
const BALL_SLACK: f64 = 1e-9;
/// A vertex moves at most this fraction of its shortest incident edge per step.
const MAX_EDGE_FRACTION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Absolute gradient-norm tolerance; `None` uses `1e-6` times the initial area.
    pub grad_tol: Option<f64>,
    /// Sufficient-decrease constant of the Armijo condition.
    pub armijo: f64,
    /// Step shrink factor during backtracking.
    pub shrink: f64,
    pub max_halvings: u32,
    /// Relative area change at which the descent is considered stalled.
    pub stall_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            grad_tol: None,
            armijo: 1e-4,
            shrink: 0.5,
            max_halvings: 60,
            stall_tol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    AreaStagnation,
    MaxIterations,
    LineSearchFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub final_area: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub converged: bool,
    pub stop: StopReason,
    /// Area after every accepted step, starting with the initial area.
    pub area_history: Vec<f64>,
    pub edge_flips: usize,
}

fn masked_gradient(positions: &[Vector3<f64>], mesh: &TriMesh, free: &[bool]) -> Vec<Vector3<f64>> {
    let mut g = gradient_of(positions, &mesh.triangles);
    for (gi, &f) in g.iter_mut().zip(free) {
        if !f {
            *gi = Vector3::zeros();
        }
    }
    g
}

fn norm(g: &[Vector3<f64>]) -> f64 {
    g.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

/// Largest step for which no vertex travels more than a fraction of its
/// shortest incident edge.
fn step_cap(positions: &[Vector3<f64>], triangles: &[[usize; 3]], g: &[Vector3<f64>]) -> f64 {
    let mut shortest = vec![f64::INFINITY; positions.len()];
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let len = (positions[a] - positions[b]).norm();
            shortest[a] = shortest[a].min(len);
            shortest[b] = shortest[b].min(len);
        }
    }
    shortest
        .iter()
        .zip(g)
        .filter(|(_, gi)| gi.norm() > 0.0)
        .map(|(len, gi)| MAX_EDGE_FRACTION * len / gi.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Gradient descent with Barzilai–Borwein trial steps and Armijo
/// backtracking. Boundary and pinned vertices never move.
pub fn minimize_area(mesh: &TriMesh, options: &SolveOptions) -> Result<(TriMesh, SolveReport)> {
    if let Some(tol) = options.grad_tol {
        if !(tol > 0.0) {
            return Err(GeometryError::InvalidParameter(format!("gradient tolerance must be positive, got {tol}")));
        }
    }
    let mut mesh = mesh.clone();
    let free: Vec<bool> = (0..mesh.vertices.len()).map(|i| mesh.is_free(i)).collect();
    let mut x = mesh.positions();
    let mut area = area_of(&x, &mesh.triangles);
    let mut g = masked_gradient(&x, &mesh, &free);
    let grad_tol = options.grad_tol.unwrap_or(1e-6 * area);
    let mut history = vec![area];
    let mut bb_step: Option<f64> = None;
    let mut iterations = 0;
    let mut flips = 0;
    let limit = 1.0 - BALL_SLACK;

    let stop = loop {
        if norm(&g) <= grad_tol {
            break StopReason::GradientTolerance;
        }
        if iterations >= options.max_iters {
            break StopReason::MaxIterations;
        }
        let gnorm2 = norm(&g).powi(2);
        let cap = step_cap(&x, &mesh.triangles, &g);
        let mut alpha = bb_step.unwrap_or(cap).min(cap);
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial: Vec<Vector3<f64>> = x.iter().zip(&g).map(|(xi, gi)| xi - gi * alpha).collect();
            if trial.iter().all(|p| p.norm() < limit) {
                let trial_area = area_of(&trial, &mesh.triangles);
                if trial_area <= area - options.armijo * alpha * gnorm2 {
                    accepted = Some((trial, trial_area));
                    break;
                }
            }
            alpha *= options.shrink;
        }
        let Some((next, next_area)) = accepted else {
            break StopReason::LineSearchFailure;
        };
        iterations += 1;
        let relative_change = (area - next_area) / area;
        let next_g = masked_gradient(&next, &mesh, &free);
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..x.len() {
            let s = next[i] - x[i];
            ss += s.norm_squared();
            sy += s.dot(&(next_g[i] - g[i]));
        }
        bb_step = (sy > 0.0).then(|| ss / sy);
        x = next;
        area = next_area;
        g = next_g;

        mesh.set_positions(&x);
        if min_triangle_area(&mesh) < MIN_TRIANGLE_AREA {
            let mut flipped = mesh.clone();
            let count = flipped.flip_pass();
            let flipped_area = area_of(&x, &flipped.triangles);
            if count > 0 && flipped_area <= area {
                flips += count;
                mesh = flipped;
                area = flipped_area;
                g = masked_gradient(&x, &mesh, &free);
                bb_step = None;
            }
        }
        history.push(area);
        if relative_change <= options.stall_tol {
            break StopReason::AreaStagnation;
        }
    };

    mesh.set_positions(&x);
    let report = SolveReport {
        final_area: area,
        iterations,
        final_gradient_norm: norm(&g),
        converged: matches!(stop, StopReason::GradientTolerance | StopReason::AreaStagnation),
        stop,
        area_history: history,
        edge_flips: flips,
    };
    Ok((mesh, report))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityOptions {
    pub refinement: u32,
    pub solve: SolveOptions,
}

impl Default for MonotonicityOptions {
    fn default() -> Self {
        Self {
            refinement: 5,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityOutcome {
    /// Final area divided by `a(R)`.
    pub ratio: f64,
    pub disk_area: f64,
    pub mesh: TriMesh,
    pub report: SolveReport,
}

/// Minimizes the area of a disk spanning `boundary` and pinned at the
/// center, and compares it with the geodesic disk area `a(R)`.
pub fn monotonicity_check(
    boundary: &[PoincarePoint],
    ball_radius: f64,
    options: &MonotonicityOptions,
) -> Result<MonotonicityOutcome> {
    let mesh = mesh_boundary_disk(boundary, ball_radius, options.refinement, true)?;
    let (mesh, report) = minimize_area(&mesh, &options.solve)?;
    if !report.converged {
        return Err(GeometryError::NotConverged {
            iterations: report.iterations,
            gradient_norm: report.final_gradient_norm,
        });
    }
    let a = disk_area(ball_radius)?;
    Ok(MonotonicityOutcome {
        ratio: report.final_area / a,
        disk_area: a,
        mesh,
        report,
    })
}
