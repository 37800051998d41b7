//! Random closed spherical curves of prescribed length.
//!
//! Curves are random walks with step angles in `(0, π/8]` and a heading that
//! turns by a bounded random angle each step, closed by a final minor arc.
//! The last step is shortened by bisection so that the closed length hits the
//! target exactly.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::hyperbolic::orthonormal_frame;
use crate::rng::{self, DOMAIN_CURVES};
use crate::spherical::{angle_between, SphericalCurve};

pub const MAX_STEP: f64 = PI / 8.0;
const MAX_ATTEMPTS: usize = 1000;
/// Closing arcs must stay this far below `π`.
const CLOSING_SLACK: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkParams {
    /// Largest heading change per step, in radians.
    pub max_turn: f64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self { max_turn: PI / 3.0 }
    }
}

fn step_along(x: &Vector3<f64>, heading: &Vector3<f64>, s: f64) -> (Vector3<f64>, Vector3<f64>) {
    let next = (x * s.cos() + heading * s.sin()).normalize();
    let transported = (heading * s.cos() - x * s.sin()).normalize();
    (next, transported)
}

/// Closed curve on `S²(radius)` whose length is `target_length` (ambient units).
pub fn random_closed_curve<R: Rng + ?Sized>(
    rng: &mut R,
    radius: f64,
    target_length: f64,
    params: &WalkParams,
) -> Result<SphericalCurve> {
    if !(radius > 0.0) {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if !(target_length > 0.0) || !target_length.is_finite() {
        return Err(GeometryError::InvalidParameter(format!(
            "target length must be positive, got {target_length}"
        )));
    }
    let target = target_length / radius;
    for _ in 0..MAX_ATTEMPTS {
        if let Some(vertices) = try_walk(rng, target, params) {
            return SphericalCurve::new(radius, vertices, true);
        }
    }
    Err(GeometryError::InvalidParameter(
        "random walk failed to close with a minor arc".into(),
    ))
}

fn try_walk<R: Rng + ?Sized>(rng: &mut R, target: f64, params: &WalkParams) -> Option<Vec<Vector3<f64>>> {
    let start = rng::unit_vector(rng);
    let (e1, e2) = orthonormal_frame(&start);
    let phi = rng.random::<f64>() * 2.0 * PI;
    let mut heading = e1 * phi.cos() + e2 * phi.sin();
    let mut x = start;
    let mut walked = 0.0;
    let mut vertices = vec![start];

    loop {
        let s = (1.0 - rng.random::<f64>()) * MAX_STEP;
        let closed_length = |t: f64| {
            let (y, _) = step_along(&x, &heading, t);
            walked + t + angle_between(&y, &start)
        };
        if closed_length(s) >= target {
            let (mut lo, mut hi) = (0.0, s);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if closed_length(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (y, _) = step_along(&x, &heading, hi);
            if angle_between(&y, &start) > PI - CLOSING_SLACK {
                return None;
            }
            vertices.push(y);
            return Some(vertices);
        }
        let (y, h) = step_along(&x, &heading, s);
        walked += s;
        x = y;
        let turn = (2.0 * rng.random::<f64>() - 1.0) * params.max_turn;
        let side = x.cross(&h);
        heading = (h * turn.cos() + side * turn.sin()).normalize();
        vertices.push(x);
    }
}

/// Curve number `index` of a reproducible family keyed by `seed`, with a
/// length drawn uniformly from `[min_fraction, max_fraction] · 2πr`.
pub fn seeded_curve(
    seed: u64,
    index: u64,
    radius: f64,
    min_fraction: f64,
    max_fraction: f64,
) -> Result<SphericalCurve> {
    let mut rng = rng::stream(seed, DOMAIN_CURVES, index);
    let fraction = min_fraction + (max_fraction - min_fraction) * rng.random::<f64>();
    random_closed_curve(&mut rng, radius, fraction * 2.0 * PI * radius, &WalkParams::default())
}
