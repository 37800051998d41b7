//! Curves on round spheres, great circles, and integral-geometric length.
//!
//! A [`SphericalCurve`] is a polyline of minor great-circle arcs on `S²(r)`.
//! Along such an arc `<x, n>` is a sinusoid over an interval shorter than
//! `π`, so it changes sign at most once; crossing counts read from vertex
//! signs are therefore exact.

use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::hull::min_norm_point;
use crate::hyperbolic::orthonormal_frame;
use crate::rng::{self, DOMAIN_CROFTON};

/// Inputs must be unit vectors to within this tolerance; they are then renormalized.
pub const UNIT_INPUT_TOL: f64 = 1e-6;
/// Signed distances below this are counted on the positive side.
pub const CROSSING_TIE_TOL: f64 = 1e-12;
/// Witness margin on the unit sphere (scaled by `r` in ambient coordinates).
pub const WITNESS_MARGIN: f64 = 1e-9;
pub const MIN_CROFTON_SAMPLES: usize = 100;
pub const MIN_ROTATION_GRID: usize = 100;
/// Consecutive vertices closer than this to antipodal are rejected.
const ANTIPODAL_TOL: f64 = 1e-9;

/// Angle between two unit vectors, stable for nearly parallel inputs.
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// A closed or open polyline of minor great-circle arcs on `S²(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalCurve {
    radius: f64,
    vertices: Vec<Vector3<f64>>,
    closed: bool,
}

impl SphericalCurve {
    /// `vertices` are unit-sphere coordinates.
    pub fn new(radius: f64, vertices: Vec<Vector3<f64>>, closed: bool) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let mut unit = Vec::with_capacity(vertices.len());
        for (index, v) in vertices.into_iter().enumerate() {
            let norm = v.norm();
            if !norm.is_finite() || (norm - 1.0).abs() > UNIT_INPUT_TOL {
                return Err(GeometryError::NotUnitVector { index, norm });
            }
            unit.push(v / norm);
        }
        let curve = Self {
            radius,
            vertices: unit,
            closed,
        };
        for (i, j) in curve.segment_indices() {
            if angle_between(&curve.vertices[i], &curve.vertices[j]) >= PI - ANTIPODAL_TOL {
                return Err(GeometryError::AntipodalVertices(i, j));
            }
        }
        Ok(curve)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Vertices on the unit sphere.
    pub fn unit_vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    /// Vertices on `S²(r)`.
    pub fn vertices(&self) -> Vec<Vector3<f64>> {
        self.vertices.iter().map(|v| v * self.radius).collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Same curve on a sphere of a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(radius, self.vertices.clone(), self.closed)
    }

    /// Same curve after applying a rotation of the sphere.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        Self {
            radius: self.radius,
            vertices: self.vertices.iter().map(|v| rotation * v).collect(),
            closed: self.closed,
        }
    }

    fn segment_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (i, (i + 1) % n))
    }

    /// Unit-sphere endpoints of each arc, including the closing arc.
    pub fn segments(&self) -> impl Iterator<Item = (&Vector3<f64>, &Vector3<f64>)> + '_ {
        self.segment_indices()
            .map(move |(i, j)| (&self.vertices[i], &self.vertices[j]))
    }

    /// The equator `z = 0` sampled at `n` points.
    pub fn equator(radius: f64, n: usize) -> Result<Self> {
        Self::latitude(radius, 0.0, n)
    }

    /// The closed latitude circle at unit-sphere height `z`.
    pub fn latitude(radius: f64, z: f64, n: usize) -> Result<Self> {
        if !(z.abs() < 1.0) {
            return Err(GeometryError::InvalidParameter(format!("latitude height {z} outside (-1, 1)")));
        }
        let rho = (1.0 - z * z).sqrt();
        let vertices = (0..n)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / n as f64;
                Vector3::new(rho * theta.cos(), rho * theta.sin(), z)
            })
            .collect();
        Self::new(radius, vertices, true)
    }

    /// Open great-circle arc of the given angle from `(1,0,0)` towards `(0,1,0)`.
    pub fn great_arc(radius: f64, angle: f64, n_segments: usize) -> Result<Self> {
        let n = n_segments.max(1);
        let vertices = (0..=n)
            .map(|k| {
                let theta = angle * k as f64 / n as f64;
                Vector3::new(theta.cos(), theta.sin(), 0.0)
            })
            .collect();
        Self::new(radius, vertices, false)
    }
}

/// A great circle of `S²(r)`, `{x : |x| = r, <x, pole> = 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreatCircle {
    pole: Vector3<f64>,
    radius: f64,
}

impl GreatCircle {
    pub fn new(pole: Vector3<f64>, radius: f64) -> Result<Self> {
        let n = pole.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeometryError::InvalidParameter("great circle pole must be non-zero".into()));
        }
        if !(radius > 0.0) {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self {
            pole: pole / n,
            radius,
        })
    }

    pub fn pole(&self) -> Vector3<f64> {
        self.pole
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `pole` and `-pole` describe the same circle.
    pub fn same_circle(&self, other: &GreatCircle) -> bool {
        self.pole.cross(&other.pole).norm() < 1e-12 && (self.radius - other.radius).abs() < 1e-12
    }
}

/// Length `l(γ)` of the polyline.
pub fn arc_length(curve: &SphericalCurve) -> f64 {
    curve.radius * curve.segments().map(|(a, b)| angle_between(a, b)).sum::<f64>()
}

fn side(v: &Vector3<f64>, pole: &Vector3<f64>) -> bool {
    let s = v.dot(pole);
    s >= 0.0 || s.abs() < CROSSING_TIE_TOL
}

/// Number of transversal crossings of the curve through the plane of `circle`.
pub fn crossing_count(curve: &SphericalCurve, circle: &GreatCircle) -> usize {
    crossings_with_pole(curve, &circle.pole)
}

fn crossings_with_pole(curve: &SphericalCurve, pole: &Vector3<f64>) -> usize {
    curve
        .segments()
        .filter(|(a, b)| side(a, pole) != side(b, pole))
        .count()
}

/// Outcome of the disjoint-great-circle search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessSearch {
    /// A great circle disjoint from the curve, when one exists with margin.
    pub witness: Option<GreatCircle>,
    /// Best unit-sphere margin `min_i <v_i, u>` over the candidate pole `u`.
    pub margin: f64,
}

/// Searches for a pole `u` with `<v_i, u> >= δ` for all vertices.
///
/// Minor arcs stay in every open hemisphere containing their endpoints, so a
/// vertex-level witness is a witness for the whole curve. The optimal pole is
/// the direction of the minimum-norm point of the vertices' convex hull.
pub fn witness_search(curve: &SphericalCurve) -> Result<WitnessSearch> {
    if !curve.closed {
        return Err(GeometryError::OpenCurve);
    }
    let hull = min_norm_point(&curve.vertices);
    let norm = hull.point.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Ok(WitnessSearch {
            witness: None,
            margin: 0.0,
        });
    }
    let pole = hull.point / norm;
    let margin = curve
        .vertices
        .iter()
        .map(|v| v.dot(&pole))
        .fold(f64::INFINITY, f64::min);
    let witness = if margin >= WITNESS_MARGIN {
        Some(GreatCircle::new(pole, curve.radius)?)
    } else {
        None
    };
    Ok(WitnessSearch { witness, margin })
}

/// A great circle disjoint from the closed curve, if any.
pub fn misses_some_great_circle(curve: &SphericalCurve) -> Result<Option<GreatCircle>> {
    Ok(witness_search(curve)?.witness)
}

/// Monte Carlo length estimate from great-circle crossing counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CroftonEstimate {
    pub length: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl CroftonEstimate {
    pub fn relative_std_error(&self) -> f64 {
        if self.length > 0.0 {
            self.std_error / self.length
        } else {
            0.0
        }
    }
}

/// `π r` times the mean crossing count over uniformly random poles.
///
/// Sample `i` always uses the same pole for a given seed, and counts are
/// reduced as integers, so the estimate does not depend on thread count.
pub fn crofton_length(curve: &SphericalCurve, samples: usize, seed: u64) -> Result<CroftonEstimate> {
    if samples < MIN_CROFTON_SAMPLES {
        return Err(GeometryError::TooFewSamples {
            got: samples,
            min: MIN_CROFTON_SAMPLES,
        });
    }
    let counts: Vec<u64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let pole = rng::unit_vector(&mut rng::stream(seed, DOMAIN_CROFTON, i));
            crossings_with_pole(curve, &pole) as u64
        })
        .collect();
    let sum: u64 = counts.iter().sum();
    let sum_sq: u64 = counts.iter().map(|c| c * c).sum();
    let n = samples as f64;
    let mean = sum as f64 / n;
    let variance = ((sum_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0);
    let scale = PI * curve.radius;
    Ok(CroftonEstimate {
        length: scale * mean,
        std_error: scale * (variance / n).sqrt(),
        samples,
        seed,
    })
}

/// Minimum of `<x, u>` over the minor arc from `a` to `b`.
fn arc_min_height(a: &Vector3<f64>, b: &Vector3<f64>, u: &Vector3<f64>) -> f64 {
    let ha = a.dot(u);
    let hb = b.dot(u);
    let phi = angle_between(a, b);
    let endpoint_min = ha.min(hb);
    if phi < 1e-12 {
        return endpoint_min;
    }
    let tangent = (b - a * phi.cos()).normalize();
    let along = tangent.dot(u);
    // <x(θ), u> = ha cos θ + along sin θ attains -amp at θ*.
    let amp = ha.hypot(along);
    let theta_star = (along.atan2(ha) + PI).rem_euclid(2.0 * PI);
    if theta_star <= phi {
        endpoint_min.min(-amp)
    } else {
        endpoint_min
    }
}

/// Lowest unit-sphere height of the curve after rotating `u` to the north pole.
fn min_height(curve: &SphericalCurve, u: &Vector3<f64>) -> f64 {
    curve
        .segments()
        .map(|(a, b)| arc_min_height(a, b, u))
        .fold(f64::INFINITY, f64::min)
}

/// Best rotation found for lifting a closed curve as high as possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightRotation {
    /// Highest achievable minimum z-coordinate on `S²(r)`.
    pub z_min: f64,
    /// The direction that is rotated to `(0, 0, 1)`.
    pub pole: Vector3<f64>,
    pub rotation: Rotation3<f64>,
}

/// Maximizes the minimum z-coordinate of the rotated curve over a grid of
/// `grid` candidate north poles, followed by a local pattern search.
pub fn min_height_after_rotation(curve: &SphericalCurve, grid: usize) -> Result<HeightRotation> {
    if !curve.closed {
        return Err(GeometryError::OpenCurve);
    }
    if grid < MIN_ROTATION_GRID {
        return Err(GeometryError::TooFewSamples {
            got: grid,
            min: MIN_ROTATION_GRID,
        });
    }
    let (mut best_pole, mut best) = rng::fibonacci_sphere(grid)
        .map(|u| (u, min_height(curve, &u)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();

    let mut step = (4.0 * PI / grid as f64).sqrt();
    while step > 1e-12 {
        let (e1, e2) = orthonormal_frame(&best_pole);
        let mut improved = false;
        for k in 0..8 {
            let theta = k as f64 * PI / 4.0;
            let dir = e1 * theta.cos() + e2 * theta.sin();
            let candidate = (best_pole * step.cos() + dir * step.sin()).normalize();
            let value = min_height(curve, &candidate);
            if value > best {
                best = value;
                best_pole = candidate;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let rotation = Rotation3::rotation_between(&best_pole, &Vector3::z())
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), PI));
    Ok(HeightRotation {
        z_min: curve.radius * best,
        pole: best_pole,
        rotation,
    })
}
