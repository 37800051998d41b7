//! Primitives for hyperbolic 3-space in the Poincaré unit-ball model.
//!
//! Points are stored in ball coordinates; every quantity (distances, leaf
//! heights, disk areas) is computed directly from them. The ball `B(R)`
//! centered at the origin is the Euclidean ball of radius `tanh(R / 2)`.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{GeometryError, Result};
use crate::quadrature::adaptive_simpson;

/// Largest Euclidean norm a stored point may have.
pub const MAX_EUCLIDEAN_NORM: f64 = 1.0 - 1e-12;

/// Numeric resolution shared by the pure-geometry operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Precision {
    /// Absolute tolerance for quadratures and root solves.
    pub abs_tol: f64,
    /// Number of nodes used when measuring the length of a geodesic circle.
    pub circle_samples: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            circle_samples: 64,
        }
    }
}

/// A point of the open unit ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoincarePoint {
    coords: Vector3<f64>,
    clamped: bool,
}

impl PoincarePoint {
    pub const ORIGIN: PoincarePoint = PoincarePoint {
        coords: Vector3::new(0.0, 0.0, 0.0),
        clamped: false,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self::from_vector(Vector3::new(x, y, z))
    }

    /// Builds a point, pulling it back inside the ball if its norm exceeds
    /// [`MAX_EUCLIDEAN_NORM`]. The clamp is recorded in [`Self::was_clamped`].
    pub fn from_vector(v: Vector3<f64>) -> Self {
        let norm = v.norm();
        if norm > MAX_EUCLIDEAN_NORM {
            Self {
                coords: v * (MAX_EUCLIDEAN_NORM / norm),
                clamped: true,
            }
        } else {
            Self {
                coords: v,
                clamped: false,
            }
        }
    }

    pub fn coords(&self) -> Vector3<f64> {
        self.coords
    }

    pub fn x(&self) -> f64 {
        self.coords.x
    }

    pub fn y(&self) -> f64 {
        self.coords.y
    }

    pub fn z(&self) -> f64 {
        self.coords.z
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coords.norm()
    }

    /// `1 - |x|^2`, evaluated as `(1 - |x|)(1 + |x|)`.
    fn boundary_gap(&self) -> f64 {
        let n = self.coords.norm();
        (1.0 - n) * (1.0 + n)
    }

    /// The metric of the model is `lambda(x)^2` times the Euclidean one.
    pub fn conformal_factor(&self) -> f64 {
        2.0 / self.boundary_gap()
    }
}

/// Hyperbolic distance between two points of the ball.
pub fn hyp_distance(p: &PoincarePoint, q: &PoincarePoint) -> f64 {
    let chord = (p.coords - q.coords).norm();
    let s = chord / (p.boundary_gap() * q.boundary_gap()).sqrt();
    2.0 * s.asinh()
}

/// Möbius addition `a ⊕ x`: the hyperbolic translation sending the origin
/// to `a`, applied to `x`.
pub fn mobius_add(a: &PoincarePoint, x: &PoincarePoint) -> PoincarePoint {
    let av = a.coords;
    let xv = x.coords;
    let ax = av.dot(&xv);
    let a2 = av.norm_squared();
    let x2 = xv.norm_squared();
    let num = av * (1.0 + 2.0 * ax + x2) + xv * (1.0 - a2);
    let den = 1.0 + 2.0 * ax + a2 * x2;
    PoincarePoint::from_vector(num / den)
}

fn negate(p: &PoincarePoint) -> PoincarePoint {
    PoincarePoint::from_vector(-p.coords)
}

/// Euclidean norm of the point at hyperbolic distance `r` from the origin.
pub fn euclidean_radius(r: f64) -> f64 {
    (0.5 * r).tanh()
}

/// Length of the geodesic circle of hyperbolic radius `t` about the origin,
/// measured as the periodic trapezoid sum of the metric line element.
pub fn circle_circumference(t: f64, samples: usize) -> f64 {
    let rho = euclidean_radius(t);
    let n = samples.max(3);
    let dtheta = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let theta = k as f64 * dtheta;
            let p = PoincarePoint::new(rho * theta.cos(), rho * theta.sin(), 0.0);
            // |x'(theta)| = rho for the parameterization above.
            p.conformal_factor() * rho * dtheta
        })
        .sum()
}

/// Area `a(r)` of a hyperbolic disk of radius `r`, at default precision.
pub fn disk_area(r: f64) -> Result<f64> {
    disk_area_with(r, &Precision::default())
}

/// Area of a hyperbolic disk of radius `r`, obtained by integrating geodesic
/// circle circumferences over the radius.
pub fn disk_area_with(r: f64, precision: &Precision) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(GeometryError::NegativeRadius(r));
    }
    let samples = precision.circle_samples;
    Ok(adaptive_simpson(
        |t| circle_circumference(t, samples),
        0.0,
        r,
        precision.abs_tol,
    ))
}

/// Inverse of [`disk_area`]: the radius whose disk has the given area.
pub fn radius_for_area(area: f64) -> Result<f64> {
    if !(area >= 0.0) || !area.is_finite() {
        return Err(GeometryError::InvalidParameter(format!(
            "disk area must be a finite non-negative number, got {area}"
        )));
    }
    if area == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while disk_area(hi)? < area {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if disk_area(mid)? < area {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A hyperbolic ball `B(R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicBall {
    radius: f64,
    center: PoincarePoint,
}

impl HyperbolicBall {
    pub fn new(radius: f64, center: PoincarePoint) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Self { radius, center })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(radius, PoincarePoint::ORIGIN)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> PoincarePoint {
        self.center
    }

    /// Radius of the Euclidean ball representing `B(R)` when centered at the origin.
    pub fn euclidean_radius(&self) -> f64 {
        euclidean_radius(self.radius)
    }

    /// Point of `∂B(R)` reached by the geodesic leaving the center in `direction`.
    pub fn boundary_point(&self, direction: &Vector3<f64>) -> PoincarePoint {
        let dir = direction.normalize();
        let local = PoincarePoint::from_vector(dir * self.euclidean_radius());
        mobius_add(&self.center, &local)
    }

    pub fn contains(&self, p: &PoincarePoint) -> bool {
        hyp_distance(&self.center, p) <= self.radius
    }

    /// Expresses `p` in coordinates where the ball's center is the origin.
    fn to_local(&self, p: &PoincarePoint) -> PoincarePoint {
        mobius_add(&negate(&self.center), p)
    }

    fn from_local(&self, p: &PoincarePoint) -> PoincarePoint {
        mobius_add(&self.center, p)
    }
}

/// Parameterization of the sphere `∂B(R)` about the origin.
pub fn sphere_of_radius(radius: f64) -> Result<HyperbolicBall> {
    HyperbolicBall::centered(radius)
}

/// Leaf `D_t` of the foliation of a ball by geodesic disks perpendicular to an axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicDisk {
    ball: HyperbolicBall,
    height: f64,
    axis: Vector3<f64>,
}

impl GeodesicDisk {
    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball.radius
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    /// Where the leaf meets the axis.
    pub fn center(&self) -> PoincarePoint {
        let local = PoincarePoint::from_vector(self.axis * euclidean_radius(self.height));
        self.ball.from_local(&local)
    }

    /// Hyperbolic radius `rho` of the disk, from `cosh R = cosh t · cosh rho`.
    pub fn disk_radius(&self) -> f64 {
        let ratio = self.ball.radius.cosh() / self.height.cosh();
        ratio.max(1.0).acosh()
    }

    /// Point of the leaf at hyperbolic distance `rho` from its center, at
    /// angle `theta` in the leaf's tangent frame.
    pub fn point(&self, rho: f64, theta: f64) -> PoincarePoint {
        let (e1, e2) = orthonormal_frame(&self.axis);
        let dir = e1 * theta.cos() + e2 * theta.sin();
        let offset = PoincarePoint::from_vector(dir * euclidean_radius(rho));
        let on_axis = PoincarePoint::from_vector(self.axis * euclidean_radius(self.height));
        self.ball.from_local(&mobius_add(&on_axis, &offset))
    }

    pub fn rim_point(&self, theta: f64) -> PoincarePoint {
        self.point(self.disk_radius(), theta)
    }

    /// Hyperbolic distance from `p` to the geodesic plane carrying this leaf.
    pub fn distance_to_plane(&self, p: &PoincarePoint) -> f64 {
        let local = self.ball.to_local(p);
        let v = local.coords;
        let gap = local.boundary_gap();
        let time = (1.0 + v.norm_squared()) / gap;
        let along = 2.0 * v.dot(&self.axis) / gap;
        (along * self.height.cosh() - time * self.height.sinh()).abs().asinh()
    }
}

/// Returns `D_t` for the foliation of `ball` perpendicular to the z-axis.
pub fn foliation_disk(ball: &HyperbolicBall, t: f64) -> Result<GeodesicDisk> {
    foliation_disk_along(ball, t, &Vector3::z())
}

pub fn foliation_disk_along(
    ball: &HyperbolicBall,
    t: f64,
    axis: &Vector3<f64>,
) -> Result<GeodesicDisk> {
    if !(t.abs() <= ball.radius) {
        return Err(GeometryError::HeightOutOfRange {
            height: t,
            radius: ball.radius,
        });
    }
    let norm = axis.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(GeometryError::InvalidParameter("foliation axis must be non-zero".into()));
    }
    Ok(GeodesicDisk {
        ball: *ball,
        height: t,
        axis: axis / norm,
    })
}

/// Signed height `t` of the leaf `D_t` containing `p`.
pub fn leaf_height(ball: &HyperbolicBall, axis: &Vector3<f64>, p: &PoincarePoint) -> f64 {
    let local = ball.to_local(p);
    let v = local.coords;
    let axis = axis.normalize();
    (2.0 * v.dot(&axis) / (1.0 + v.norm_squared())).atanh()
}

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
pub(crate) fn orthonormal_frame(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let a = axis.normalize();
    let helper = if a.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - a * a.dot(&helper)).normalize();
    let e2 = a.cross(&e1);
    (e1, e2)
}
