//! Boundary loops on `∂B(R)` for the disk solver.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::{Rotation3, Unit, Vector3};
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::hyperbolic::{sphere_of_radius, PoincarePoint};
use crate::rng;

/// Places unit directions on the sphere of hyperbolic radius `ball_radius`.
pub fn loop_on_sphere(ball_radius: f64, directions: &[Vector3<f64>]) -> Result<Vec<PoincarePoint>> {
    let ball = sphere_of_radius(ball_radius)?;
    Ok(directions.iter().map(|d| ball.boundary_point(d)).collect())
}

fn angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
}

/// The equatorial great circle, `n` points.
pub fn equator_loop(ball_radius: f64, n: usize) -> Result<Vec<PoincarePoint>> {
    tilted_loop(ball_radius, n, 0.0)
}

/// Equator rotated by `tilt_deg` degrees about the x-axis.
pub fn tilted_loop(ball_radius: f64, n: usize, tilt_deg: f64) -> Result<Vec<PoincarePoint>> {
    let rot = Rotation3::from_axis_angle(&Vector3::x_axis(), tilt_deg.to_radians());
    let dirs: Vec<Vector3<f64>> = angles(n)
        .map(|t| rot * Vector3::new(t.cos(), t.sin(), 0.0))
        .collect();
    loop_on_sphere(ball_radius, &dirs)
}

/// Equator with a vertical oscillation of `modes` periods and amplitude `amp`.
pub fn wavy_loop(ball_radius: f64, n: usize, modes: u32, amp: f64) -> Result<Vec<PoincarePoint>> {
    let dirs: Vec<Vector3<f64>> = angles(n)
        .map(|t| Vector3::new(t.cos(), t.sin(), amp * (modes as f64 * t).sin()))
        .collect();
    loop_on_sphere(ball_radius, &dirs)
}

/// Randomly rotated equator with random low-frequency vertical oscillations.
pub fn random_loop<R: Rng + ?Sized>(rng: &mut R, ball_radius: f64, n: usize) -> Result<Vec<PoincarePoint>> {
    let coeffs: Vec<(f64, f64)> = (0..3)
        .map(|_| ((rng.random::<f64>() - 0.5) * 0.7, (rng.random::<f64>() - 0.5) * 0.7))
        .collect();
    let axis = Unit::new_normalize(rng::unit_vector(rng));
    let rot = Rotation3::from_axis_angle(&axis, rng.random::<f64>() * 2.0 * PI);
    let dirs: Vec<Vector3<f64>> = angles(n)
        .map(|t| {
            let z: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let m = (k + 1) as f64;
                    a * (m * t).cos() + b * (m * t).sin()
                })
                .sum();
            rot * Vector3::new(t.cos(), t.sin(), z)
        })
        .collect();
    loop_on_sphere(ball_radius, &dirs)
}

/// Boundary loop family named on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    Equator,
    Tilt { degrees: f64 },
    Wavy { modes: u32, amplitude: f64 },
    File(PathBuf),
}

/// Number of loop samples used by the generated families.
pub const DEFAULT_LOOP_POINTS: usize = 16;

impl BoundarySpec {
    /// Samples the loop for generated families; `File` must be loaded through [`crate::io`].
    pub fn generate(&self, ball_radius: f64) -> Result<Vec<PoincarePoint>> {
        match self {
            BoundarySpec::Equator => equator_loop(ball_radius, DEFAULT_LOOP_POINTS),
            BoundarySpec::Tilt { degrees } => tilted_loop(ball_radius, DEFAULT_LOOP_POINTS, *degrees),
            BoundarySpec::Wavy { modes, amplitude } => {
                let n = DEFAULT_LOOP_POINTS.max(8 * *modes as usize);
                wavy_loop(ball_radius, n, *modes, *amplitude)
            }
            BoundarySpec::File(path) => Err(GeometryError::InvalidBoundary(format!(
                "{} must be read from disk",
                path.display()
            ))),
        }
    }
}

impl FromStr for BoundarySpec {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| GeometryError::InvalidBoundary(format!("`{s}`: {why}"));
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or_default();
        let rest = parts.next();
        match (head, rest) {
            ("equator", None) => Ok(BoundarySpec::Equator),
            ("tilt", Some(deg)) => {
                let degrees: f64 = deg.parse().map_err(|_| bad("tilt angle is not a number"))?;
                if !degrees.is_finite() {
                    return Err(bad("tilt angle must be finite"));
                }
                Ok(BoundarySpec::Tilt { degrees })
            }
            ("wavy", Some(args)) => {
                let (modes, amp) = args.split_once(':').ok_or_else(|| bad("expected wavy:<modes>:<amp>"))?;
                let modes: u32 = modes.parse().map_err(|_| bad("modes must be a non-negative integer"))?;
                let amplitude: f64 = amp.parse().map_err(|_| bad("amplitude is not a number"))?;
                if !amplitude.is_finite() || modes > 64 {
                    return Err(bad("amplitude must be finite and modes at most 64"));
                }
                Ok(BoundarySpec::Wavy { modes, amplitude })
            }
            ("file", Some(path)) if !path.is_empty() => Ok(BoundarySpec::File(PathBuf::from(path))),
            _ => Err(bad("expected equator, tilt:<deg>, wavy:<modes>:<amp> or file:<path>")),
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySpec::Equator => write!(f, "equator"),
            BoundarySpec::Tilt { degrees } => write!(f, "tilt:{degrees}"),
            BoundarySpec::Wavy { modes, amplitude } => write!(f, "wavy:{modes}:{amplitude}"),
            BoundarySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::hyp_distance;

    #[test]
    fn parses_boundary_specs() {
        assert_eq!("equator".parse::<BoundarySpec>().unwrap(), BoundarySpec::Equator);
        assert_eq!("tilt:30".parse::<BoundarySpec>().unwrap(), BoundarySpec::Tilt { degrees: 30.0 });
        assert_eq!(
            "wavy:3:0.2".parse::<BoundarySpec>().unwrap(),
            BoundarySpec::Wavy { modes: 3, amplitude: 0.2 }
        );
        assert_eq!(
            "file:loop.csv".parse::<BoundarySpec>().unwrap(),
            BoundarySpec::File("loop.csv".into())
        );
        for bad in ["", "equator:1", "tilt", "tilt:x", "wavy:3", "wavy:-1:0.2", "file:", "disk"] {
            assert!(bad.parse::<BoundarySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn generated_loops_lie_on_the_sphere() {
        for spec in [
            BoundarySpec::Equator,
            BoundarySpec::Tilt { degrees: 25.0 },
            BoundarySpec::Wavy { modes: 3, amplitude: 0.3 },
        ] {
            for p in spec.generate(1.5).unwrap() {
                assert!((hyp_distance(&PoincarePoint::ORIGIN, &p) - 1.5).abs() < 1e-12);
            }
        }
    }
}
