//! Curve CSV, profile JSON and mesh OBJ formats.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use thiserror::Error;

use crate::cover_bounds::GeometryProfile;
use crate::error::GeometryError;
use crate::hyperbolic::PoincarePoint;
use crate::minimal_surface::{loop_on_sphere, BoundarySpec, TriMesh};
use crate::spherical::SphericalCurve;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<(f64, bool), FormatError> {
    let mut radius = None;
    let mut closed = None;
    for field in text.split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got `{}`", field.trim())))?;
        match key.trim() {
            "r" => {
                let r: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("radius `{}` is not a number", value.trim())))?;
                radius = Some(r);
            }
            "closed" => {
                closed = Some(match value.trim() {
                    "0" => false,
                    "1" => true,
                    other => return Err(parse_err(line, format!("closed must be 0 or 1, got `{other}`"))),
                });
            }
            other => return Err(parse_err(line, format!("unknown header key `{other}`"))),
        }
    }
    match (radius, closed) {
        (Some(r), Some(c)) => Ok((r, c)),
        _ => Err(parse_err(line, "header must be `r=<radius>,closed=<0|1>`")),
    }
}

/// Parses a curve file: a `r=<radius>,closed=<0|1>` header, then one unit
/// `x,y,z` triple per line. Blank lines are skipped.
pub fn parse_curve_csv(text: &str) -> Result<SphericalCurve, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty curve file"))?;
    let (radius, closed) = parse_header(hline, header)?;
    let mut vertices = Vec::new();
    for (line, row) in lines {
        let coords: Vec<&str> = row.split(',').map(str::trim).collect();
        if coords.len() != 3 {
            return Err(parse_err(line, format!("expected x,y,z, got {} fields", coords.len())));
        }
        let mut v = [0.0; 3];
        for (slot, s) in v.iter_mut().zip(&coords) {
            *slot = s
                .parse()
                .map_err(|_| parse_err(line, format!("`{s}` is not a number")))?;
        }
        let v: Vector3<f64> = Vector3::from(v);
        if (v.norm() - 1.0).abs() > crate::spherical::UNIT_INPUT_TOL {
            return Err(parse_err(line, format!("vertex has norm {}, expected 1", v.norm())));
        }
        vertices.push(v);
    }
    Ok(SphericalCurve::new(radius, vertices, closed)?)
}

pub fn read_curve_csv(path: &Path) -> Result<SphericalCurve, FormatError> {
    parse_curve_csv(&read(path)?)
}

pub fn curve_to_csv(curve: &SphericalCurve) -> String {
    let mut out = format!("r={},closed={}\n", curve.radius(), u8::from(curve.closed()));
    for v in curve.unit_vertices() {
        let _ = writeln!(out, "{},{},{}", v.x, v.y, v.z);
    }
    out
}

pub fn parse_profile_json(text: &str) -> Result<GeometryProfile, FormatError> {
    let profile: GeometryProfile = serde_json::from_str(text)?;
    profile.validate()?;
    Ok(profile)
}

pub fn read_profile_json(path: &Path) -> Result<GeometryProfile, FormatError> {
    parse_profile_json(&read(path)?)
}

/// Boundary loop on `∂B(R)` for any [`BoundarySpec`]. A `file:` spec is a
/// closed curve CSV whose vertices give the loop directions; its radius
/// field is ignored.
pub fn load_boundary(spec: &BoundarySpec, ball_radius: f64) -> Result<Vec<PoincarePoint>, FormatError> {
    match spec {
        BoundarySpec::File(path) => {
            let curve = read_curve_csv(path)?;
            if !curve.closed() {
                return Err(GeometryError::OpenCurve.into());
            }
            Ok(loop_on_sphere(ball_radius, curve.unit_vertices())?)
        }
        other => Ok(other.generate(ball_radius)?),
    }
}

/// OBJ text with 1-based faces and comments carrying `R` and the area.
pub fn mesh_to_obj(mesh: &TriMesh, area: f64) -> String {
    let mut out = String::from("# geodesic-lab minimal disk, Poincare ball coordinates\n");
    let _ = writeln!(out, "# R={}", mesh.ball_radius());
    let _ = writeln!(out, "# area={area}");
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", p.x(), p.y(), p.z());
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn write_mesh_obj(path: &Path, mesh: &TriMesh, area: f64) -> Result<(), FormatError> {
    fs::write(path, mesh_to_obj(mesh, area)).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}
