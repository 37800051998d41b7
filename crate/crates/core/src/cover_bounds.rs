//! Degree thresholds that force large genus.
//!
//! Disjoint embedded balls of radius `R`, each centered on a minimal surface,
//! contribute at least `a(R)` of area apiece, while a surface of curvature at
//! most `-1` and genus `h` has area at most `2π(2h - 2)`. The threshold `n(h)`
//! is the smallest degree at which the first bound beats the second.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::hyperbolic::disk_area;

/// Quotients within this distance of an integer are flagged as boundary-sensitive.
pub const INTEGRALITY_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    /// Injectivity radius at the sample point.
    pub inj: f64,
    /// Distance from the sample point to the pushed-off copy of the surface.
    pub dist: f64,
}

/// Sampled injectivity radii and push-off distances along a surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryProfile {
    pub label: String,
    pub samples: Vec<ProfileSample>,
}

impl GeometryProfile {
    pub fn new(label: impl Into<String>, samples: Vec<ProfileSample>) -> Result<Self> {
        let profile = Self {
            label: label.into(),
            samples,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(GeometryError::EmptyProfile);
        }
        for (i, s) in self.samples.iter().enumerate() {
            let ok = |v: f64| v.is_finite() && v > 0.0;
            if !ok(s.inj) || !ok(s.dist) {
                return Err(GeometryError::InvalidProfileSample(i));
            }
        }
        Ok(())
    }
}

/// `R = min_p min(inj(p), d(p, F̂))`.
pub fn compute_r(profile: &GeometryProfile) -> Result<f64> {
    profile.validate()?;
    Ok(profile
        .samples
        .iter()
        .map(|s| s.inj.min(s.dist))
        .fold(f64::INFINITY, f64::min))
}

/// `2π(2h - 2)`, the largest area a genus-`h` surface of curvature `<= -1` can have.
pub fn gauss_bonnet_area(h: i64) -> f64 {
    2.0 * PI * (2 * h - 2) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub degree: u64,
    /// `2π(2h - 2) / a(R)`.
    pub quotient: f64,
    /// The quotient is within [`INTEGRALITY_GUARD`] of an integer.
    pub boundary_sensitive: bool,
}

/// Smallest integer strictly greater than `2π(2h - 2) / area`, and at least 1.
pub fn threshold_for_area(h: i64, area: f64) -> Result<Threshold> {
    if h < 0 {
        return Err(GeometryError::NegativeGenus(h));
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(GeometryError::InvalidParameter(format!("disk area must be positive, got {area}")));
    }
    let quotient = gauss_bonnet_area(h) / area;
    if quotient >= 2f64.powi(53) {
        return Err(GeometryError::InvalidParameter(format!(
            "threshold quotient {quotient:e} exceeds exact integer range"
        )));
    }
    let degree = if quotient < 0.0 {
        1
    } else {
        (quotient.floor() as u64 + 1).max(1)
    };
    Ok(Threshold {
        degree,
        quotient,
        boundary_sensitive: (quotient - quotient.round()).abs() < INTEGRALITY_GUARD,
    })
}

/// Threshold degree `n(h)` for balls of radius `R`.
pub fn threshold_degree(h: i64, r: f64) -> Result<u64> {
    Ok(threshold_for_area(h, radius_area(r)?)?.degree)
}

fn radius_area(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeometryError::NonPositiveRadius(r));
    }
    disk_area(r)
}

/// Area accumulated by `d` disjoint balls of radius `R`: `d · a(R)`.
pub fn area_floor(d: u64, r: f64) -> Result<f64> {
    Ok(d as f64 * radius_area(r)?)
}

/// True when `area > 2π(2h - 2)`: no surface of genus `h` and curvature `<= -1`
/// can have that much area.
pub fn genus_exceeds(area: f64, h: i64) -> bool {
    area > gauss_bonnet_area(h)
}

/// The full chain for one `(h, R)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub r: f64,
    pub a_of_r: f64,
    pub h: i64,
    pub threshold: u64,
    pub quotient: f64,
    pub boundary_sensitive: bool,
    /// `n · a(R)`.
    pub area_floor: f64,
}

pub fn bound_for_area(h: i64, r: f64, a_of_r: f64) -> Result<BoundResult> {
    let t = threshold_for_area(h, a_of_r)?;
    Ok(BoundResult {
        r,
        a_of_r,
        h,
        threshold: t.degree,
        quotient: t.quotient,
        boundary_sensitive: t.boundary_sensitive,
        area_floor: t.degree as f64 * a_of_r,
    })
}

pub fn bound(h: i64, r: f64) -> Result<BoundResult> {
    bound_for_area(h, r, radius_area(r)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub h: i64,
    pub n: u64,
    pub quotient: f64,
    pub boundary_sensitive: bool,
}

/// Thresholds for every genus budget `0..=h_max`.
pub fn exclusion_table(h_max: i64, r: f64) -> Result<Vec<TableRow>> {
    exclusion_table_for_area(h_max, radius_area(r)?)
}

pub fn exclusion_table_for_area(h_max: i64, a_of_r: f64) -> Result<Vec<TableRow>> {
    if h_max < 0 {
        return Err(GeometryError::NegativeGenus(h_max));
    }
    (0..=h_max)
        .map(|h| {
            let t = threshold_for_area(h, a_of_r)?;
            Ok(TableRow {
                h,
                n: t.degree,
                quotient: t.quotient,
                boundary_sensitive: t.boundary_sensitive,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(inj: f64, dist: f64) -> ProfileSample {
        ProfileSample { inj, dist }
    }

    #[test]
    fn r_is_the_smallest_entry() {
        let p = GeometryProfile::new("two", vec![sample(0.5, 0.7), sample(0.6, 0.4)]).unwrap();
        assert_eq!(compute_r(&p).unwrap(), 0.4);
        let p = GeometryProfile::new("one", vec![sample(1.0, 1.0)]).unwrap();
        assert_eq!(compute_r(&p).unwrap(), 1.0);
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        assert_eq!(GeometryProfile::new("empty", vec![]), Err(GeometryError::EmptyProfile));
        assert_eq!(
            GeometryProfile::new("neg", vec![sample(1.0, 1.0), sample(0.0, 1.0)]),
            Err(GeometryError::InvalidProfileSample(1))
        );
        let raw = GeometryProfile {
            label: "raw".into(),
            samples: vec![],
        };
        assert_eq!(compute_r(&raw), Err(GeometryError::EmptyProfile));
    }

    #[test]
    fn low_genus_budgets_give_degree_one() {
        for r in [0.1, 1.0, 3.0] {
            assert_eq!(threshold_degree(1, r).unwrap(), 1);
            assert_eq!(threshold_degree(0, r).unwrap(), 1);
        }
        assert_eq!(threshold_degree(-1, 1.0), Err(GeometryError::NegativeGenus(-1)));
    }

    #[test]
    fn integral_quotient_rounds_up() {
        let t = threshold_for_area(2, 4.0 * PI).unwrap();
        assert_eq!(t.quotient, 1.0);
        assert_eq!(t.degree, 2);
        assert!(t.boundary_sensitive);
    }

    #[test]
    fn strict_threshold_for_genus() {
        assert!(genus_exceeds(4.0 * PI + 0.01, 2));
        assert!(!genus_exceeds(4.0 * PI, 2));
    }

    #[test]
    fn floor_is_linear_in_degree() {
        let a = area_floor(1, 0.8).unwrap();
        assert_eq!(a, disk_area(0.8).unwrap());
        assert_eq!(area_floor(6, 0.8).unwrap(), 2.0 * area_floor(3, 0.8).unwrap());
        assert!(area_floor(1, 0.0).is_err());
    }

    #[test]
    fn table_for_small_budget() {
        let rows = exclusion_table(1, 0.7).unwrap();
        assert_eq!(rows.iter().map(|r| (r.h, r.n)).collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        assert!(exclusion_table(-1, 0.7).is_err());
    }
}
