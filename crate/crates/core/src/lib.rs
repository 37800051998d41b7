//! Numerical checks for minimal disks in hyperbolic balls, short curves on
//! round spheres, and the degree threshold that turns an area floor into a
//! genus bound.
//!
//! Modules:
//! - [`hyperbolic`]: Poincaré ball primitives and the disk area `a(r)`.
//! - [`spherical`]: spherical polylines, great circles, the Crofton estimator.
//! - [`minimal_surface`]: triangulated disks and a hyperbolic area minimizer.
//! - [`cover_bounds`]: injectivity profiles and the degree threshold `n(h)`.
//! - [`verify`]: the verification suite and its JSON report.

pub mod cover_bounds;
pub mod curve_gen;
pub mod error;
pub mod hull;
pub mod hyperbolic;
pub mod io;
pub mod minimal_surface;
pub mod quadrature;
pub mod rng;
pub mod spherical;
pub mod verify;

pub use error::{GeometryError, Result};
pub use hyperbolic::{disk_area, hyp_distance, HyperbolicBall, PoincarePoint};
pub use spherical::{CroftonEstimate, GreatCircle, SphericalCurve};
