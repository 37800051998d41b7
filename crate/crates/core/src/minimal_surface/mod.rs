//! Discrete least-area disks spanning loops on the sphere `∂B(R)`.

pub mod area;
pub mod boundary;
pub mod mesh;
pub mod solver;

pub use area::{area_gradient, gradient_norm, mesh_area, min_triangle_area};
pub use boundary::{equator_loop, loop_on_sphere, random_loop, tilted_loop, wavy_loop, BoundarySpec};
pub use mesh::{mesh_boundary_disk, TriMesh};
pub use solver::{
    minimize_area, monotonicity_check, MonotonicityOptions, MonotonicityOutcome, SolveOptions, SolveReport,
    StopReason,
};
