//! Discrete hyperbolic area of a triangle mesh and its analytic gradient.
//!
//! Each flat triangle of the ball chart is integrated against the area
//! density `lambda(x)^2 = 4 / (1 - |x|^2)^2` with the three-point edge
//! midpoint rule.

use nalgebra::Vector3;

use super::mesh::TriMesh;

/// Area density of the ball model.
pub(crate) fn density(x: &Vector3<f64>) -> f64 {
    let gap = 1.0 - x.norm_squared();
    4.0 / (gap * gap)
}

fn density_gradient(x: &Vector3<f64>) -> Vector3<f64> {
    let gap = 1.0 - x.norm_squared();
    x * (16.0 / (gap * gap * gap))
}

/// Quadrature area of the flat triangle `abc`.
pub(crate) fn triangle_area(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let flat = 0.5 * (b - a).cross(&(c - a)).norm();
    let mab = 0.5 * (a + b);
    let mbc = 0.5 * (b + c);
    let mca = 0.5 * (c + a);
    flat / 3.0 * (density(&mab) + density(&mbc) + density(&mca))
}

/// Gradient of [`triangle_area`] with respect to `a`, `b` and `c`.
fn triangle_gradient(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> [Vector3<f64>; 3] {
    let cross = (b - a).cross(&(c - a));
    let twice = cross.norm();
    let flat = 0.5 * twice;
    let mab = 0.5 * (a + b);
    let mbc = 0.5 * (b + c);
    let mca = 0.5 * (c + a);
    let weight = (density(&mab) + density(&mbc) + density(&mca)) / 3.0;

    let (da, db, dc) = if twice > 0.0 {
        let n = cross / twice;
        (
            0.5 * n.cross(&(c - b)),
            0.5 * n.cross(&(a - c)),
            0.5 * n.cross(&(b - a)),
        )
    } else {
        (Vector3::zeros(), Vector3::zeros(), Vector3::zeros())
    };
    let gab = density_gradient(&mab);
    let gbc = density_gradient(&mbc);
    let gca = density_gradient(&mca);
    let k = flat / 6.0;
    [
        da * weight + (gab + gca) * k,
        db * weight + (gab + gbc) * k,
        dc * weight + (gbc + gca) * k,
    ]
}

pub(crate) fn area_of(positions: &[Vector3<f64>], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| triangle_area(&positions[t[0]], &positions[t[1]], &positions[t[2]]))
        .sum()
}

/// Gradient with respect to every vertex; fixed vertices are zeroed by the caller.
pub(crate) fn gradient_of(positions: &[Vector3<f64>], triangles: &[[usize; 3]]) -> Vec<Vector3<f64>> {
    let mut grad = vec![Vector3::zeros(); positions.len()];
    for t in triangles {
        let g = triangle_gradient(&positions[t[0]], &positions[t[1]], &positions[t[2]]);
        for k in 0..3 {
            grad[t[k]] += g[k];
        }
    }
    grad
}

/// Hyperbolic area of the mesh.
pub fn mesh_area(mesh: &TriMesh) -> f64 {
    area_of(&mesh.positions(), &mesh.triangles)
}

/// Smallest per-triangle hyperbolic area.
pub fn min_triangle_area(mesh: &TriMesh) -> f64 {
    let p = mesh.positions();
    mesh.triangles
        .iter()
        .map(|t| triangle_area(&p[t[0]], &p[t[1]], &p[t[2]]))
        .fold(f64::INFINITY, f64::min)
}

/// Gradient of [`mesh_area`] with respect to the free vertices, as
/// `(vertex index, dA/dx)` pairs in increasing index order.
pub fn area_gradient(mesh: &TriMesh) -> Vec<(usize, Vector3<f64>)> {
    let grad = gradient_of(&mesh.positions(), &mesh.triangles);
    grad.into_iter()
        .enumerate()
        .filter(|(i, _)| mesh.is_free(*i))
        .collect()
}

/// Euclidean norm of the free-vertex gradient.
pub fn gradient_norm(gradient: &[(usize, Vector3<f64>)]) -> f64 {
    gradient.iter().map(|(_, g)| g.norm_squared()).sum::<f64>().sqrt()
}
