use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{GeometryError, Result};
use crate::hyperbolic::{euclidean_radius, hyp_distance, PoincarePoint};

use super::area::triangle_area;

/// Boundary vertices must sit on `∂B(R)` to within this hyperbolic distance.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Triangles with smaller hyperbolic area count as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;
pub const MIN_BOUNDARY_POINTS: usize = 8;

/// A triangulated disk in the ball `B(R)` with its boundary on `∂B(R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    pub(crate) vertices: Vec<PoincarePoint>,
    pub(crate) triangles: Vec<[usize; 3]>,
    pub(crate) boundary: Vec<bool>,
    pub(crate) pinned: Option<usize>,
    pub(crate) ball_radius: f64,
}

impl TriMesh {
    /// Assembles a mesh and checks the disk invariants.
    pub fn new(
        vertices: Vec<PoincarePoint>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        pinned: Option<usize>,
        ball_radius: f64,
    ) -> Result<Self> {
        let mesh = Self {
            vertices,
            triangles,
            boundary,
            pinned,
            ball_radius,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[PoincarePoint] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn pinned(&self) -> Option<usize> {
        self.pinned
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn is_free(&self, i: usize) -> bool {
        !self.boundary[i] && self.pinned != Some(i)
    }

    /// Indices of vertices the solver may move.
    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.is_free(i)).collect()
    }

    pub(crate) fn positions(&self) -> Vec<Vector3<f64>> {
        self.vertices.iter().map(|p| p.coords()).collect()
    }

    pub(crate) fn set_positions(&mut self, positions: &[Vector3<f64>]) {
        for (v, p) in self.vertices.iter_mut().zip(positions) {
            *v = PoincarePoint::from_vector(*p);
        }
    }

    /// Replaces the position of a free vertex.
    pub fn move_vertex(&mut self, i: usize, to: PoincarePoint) -> Result<()> {
        if !self.is_free(i) {
            return Err(GeometryError::InvalidMesh(format!("vertex {i} is fixed")));
        }
        self.vertices[i] = to;
        Ok(())
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        edge_usage(&self.triangles)
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let e = self.edge_counts().len() as i64;
        self.vertices.len() as i64 - e + self.triangles.len() as i64
    }

    /// Number of closed cycles formed by edges that bound a single triangle.
    pub fn boundary_cycles(&self) -> usize {
        let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
        for (&(a, b), &count) in &self.edge_counts() {
            if count == 1 {
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut cycles = 0;
        let mut starts: Vec<usize> = adjacency.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            if !seen.insert(start) {
                continue;
            }
            cycles += 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adjacency[&v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        cycles
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.boundary.len() != n {
            return Err(GeometryError::InvalidMesh("boundary mask length mismatch".into()));
        }
        if !(self.ball_radius > 0.0) {
            return Err(GeometryError::NonPositiveRadius(self.ball_radius));
        }
        if self.triangles.iter().flatten().any(|&i| i >= n) {
            return Err(GeometryError::InvalidMesh("triangle index out of range".into()));
        }
        if let Some(p) = self.pinned {
            if p >= n || self.boundary[p] {
                return Err(GeometryError::InvalidMesh("pinned vertex must be interior".into()));
            }
        }
        let chi = self.euler_characteristic();
        if chi != 1 || self.boundary_cycles() != 1 {
            return Err(GeometryError::InvalidMesh(format!(
                "not a disk: Euler characteristic {chi}, {} boundary cycles",
                self.boundary_cycles()
            )));
        }
        for (&(a, b), &count) in &self.edge_counts() {
            if count > 2 {
                return Err(GeometryError::InvalidMesh(format!("edge ({a}, {b}) is non-manifold")));
            }
            if count == 1 && !(self.boundary[a] && self.boundary[b]) {
                return Err(GeometryError::InvalidMesh(format!("boundary edge ({a}, {b}) has unmarked ends")));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.boundary[i] {
                let d = hyp_distance(&PoincarePoint::ORIGIN, v);
                if (d - self.ball_radius).abs() > BOUNDARY_TOL {
                    return Err(GeometryError::InvalidMesh(format!(
                        "boundary vertex {i} at distance {d} from the center, expected {}",
                        self.ball_radius
                    )));
                }
            }
        }
        let positions = self.positions();
        if let Some(k) = self
            .triangles
            .iter()
            .position(|t| triangle_area(&positions[t[0]], &positions[t[1]], &positions[t[2]]) < MIN_TRIANGLE_AREA)
        {
            return Err(GeometryError::InvalidMesh(format!("triangle {k} is degenerate")));
        }
        Ok(())
    }

    /// One pass of Euclidean Delaunay edge flips over interior edges.
    /// Returns the number of flips performed.
    pub fn flip_pass(&mut self) -> usize {
        let positions = self.positions();
        let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                owners.entry((a.min(b), a.max(b))).or_default().push(ti);
            }
        }
        let mut keys: Vec<(usize, usize)> = owners.keys().copied().collect();
        keys.sort_unstable();
        let mut touched = vec![false; self.triangles.len()];
        let mut existing: std::collections::HashSet<(usize, usize)> = keys.iter().copied().collect();
        let mut flips = 0;
        for (a, b) in keys {
            let pair = &owners[&(a, b)];
            if pair.len() != 2 || touched[pair[0]] || touched[pair[1]] {
                continue;
            }
            let (t0, t1) = (pair[0], pair[1]);
            let p = opposite(&self.triangles[t0], a, b);
            let q = opposite(&self.triangles[t1], a, b);
            if p == q || existing.contains(&(p.min(q), p.max(q))) {
                continue;
            }
            let angle_p = corner_angle(&positions[p], &positions[a], &positions[b]);
            let angle_q = corner_angle(&positions[q], &positions[a], &positions[b]);
            if angle_p + angle_q <= std::f64::consts::PI {
                continue;
            }
            // Keep the orientation of the first triangle: it runs a -> b or b -> a.
            let (u, v) = directed(&self.triangles[t0], a, b);
            let new0 = [u, q, p];
            let new1 = [q, v, p];
            let ok = [new0, new1].iter().all(|t| {
                triangle_area(&positions[t[0]], &positions[t[1]], &positions[t[2]]) >= MIN_TRIANGLE_AREA
            });
            if !ok {
                continue;
            }
            self.triangles[t0] = new0;
            self.triangles[t1] = new1;
            touched[t0] = true;
            touched[t1] = true;
            existing.remove(&(a, b));
            existing.insert((p.min(q), p.max(q)));
            flips += 1;
        }
        flips
    }
}

fn opposite(t: &[usize; 3], a: usize, b: usize) -> usize {
    *t.iter().find(|&&v| v != a && v != b).unwrap()
}

/// The edge `{a, b}` in the order it appears in `t`.
fn directed(t: &[usize; 3], a: usize, b: usize) -> (usize, usize) {
    for k in 0..3 {
        let (x, y) = (t[k], t[(k + 1) % 3]);
        if (x, y) == (a, b) || (x, y) == (b, a) {
            return (x, y);
        }
    }
    unreachable!("edge not in triangle")
}

fn corner_angle(at: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let u = a - at;
    let v = b - at;
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// `x` lies on the minor arc from `a` to `b` of the same great circle.
fn on_arc(x: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    let angle = |u: &Vector3<f64>, v: &Vector3<f64>| u.cross(v).norm().atan2(u.dot(v));
    angle(a, x) + angle(x, b) - angle(a, b) < 1e-12
}

/// Minor great arcs `(a, b)` and `(c, d)` of the unit sphere meet.
fn arcs_cross(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) -> bool {
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let p = n1.cross(&n2);
    if p.norm() < 1e-14 {
        return on_arc(c, a, b) || on_arc(d, a, b) || on_arc(a, c, d) || on_arc(b, c, d);
    }
    let straddle = |n: &Vector3<f64>, x: &Vector3<f64>, y: &Vector3<f64>| n.dot(x) * n.dot(y) <= 0.0;
    if !straddle(&n1, c, d) || !straddle(&n2, a, b) {
        return false;
    }
    p.dot(&(a + b)).signum() == p.dot(&(c + d)).signum()
}

/// Builds the initial spanning disk: a Euclidean cone over the boundary loop,
/// then `refinement - 1` rounds of 1-to-4 subdivision. New boundary vertices
/// are the midpoints of the loop's minor great arcs on `∂B(R)`.
///
/// With `through_center` the apex is placed at the origin and pinned.
pub fn mesh_boundary_disk(
    boundary: &[PoincarePoint],
    ball_radius: f64,
    refinement: u32,
    through_center: bool,
) -> Result<TriMesh> {
    if !(ball_radius > 0.0) || !ball_radius.is_finite() {
        return Err(GeometryError::NonPositiveRadius(ball_radius));
    }
    if refinement < 1 {
        return Err(GeometryError::InvalidParameter("refinement must be at least 1".into()));
    }
    let n = boundary.len();
    if n < MIN_BOUNDARY_POINTS {
        return Err(GeometryError::InvalidBoundary(format!(
            "need at least {MIN_BOUNDARY_POINTS} points, got {n}"
        )));
    }
    for (i, p) in boundary.iter().enumerate() {
        let d = hyp_distance(&PoincarePoint::ORIGIN, p);
        if (d - ball_radius).abs() > BOUNDARY_TOL {
            return Err(GeometryError::InvalidBoundary(format!(
                "point {i} lies at distance {d}, not on the sphere of radius {ball_radius}"
            )));
        }
    }
    let dirs: Vec<Vector3<f64>> = boundary.iter().map(|p| p.coords().normalize()).collect();
    for i in 0..n {
        let a = &dirs[i];
        let b = &dirs[(i + 1) % n];
        if (a - b).norm() < 1e-12 {
            return Err(GeometryError::InvalidBoundary(format!("repeated point at {i}")));
        }
        if a.dot(b) <= -1.0 + 1e-12 {
            return Err(GeometryError::InvalidBoundary(format!("antipodal neighbours at {i}")));
        }
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if arcs_cross(&dirs[i], &dirs[(i + 1) % n], &dirs[j], &dirs[(j + 1) % n]) {
                return Err(GeometryError::InvalidBoundary(format!(
                    "arcs {i} and {j} intersect; the loop is not simple"
                )));
            }
        }
    }

    let rho = euclidean_radius(ball_radius);
    let apex = if through_center {
        Vector3::zeros()
    } else {
        boundary.iter().map(|p| p.coords()).sum::<Vector3<f64>>() / n as f64
    };
    let mut positions: Vec<Vector3<f64>> = dirs.iter().map(|d| d * rho).collect();
    positions.push(apex);
    let mut is_boundary = vec![true; n];
    is_boundary.push(false);
    let mut triangles: Vec<[usize; 3]> = (0..n).map(|i| [n, i, (i + 1) % n]).collect();

    for _ in 1..refinement {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut refined = Vec::with_capacity(triangles.len() * 4);
        let edge_set = edge_usage(&triangles);
        for t in &triangles {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let on_boundary = edge_set.get(&key) == Some(&1);
                    let m = 0.5 * (positions[a] + positions[b]);
                    let m = if on_boundary { m.normalize() * rho } else { m };
                    positions.push(m);
                    is_boundary.push(on_boundary);
                    positions.len() - 1
                });
            }
            refined.push([t[0], mid[0], mid[2]]);
            refined.push([mid[0], t[1], mid[1]]);
            refined.push([mid[2], mid[1], t[2]]);
            refined.push([mid[0], mid[1], mid[2]]);
        }
        triangles = refined;
    }

    let vertices = positions.into_iter().map(PoincarePoint::from_vector).collect();
    TriMesh::new(
        vertices,
        triangles,
        is_boundary,
        through_center.then_some(n),
        ball_radius,
    )
}

fn edge_usage(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut edges = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    edges
}
