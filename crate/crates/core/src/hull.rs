//! Minimum-norm point of a finite point set's convex hull (Wolfe's method).
//!
//! The origin lies outside `conv(P)` exactly when some `u` satisfies
//! `<p, u> > 0` for all `p`; the minimum-norm point `x*` is the dual
//! certificate, with `x* / |x*|` maximizing the margin `min_p <p, u>`.

use nalgebra::{DMatrix, DVector, Vector3};

const MAX_MAJOR: usize = 10_000;
const MAX_MINOR: usize = 64;
const OPTIMALITY_TOL: f64 = 1e-15;
const WEIGHT_TOL: f64 = 1e-14;

/// Result of the hull search: the point found and its barycentric support.
#[derive(Clone, Debug)]
pub struct MinNormPoint {
    pub point: Vector3<f64>,
    pub support: Vec<(usize, f64)>,
}

/// Runs Wolfe's algorithm on `points`; panics if `points` is empty.
pub fn min_norm_point(points: &[Vector3<f64>]) -> MinNormPoint {
    assert!(!points.is_empty(), "min_norm_point needs at least one point");
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let start = (0..points.len())
        .min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared()))
        .unwrap();
    let mut support: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = points[start];

    for _ in 0..MAX_MAJOR {
        if x.norm_squared() == 0.0 {
            break;
        }
        let (j, best) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, x.dot(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if x.norm_squared() - best <= OPTIMALITY_TOL * scale || support.contains(&j) {
            break;
        }
        support.push(j);
        weights.push(0.0);

        for _ in 0..MAX_MINOR {
            let Some(mu) = affine_minimizer(points, &support) else {
                break;
            };
            if mu.iter().all(|&m| m > WEIGHT_TOL) {
                weights = mu;
                break;
            }
            let mut theta: f64 = 1.0;
            for (l, m) in weights.iter().zip(&mu) {
                if *m <= WEIGHT_TOL && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in weights.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let mut k = 0;
            while k < support.len() {
                if weights[k] <= WEIGHT_TOL {
                    support.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            if support.is_empty() {
                break;
            }
        }
        if support.is_empty() {
            // Numerical breakdown; fall back to the best single vertex.
            support = vec![start];
            weights = vec![1.0];
            x = points[start];
            break;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        x = support
            .iter()
            .zip(&weights)
            .fold(Vector3::zeros(), |acc, (&i, &w)| acc + points[i] * w);
    }

    MinNormPoint {
        point: x,
        support: support.into_iter().zip(weights).collect(),
    }
}

/// Barycentric weights of the minimum-norm point of the affine hull of
/// `points[support]`, or `None` when the support is affinely dependent.
fn affine_minimizer(points: &[Vector3<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    if k > 4 {
        return None;
    }
    let base = points[support[0]];
    let diffs: Vec<Vector3<f64>> = support[1..].iter().map(|&i| points[i] - base).collect();
    let m = k - 1;
    let gram = DMatrix::from_fn(m, m, |a, b| diffs[a].dot(&diffs[b]));
    let rhs = DVector::from_fn(m, |a, _| -diffs[a].dot(&base));
    let coeffs = gram.lu().solve(&rhs)?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let mut mu = Vec::with_capacity(k);
    mu.push(1.0 - coeffs.sum());
    mu.extend(coeffs.iter().copied());
    Some(mu)
}
