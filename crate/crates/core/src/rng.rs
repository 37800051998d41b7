//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, domain, index)`: the pair `(seed,
//! domain)` keys a ChaCha generator and `index` selects its stream, so the
//! value for a given index never depends on evaluation order or thread count.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Pole samples for the Crofton estimator.
pub const DOMAIN_CROFTON: u64 = 0x43524f46;
/// Random spherical curves.
pub const DOMAIN_CURVES: u64 = 0x43555256;
/// Random boundary loops for the minimal disk solver.
pub const DOMAIN_BOUNDARIES: u64 = 0x424e4459;
/// Random mesh perturbations.
pub const DOMAIN_MESH: u64 = 0x4d455348;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// The generator for sample `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let key = mix64(seed ^ mix64(domain.wrapping_add(0x9E3779B97F4A7C15)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Uniform direction on the unit sphere from a normalized Gaussian triple.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// `n` roughly equidistributed directions on the unit sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        Vector3::new(rho * phi.cos(), rho * phi.sin(), z)
    })
}
