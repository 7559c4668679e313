//! Seeded random sampling helpers.
//!
//! Every randomized stage derives its generator from a `u64` seed through
//! [`rng`] (or [`stream_rng`] for per-item substreams), so identical seeds
//! reproduce identical outputs across runs, platforms and thread counts.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Quaternion, Vec3};

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `index` of a seed, for per-scene or per-item
/// randomness that must not depend on processing order.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Uniform random rotation (Shoemake's subgroup algorithm).
pub fn uniform_quaternion<R: Rng>(r: &mut R) -> Quaternion {
    let u1: f64 = r.gen();
    let u2: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let u3: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    Quaternion {
        w: a * u2.sin(),
        x: a * u2.cos(),
        y: b * u3.sin(),
        z: b * u3.cos(),
    }
    .normalized()
}

/// Uniform random direction on the unit sphere.
pub fn uniform_unit_vector<R: Rng>(r: &mut R) -> Vec3 {
    let z: f64 = r.gen_range(-1.0..=1.0);
    let phi: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Rotation at most `max_angle` radians away from identity, uniform in the
/// axis and in the angle (not Haar-uniform; fine for perturbation tests).
pub fn small_rotation<R: Rng>(r: &mut R, max_angle: f64) -> Quaternion {
    let axis = uniform_unit_vector(r);
    let angle = r.gen_range(0.0..=max_angle);
    Quaternion::from_axis_angle(axis, angle)
}
