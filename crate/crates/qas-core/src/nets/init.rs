//! Deterministic parameter initialization from a seeded RNG stream.

use rand::RngExt;

/// Box–Muller normal sample.
pub fn normal<R: RngExt + ?Sized>(rng: &mut R, mean: f64, std: f64) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    mean + std * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform in `±sqrt(6/(n_in+n_out))`.
pub fn xavier_uniform<R: RngExt + ?Sized>(rng: &mut R, n_in: usize, n_out: usize) -> f64 {
    let bound = (6.0 / (n_in + n_out) as f64).sqrt();
    rng.random_range(-bound..bound)
}
