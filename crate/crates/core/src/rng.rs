//! Seeded random streams.
//!
//! Every consumer draws from ChaCha20 seeded with the run's 64-bit seed, on a
//! stream chosen by a fixed label: `stream = FNV-1a-64(label)`. Two consumers
//! with different labels never share a stream, and adding a consumer never
//! shifts the numbers another one sees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::grassmann::{make_stiefel, HorizontalTangent, StiefelPoint};
use crate::linalg::Mat;

pub type StreamRng = ChaCha20Rng;

pub fn label_id(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, label: &str) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(label_id(label));
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    // Column-major fill keeps the draw order independent of nalgebra internals.
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Mat::from_vec(rows, cols, data)
}

pub fn uniform_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Mat {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect();
    Mat::from_vec(rows, cols, data)
}

/// Orthonormalized Gaussian matrix; uniformly distributed on Gr(n, p).
pub fn random_stiefel<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> StiefelPoint {
    loop {
        if let Ok(u) = make_stiefel(gaussian_matrix(rng, n, p)) {
            return u;
        }
    }
}

/// Gaussian horizontal tangent at `u`, scaled to Frobenius norm `norm`.
pub fn random_tangent<R: Rng + ?Sized>(
    rng: &mut R,
    u: &StiefelPoint,
    norm: f64,
) -> HorizontalTangent {
    let g = gaussian_matrix(rng, u.n(), u.p());
    let t = HorizontalTangent::project(u, &g);
    let len = t.norm();
    t.scaled(norm / len)
}
