#![allow(dead_code)]

use framekit::frame::random_orthogonal;
use framekit::{FrameMatrix, SeedVector};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform direction, norm uniform in `(0, max_norm)`.
pub fn random_seed(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> SeedVector {
    loop {
        let g = gaussian_vector(rng, n);
        let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r: f64 = rng.gen_range(0.0..max_norm);
        if len > 1e-12 && r > 0.0 {
            return SeedVector::new(g.iter().map(|x| x * r / len).collect()).unwrap();
        }
    }
}

/// Gaussian columns, each normalized.
pub fn random_unit_frame(rng: &mut ChaCha8Rng, n: usize, count: usize) -> FrameMatrix {
    let cols: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let g = gaussian_vector(rng, n);
            let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            g.iter().map(|x| x / len).collect()
        })
        .collect();
    FrameMatrix::from_columns(&cols).unwrap()
}

/// A random orthogonal map, possibly improper.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let mut q = random_orthogonal(n, rng.gen());
    if rng.gen_bool(0.5) {
        q.row_mut(0).neg_mut();
    }
    q
}

pub fn random_signs(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Rotates `v` by `angle` towards a random direction orthogonal to it.
pub fn rotate_away(rng: &mut ChaCha8Rng, v: &[f64], angle: f64) -> Vec<f64> {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = v.iter().map(|x| x / len).collect();
    let mut p = gaussian_vector(rng, v.len());
    let dot: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
    p.iter_mut().zip(&u).for_each(|(a, b)| *a -= dot * b);
    let plen = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter()
        .zip(&p)
        .map(|(a, b)| len * (a * angle.cos() + b / plen * angle.sin()))
        .collect()
}
