use std::io::Write;
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Independent stream per fixture so that regenerating one file leaves the
/// others untouched.
pub fn rng_for(seed: u64, stream: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Shifts and scales to mean 0, population sd 1.
pub fn standardize(xs: &mut [f64]) {
    let m = mean(xs);
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    for x in xs.iter_mut() {
        *x = (*x - m) / sd;
    }
}

/// Removes the component of `xs` along each (centred) vector in `basis`,
/// then standardizes.
pub fn orthogonalize(xs: &mut [f64], basis: &[&[f64]]) {
    let m = mean(xs);
    xs.iter_mut().for_each(|x| *x -= m);
    for b in basis {
        let bm = mean(b);
        let bc: Vec<f64> = b.iter().map(|v| v - bm).collect();
        let dot: f64 = xs.iter().zip(&bc).map(|(x, v)| x * v).sum();
        let norm: f64 = bc.iter().map(|v| v * v).sum();
        xs.iter_mut().zip(&bc).for_each(|(x, v)| *x -= dot / norm * v);
    }
    standardize(xs);
}

pub fn shuffled<T: Clone>(items: &[T], rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn write_text(path: &Path, text: &str) {
    nomlab::io::write_file(path, text.as_bytes()).unwrap_or_else(|e| panic!("{e}"));
}

/// Gzip with a zeroed header timestamp so output bytes depend only on input.
pub fn write_gz(path: &Path, text: &str) {
    let mut enc = GzEncoder::new(Vec::new(), Compression::best());
    enc.write_all(text.as_bytes()).expect("in-memory write");
    let bytes = enc.finish().expect("in-memory write");
    nomlab::io::write_file(path, &bytes).unwrap_or_else(|e| panic!("{e}"));
}

/// Rounds to `digits` decimals.
pub fn round_to(x: f64, digits: i32) -> f64 {
    let f = 10f64.powi(digits);
    (x * f).round() / f
}
