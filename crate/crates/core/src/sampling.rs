//! Seeded random draws and low-discrepancy direction sets.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default number of sphere directions for a space of dimension `n`.
pub fn default_sphere_samples(n: usize) -> usize {
    match n {
        0 | 1 => 1,
        2 | 3 => 512,
        _ => 4096,
    }
}

/// Uniform on `[lo, hi]` in log space; both bounds must be positive.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.random::<f64>()).exp()
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// A nonzero Gaussian direction rescaled to a log-uniform Euclidean length.
pub fn scaled_vector<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let len = v.norm();
        if len > 1e-12 {
            let target = log_uniform(rng, lo, hi);
            return v * (target / len);
        }
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while k > 0 {
        out += f * (k % base) as f64;
        k /= base;
        f *= inv;
    }
    out
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn nth_prime(i: usize) -> u64 {
    if i < PRIMES.len() {
        return PRIMES[i];
    }
    let mut count = PRIMES.len();
    let mut c = PRIMES[PRIMES.len() - 1] + 2;
    loop {
        if (2..).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            if count == i {
                return c;
            }
            count += 1;
        }
        c += 2;
    }
}

/// Euclidean-unit directions covering the sphere of `R^n` up to sign.
///
/// The set is deterministic given `(n, count, seed)`: the coordinate axes come
/// first, followed by a seeded rotation of a low-discrepancy sequence
/// (evenly spaced half-circle angles for `n = 2`, a shifted Halton sequence
/// pushed through the normal quantile for `n >= 3`). Antipodal points are not
/// distinguished because every ratio sampled on the sphere is even.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![DVector::from_element(1, 1.0)];
    }
    let count = count.max(n);
    let mut out: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    let rest = count - n;
    let mut r = rng(seed);
    if n == 2 {
        let shift: f64 = r.random();
        for k in 0..rest {
            let theta = std::f64::consts::PI * (k as f64 + shift) / rest as f64;
            out.push(DVector::from_vec(vec![theta.cos(), theta.sin()]));
        }
        return out;
    }
    let normal = Normal::standard();
    let shifts: Vec<f64> = (0..n).map(|_| r.random()).collect();
    let mut k = 1u64;
    while out.len() < count {
        let v = DVector::from_fn(n, |j, _| {
            let u = (radical_inverse(k, nth_prime(j)) + shifts[j]).fract();
            normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
        });
        k += 1;
        let len = v.norm();
        if len > 1e-12 {
            out.push(v / len);
        }
    }
    out
}
