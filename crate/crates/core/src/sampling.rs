//! Seeded sampling: a scrambled Halton sequence for sign checks in `[0,1]^n`
//! and the PRNG used everywhere else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the PRNG algorithm, recorded alongside seeded outputs.
pub const PRNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Halton sequence with a seeded Cranley-Patterson rotation.
#[derive(Debug, Clone)]
pub struct QuasiRandom {
    bases: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
}

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let shift = (0..dim).map(|_| r.random::<f64>()).collect();
        Self { bases: first_primes(dim), shift, index: 0 }
    }

    /// Next point of the sequence mapped affinely onto `[lo, hi]^dim`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> Vec<f64> {
        self.index += 1;
        self.bases
            .iter()
            .zip(&self.shift)
            .map(|(&b, &s)| {
                let u = (radical_inverse(self.index, b) + s).fract();
                lo + (hi - lo) * u
            })
            .collect()
    }
}
