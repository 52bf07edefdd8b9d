//! Seeded random draws for multistart solvers.
//!
//! ChaCha8 keyed by a caller seed; every sampler below consumes a fixed,
//! platform-independent number of stream words per draw so runs are
//! bit-reproducible for a fixed seed.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Draw {
    rng: ChaCha8Rng,
}

impl Draw {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream, e.g. one per sweep direction.
    pub fn derived(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-r, r].
    pub fn symmetric(&mut self, r: f64) -> f64 {
        (2.0 * self.unit() - 1.0) * r
    }

    /// Uniform in the complex disk of radius `r`, returned as (re, im).
    pub fn disk(&mut self, r: f64) -> (f64, f64) {
        let rad = r * libm::sqrt(self.unit());
        let phi = 2.0 * core::f64::consts::PI * self.unit();
        (rad * libm::cos(phi), rad * libm::sin(phi))
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.unit().max(1e-300);
        let u2 = self.unit();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform direction on S^{d-1}.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
            let n = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if n > 1e-8 {
                return v.iter().map(|x| x / n).collect();
            }
        }
    }
}
