//! Per-path random streams.
//!
//! A stream is named by `(master_seed, path_index)`. The pair is hashed with
//! a splitmix64-style mixer into the seed of a xoshiro256++ generator, one
//! generator per purpose (Gaussian increments, bridge uniforms). Any path can
//! be regenerated on any worker without touching the others, so results do
//! not depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const GAUSSIAN_DOMAIN: u64 = 0x6761_7573_7369_616E;
const UNIFORM_DOMAIN: u64 = 0x756E_6966_6F72_6D73;

#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub path_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self {
            master_seed,
            path_index,
        }
    }

    fn key(&self, domain: u64) -> u64 {
        let m = mix64(self.master_seed.wrapping_add(GOLDEN));
        mix64(mix64(m ^ domain).wrapping_add(self.path_index.wrapping_mul(GOLDEN)))
    }

    pub fn gaussian(&self) -> GaussianSource {
        GaussianSource(Xoshiro256PlusPlus::seed_from_u64(self.key(GAUSSIAN_DOMAIN)))
    }

    pub fn uniforms(&self) -> UniformSource {
        UniformSource(Xoshiro256PlusPlus::seed_from_u64(self.key(UNIFORM_DOMAIN)))
    }

    /// A stream family unrelated to this one, for independent replicates
    /// (e.g. one per Monte Carlo horizon). The path index is kept.
    pub fn fork(&self, tag: u64) -> RngStream {
        RngStream {
            master_seed: mix64(self.master_seed ^ mix64(tag.wrapping_add(1).wrapping_mul(GOLDEN))),
            path_index: self.path_index,
        }
    }
}

/// Derives an independent master seed from `seed` and `tag`.
pub fn fork_seed(seed: u64, tag: u64) -> u64 {
    RngStream::new(seed, 0).fork(tag).master_seed
}

pub struct GaussianSource(Xoshiro256PlusPlus);

impl GaussianSource {
    #[inline]
    pub fn next(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }

    #[inline]
    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.next();
        }
    }
}

pub struct UniformSource(Xoshiro256PlusPlus);

impl UniformSource {
    /// Uniform on `(0, 1]`, a multiple of 2⁻⁵³.
    #[inline]
    pub fn next(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
