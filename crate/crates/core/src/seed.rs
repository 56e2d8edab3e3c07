//! Deterministic seed derivation.
//!
//! Every independent job (landscape generation, one hill-climbing run) owns a
//! private RNG whose seed is derived from the experiment's base seed and the
//! job's coordinates. The derivation is a fold of SplitMix64 finalisers:
//!
//! ```text
//! h0 = splitmix64(base)
//! h_{i+1} = splitmix64(h_i ^ splitmix64(coord_i + 0x9E3779B97F4A7C15 * (i + 1)))
//! ```
//!
//! so results depend only on what a job *is*, never on when or where it ran.

use rand::SeedableRng;

use crate::SimRng;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a list of job coordinates.
pub fn mix_seed(base: u64, coords: &[u64]) -> u64 {
    coords.iter().enumerate().fold(splitmix64(base), |h, (i, &c)| {
        let salt = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i as u64 + 1);
        splitmix64(h ^ splitmix64(c.wrapping_add(salt)))
    })
}

pub fn rng_for(base: u64, coords: &[u64]) -> SimRng {
    SimRng::seed_from_u64(mix_seed(base, coords))
}
