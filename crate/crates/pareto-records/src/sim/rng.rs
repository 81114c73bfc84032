//! Reproducible per-trial random streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontier::Point;

/// Stable mix of (master seed, trial index) into a per-trial stream seed:
/// the trial-th output of a splitmix64 generator seeded with the master.
/// Consecutive trial indices land far apart, so trials never share a stream.
pub fn mix_seed(master_seed: u64, trial: u64) -> u64 {
    let mut z = master_seed.wrapping_add((trial.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream for one trial.
pub fn trial_rng(stream_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed)
}

/// A 53-bit-mantissa uniform strictly inside (0, 1); exact 0 is rejected and
/// exact 1 is unreachable.
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    loop {
        let mantissa = rng.next_u64() >> 11;
        if mantissa != 0 {
            return mantissa as f64 * (1.0 / (1u64 << 53) as f64);
        }
    }
}

/// A uniform point of the open unit square.
pub fn sample_point(rng: &mut impl RngCore) -> Point {
    let x = open_unit(rng);
    let y = open_unit(rng);
    Point::new(x, y).expect("open-interval uniforms are always valid coordinates")
}
