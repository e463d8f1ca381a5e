//! The standard run used by the CLI defaults, the acceptance suite and the
//! benches: `j = (1, 2, 3)`, `lambda = lambda' = 1`, `T = 10`, `h = 1e-3`,
//! and a leaf state drawn from a fixed seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::integrals::{sample_leaf_state, BodyState};
use crate::params::SystemParams;

pub const STANDARD_J: [f64; 3] = [1.0, 2.0, 3.0];
pub const STANDARD_T: f64 = 10.0;
pub const STANDARD_H: f64 = 1e-3;
pub const STANDARD_SEED: u64 = 1;
/// Radius of the ball `K` is drawn from before projection.
pub const STANDARD_K_RADIUS: f64 = 1.0;

pub fn standard_params() -> SystemParams {
    SystemParams::new(STANDARD_J, 1.0, 1.0).expect("valid constants")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First leaf state of the seeded stream.
pub fn seeded_state(seed: u64) -> BodyState {
    sample_leaf_state(&mut rng(seed), STANDARD_K_RADIUS)
}

pub fn standard_state() -> BodyState {
    seeded_state(STANDARD_SEED)
}

/// `n` leaf states from one seeded stream.
pub fn leaf_states(n: usize, seed: u64, k_radius: f64) -> Vec<BodyState> {
    let mut r = rng(seed);
    (0..n).map(|_| sample_leaf_state(&mut r, k_radius)).collect()
}
