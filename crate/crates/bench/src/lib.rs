//! Fixtures for the round-scaling benchmark.

use mapsel_core::model::populate_fleet;
use mapsel_core::{run_round, SimConfig, SimState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fleet sizes the benchmark sweeps.
pub const FLEET_SIZES: [usize; 4] = [100, 200, 400, 800];

/// Rounds run before measuring so trust, incumbency and attachments settle.
pub const WARMUP_ROUNDS: u64 = 3;

/// A state with exactly `n` honest vehicles after the warm-up rounds, plus
/// the RNG to keep driving it with.
pub fn warmed_state(n: usize, seed: u64) -> (SimState, ChaCha8Rng) {
    let cfg = SimConfig {
        sybil_fraction: 0.0,
        rng_seed: seed,
        ..SimConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fleet = populate_fleet(n, &cfg, &mut rng);
    let mut state = SimState::new(cfg, fleet);
    for round in 0..WARMUP_ROUNDS {
        run_round(&mut state, round, &mut rng).expect("warm-up round");
    }
    (state, rng)
}
