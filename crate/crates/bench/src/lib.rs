//! Shared corpora and parameters for the mining benchmarks.

use episode_rules::{
    generate_synthetic, Episode, EventSequence, MinConf, MiningParams, Strategies, SyntheticSpec,
};

pub const QUERY: [u32; 2] = [1, 2];

/// Planted synthetic corpus with `num_timestamps` slots over 100 events.
pub fn corpus(num_timestamps: u32) -> EventSequence {
    generate_synthetic(&SyntheticSpec {
        num_timestamps,
        alphabet_size: 100,
        avg_items: 5,
        max_items: 50,
        planted_query: Some(Episode::of(&QUERY)),
        plant_rate: 0.05,
        seed: 7,
    })
    .expect("valid spec")
}

/// Support threshold scaled with corpus length.
pub fn params(num_timestamps: u32, strategies: Strategies) -> MiningParams {
    MiningParams {
        query: Episode::of(&QUERY),
        min_sup: u64::from(num_timestamps / 50).max(1),
        min_conf: MinConf::new(1, 25).expect("valid"),
        delta: 3,
        epsilon: 5,
        strategies,
    }
}
