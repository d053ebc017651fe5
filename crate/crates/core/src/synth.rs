//! Deterministic synthetic event sequences for scalability and ablation runs.
//!
//! The generator is a pure function of [`SyntheticSpec`]. Every random draw
//! comes from one SplitMix64 stream (state = seed, reference outputs at
//! <https://prng.di.unimi.it/splitmix64.c>) and is mapped to a value with
//! integer arithmetic only, so the same spec yields the same corpus on every
//! platform. Per timestamp `t = 1..=num_timestamps` the draws are, in order:
//!
//! 1. the slot size: start at 1 and keep adding one item while
//!    `below(avg_items) != 0`, stopping at `min(max_items, alphabet_size)`
//!    (a geometric count with mean `avg_items` before clamping);
//! 2. that many distinct items, each `1 + below(alphabet_size)`, redrawing
//!    on collisions;
//! 3. when a query is planted, one draw `unit() < plant_rate` deciding whether
//!    `query[k]` is added at `t + k` for every `k` that stays in range.
//!
//! `below(n)` is `(next_u64() as u128 * n) >> 64` and `unit()` is
//! `(next_u64() >> 11) * 2^-53`.

use std::collections::BTreeSet;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::model::{Episode, EventId, EventSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_timestamps: u32,
    /// Events are drawn from `1..=alphabet_size`.
    pub alphabet_size: u32,
    pub avg_items: u32,
    pub max_items: u32,
    pub planted_query: Option<Episode>,
    pub plant_rate: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_timestamps == 0 || self.alphabet_size == 0 {
            return Err(Error::Config(
                "timestamps and alphabet size must be positive".into(),
            ));
        }
        if self.avg_items == 0 || self.avg_items > self.max_items {
            return Err(Error::Config(format!(
                "need 1 <= avg-items <= max-items, got {} and {}",
                self.avg_items, self.max_items
            )));
        }
        if !(0.0..=1.0).contains(&self.plant_rate) {
            return Err(Error::Config(format!(
                "plant rate must lie in [0, 1], got {}",
                self.plant_rate
            )));
        }
        Ok(())
    }
}

struct Draws(SplitMix64);

impl Draws {
    fn below(&mut self, n: u32) -> u32 {
        ((self.0.next_u64() as u128 * n as u128) >> 64) as u32
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<EventSequence> {
    spec.validate()?;
    let mut rng = Draws(SplitMix64::seed_from_u64(spec.seed));
    let n = spec.num_timestamps as usize;
    let cap = spec.max_items.min(spec.alphabet_size);
    let mut slots: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];

    for t in 0..n {
        let mut size = 1;
        while size < cap && rng.below(spec.avg_items) != 0 {
            size += 1;
        }
        let mut drawn = 0;
        while drawn < size {
            if slots[t].insert(1 + rng.below(spec.alphabet_size)) {
                drawn += 1;
            }
        }
        if let Some(query) = &spec.planted_query {
            if rng.unit() < spec.plant_rate {
                for (k, e) in query.events().iter().enumerate() {
                    if let Some(slot) = slots.get_mut(t + k) {
                        slot.insert(e.0);
                    }
                }
            }
        }
    }

    Ok(EventSequence::new(
        slots
            .into_iter()
            .map(|s| s.into_iter().map(EventId).collect())
            .collect(),
    ))
}
