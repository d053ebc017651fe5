//! End-to-end mining: query index, frequent antecedents, one consequent tree
//! per antecedent, then the query-containment filter.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meo::mine_frequent_meo;
use crate::model::{
    contains_subsequence, Episode, EpisodeRule, EventSequence, MiningParams, Strategies,
};
use crate::qe_index::{build_qe_index, filter_end_times};
use crate::tree::{mining_feo, SearchBounds, TreeConfig};

/// Counters for one run. Serialized as a flat JSON object in field order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MiningStats {
    pub antecedents_mined: u64,
    pub antecedents_surviving_pbps: u64,
    #[serde(rename = "candidates")]
    pub candidates_emitted: u64,
    #[serde(rename = "rules")]
    pub rules_final: u64,
    /// Antecedent end times outside every pre-expansion window.
    pub pruned_by_pbps: u64,
    /// Frequent root children refused past the maximum search distance.
    pub pruned_by_dbps: u64,
    /// Tree nodes deactivated.
    pub pruned_by_nbps: u64,
    /// Candidate emissions suppressed for being shorter than the query.
    pub pruned_by_lbps: u64,
    pub wall_time_ms: f64,
    pub strategy_mask: Strategies,
    /// Set when some query event never occurs in the sequence.
    pub query_absent: bool,
}

impl MiningStats {
    fn merge(&mut self, other: &MiningStats) {
        self.antecedents_mined += other.antecedents_mined;
        self.antecedents_surviving_pbps += other.antecedents_surviving_pbps;
        self.candidates_emitted += other.candidates_emitted;
        self.pruned_by_pbps += other.pruned_by_pbps;
        self.pruned_by_dbps += other.pruned_by_dbps;
        self.pruned_by_nbps += other.pruned_by_nbps;
        self.pruned_by_lbps += other.pruned_by_lbps;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult {
    /// Canonical order, no duplicates.
    pub rules: Vec<EpisodeRule>,
    pub stats: MiningStats,
}

/// Mines every valid rule of `seq` under `params`.
///
/// The rule set does not depend on `params.strategies`; only the amount of
/// work and the candidate counts do. Runs on the current rayon pool.
pub fn mine(seq: &EventSequence, params: &MiningParams) -> Result<MiningResult> {
    params.validate()?;
    if seq.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot mine an empty sequence".into(),
        ));
    }
    let started = Instant::now();
    let strategies = params.strategies;
    let mut stats = MiningStats {
        strategy_mask: strategies,
        ..MiningStats::default()
    };

    if !params.query.events().iter().all(|&e| seq.has_event(e)) {
        stats.query_absent = true;
        stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        return Ok(MiningResult {
            rules: Vec::new(),
            stats,
        });
    }

    let index = strategies
        .window_filter()
        .then(|| build_qe_index(seq, &params.query, params.epsilon));
    let antecedents = mine_frequent_meo(seq, params.min_sup, params.delta);

    let per_antecedent: Vec<(Vec<EpisodeRule>, MiningStats)> = antecedents
        .par_iter()
        .map(|rec| {
            let mut local = MiningStats {
                antecedents_mined: 1,
                ..MiningStats::default()
            };
            let end_times = rec.end_times();
            let (kept, bounds) = match &index {
                Some(index) => {
                    let f = filter_end_times(&end_times, index);
                    local.pruned_by_pbps = (end_times.len() - f.kept.len()) as u64;
                    match (f.max_first, f.max_last) {
                        (Some(max_first), Some(max_last)) => (
                            f.kept,
                            SearchBounds {
                                max_first,
                                max_last,
                            },
                        ),
                        _ => return (Vec::new(), local),
                    }
                }
                None => (
                    end_times,
                    SearchBounds {
                        max_first: params.epsilon,
                        max_last: params.epsilon,
                    },
                ),
            };
            local.antecedents_surviving_pbps = 1;

            let tree = mining_feo(
                seq,
                rec,
                &kept,
                TreeConfig {
                    query: &params.query,
                    min_conf: params.min_conf,
                    epsilon: params.epsilon,
                    strategies,
                    bounds,
                },
            );
            local.candidates_emitted = tree.stats.candidates;
            local.pruned_by_dbps = tree.stats.pruned_by_distance;
            local.pruned_by_nbps = tree.stats.deactivated;
            local.pruned_by_lbps = tree.stats.pruned_by_length;
            let candidates = tree.emitted.into_iter().map(|(rule, _)| rule).collect();
            (target_filter(candidates, &params.query), local)
        })
        .collect();

    let mut rules = Vec::new();
    for (mut found, local) in per_antecedent {
        rules.append(&mut found);
        stats.merge(&local);
    }
    rules.sort_unstable();
    rules.dedup();
    stats.rules_final = rules.len() as u64;
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(MiningResult { rules, stats })
}

/// Keeps the rules whose consequent contains `query` as a subsequence.
pub fn target_filter(candidates: Vec<EpisodeRule>, query: &Episode) -> Vec<EpisodeRule> {
    candidates
        .into_iter()
        .filter(|r| contains_subsequence(r.consequent.events(), query.events()))
        .collect()
}
