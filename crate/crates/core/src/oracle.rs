//! Brute-force rule miner used as a correctness reference.
//!
//! Everything here is recomputed straight from the definitions: antecedent
//! occurrences are enumerated exhaustively, every consequent template present
//! after each end time is listed, and supports are counted by set
//! intersection. Nothing is shared with [`crate::mine`] beyond the predicates
//! in [`crate::model`]. Only practical on small inputs.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::model::{
    contains_subsequence, Episode, EpisodeRule, EventId, EventSequence, FixedGapEpisode,
    MiningParams, Timestamp,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_timestamps: usize,
    pub max_alphabet: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            max_timestamps: 40,
            max_alphabet: 8,
        }
    }
}

pub fn brute_force_mine(seq: &EventSequence, params: &MiningParams) -> Result<Vec<EpisodeRule>> {
    brute_force_mine_with(seq, params, OracleBounds::default())
}

pub fn brute_force_mine_with(
    seq: &EventSequence,
    params: &MiningParams,
    bounds: OracleBounds,
) -> Result<Vec<EpisodeRule>> {
    params.validate()?;
    if seq.len() > bounds.max_timestamps.min(64) {
        return Err(Error::OracleScale(format!(
            "{} timestamps, limit {}",
            seq.len(),
            bounds.max_timestamps.min(64)
        )));
    }
    if seq.alphabet_len() > bounds.max_alphabet {
        return Err(Error::OracleScale(format!(
            "{} distinct events, limit {}",
            seq.alphabet_len(),
            bounds.max_alphabet
        )));
    }
    if seq.is_empty() {
        return Ok(Vec::new());
    }

    let templates = consequent_templates(seq, params);
    let mut rules = Vec::new();
    for (antecedent, ends) in antecedent_end_times(seq, params.delta) {
        let sp = ends.len() as u64;
        if sp < params.min_sup {
            continue;
        }
        let end_mask = ends.iter().fold(0u64, |m, &t| m | bit(t));
        for ((elapse, events, gaps), mask) in &templates {
            let support = (mask & end_mask).count_ones() as u64;
            if support > 0 && params.min_conf.admits(support, sp) {
                rules.push(EpisodeRule {
                    antecedent: antecedent.clone(),
                    elapse: *elapse,
                    consequent: FixedGapEpisode::new(events.clone(), gaps.clone())?,
                    support,
                    antecedent_support: sp,
                });
            }
        }
    }
    rules.sort_unstable();
    Ok(rules)
}

fn bit(t: Timestamp) -> u64 {
    1u64 << (t - 1)
}

/// End times of every minimal occurrence with span `< delta`, for each episode
/// that has at least one.
fn antecedent_end_times(seq: &EventSequence, delta: u32) -> Vec<(Episode, Vec<Timestamp>)> {
    let alphabet: Vec<EventId> = seq.alphabet().collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<EventId>> = alphabet.iter().map(|&e| vec![e]).collect();
    while let Some(events) = stack.pop() {
        let mut latest_start: BTreeMap<Timestamp, Timestamp> = BTreeMap::new();
        for occ in bounded_occurrences(seq, &events, delta) {
            let (start, end) = (occ[0], occ[occ.len() - 1]);
            let s = latest_start.entry(end).or_insert(start);
            *s = (*s).max(start);
        }
        if latest_start.is_empty() {
            // No extension can have an occurrence either.
            continue;
        }
        if events.len() < seq.len() {
            for &e in &alphabet {
                let mut longer = events.clone();
                longer.push(e);
                stack.push(longer);
            }
        }
        out.push((
            Episode::new(events).expect("non-empty"),
            latest_start.into_keys().collect(),
        ));
    }
    out
}

/// Strictly increasing witnesses of `events` with `last - first < delta`.
fn bounded_occurrences(seq: &EventSequence, events: &[EventId], delta: u32) -> Vec<Vec<Timestamp>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(
        seq: &EventSequence,
        events: &[EventId],
        delta: u32,
        cur: &mut Vec<Timestamp>,
        out: &mut Vec<Vec<Timestamp>>,
    ) {
        if cur.len() == events.len() {
            out.push(cur.clone());
            return;
        }
        let from = cur.last().map_or(1, |&t| t + 1);
        for t in from..=seq.end_time() {
            if let Some(&start) = cur.first() {
                if t - start >= delta {
                    break;
                }
            }
            if seq.contains(t, events[cur.len()]) {
                cur.push(t);
                go(seq, events, delta, cur, out);
                cur.pop();
            }
        }
    }
    go(seq, events, delta, &mut cur, &mut out);
    out
}

type Template = (u32, Vec<EventId>, Vec<u32>);

/// Every query-containing consequent `(elapse, events, gaps)` that occurs
/// right after some timestamp `t`, mapped to the set of such `t` as a bitmask.
fn consequent_templates(seq: &EventSequence, params: &MiningParams) -> HashMap<Template, u64> {
    let mut out: HashMap<Template, u64> = HashMap::new();
    for t in 1..=seq.end_time() {
        let mut offsets = Vec::new();
        let mut events = Vec::new();
        collect(seq, params, t, 1, &mut offsets, &mut events, &mut out);
    }
    out
}

fn collect(
    seq: &EventSequence,
    params: &MiningParams,
    anchor: Timestamp,
    next_offset: u32,
    offsets: &mut Vec<u32>,
    events: &mut Vec<EventId>,
    out: &mut HashMap<Template, u64>,
) {
    if !events.is_empty() && contains_subsequence(events, params.query.events()) {
        let gaps = offsets.windows(2).map(|w| w[1] - w[0]).collect();
        *out.entry((offsets[0], events.clone(), gaps)).or_insert(0) |= bit(anchor);
    }
    for off in next_offset..=params.epsilon {
        for &e in seq.slot(anchor + off) {
            offsets.push(off);
            events.push(e);
            collect(seq, params, anchor, off + 1, offsets, events, out);
            offsets.pop();
            events.pop();
        }
    }
}

/// Number of antecedent minimal-occurrence end times `t` (span `< delta`) such
/// that the rule's consequent occurs at exactly `t + elapse` with its gaps.
pub fn rule_support(seq: &EventSequence, rule: &EpisodeRule, delta: u32) -> u64 {
    let mut ends: Vec<Timestamp> = bounded_occurrences(seq, rule.antecedent.events(), delta)
        .into_iter()
        .map(|occ| occ[occ.len() - 1])
        .collect();
    ends.sort_unstable();
    ends.dedup();
    let offsets: Vec<u32> = rule.consequent.offsets().collect();
    ends.into_iter()
        .filter(|&t| {
            rule.consequent
                .events()
                .iter()
                .zip(&offsets)
                .all(|(&e, &off)| seq.contains(t + rule.elapse + off, e))
        })
        .count() as u64
}
