//! Episode occurrences, minimal occurrences and frequent antecedent mining.
//!
//! The support of an episode is the number of distinct end times at which it
//! has an occurrence of span `< delta`; for each such end time the minimal
//! occurrence is the one with the latest start.
//!
//! Frequent episodes are grown by *prepending* events. Every end time of
//! `x·γ` is also an end time of `γ` (drop the first witness), with a later
//! start and therefore a smaller span, so `sp(x·γ) <= sp(γ)` and growing only
//! frequent episodes loses nothing. Appending has no such bound.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    Episode, EventId, EventSequence, FixedGapEpisode, MinimalOccurrence, Occurrence, Timestamp,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalOccurrenceRecord {
    pub episode: Episode,
    /// Ascending by end; one entry per end time.
    pub mo_set: Vec<MinimalOccurrence>,
}

impl MinimalOccurrenceRecord {
    pub fn support(&self) -> u64 {
        self.mo_set.len() as u64
    }

    pub fn end_times(&self) -> Vec<Timestamp> {
        self.mo_set.iter().map(|mo| mo.end).collect()
    }
}

/// Every strictly increasing witness of `episode`. Exhaustive and exponential
/// in the worst case; `cap` bounds the result size.
pub fn occurrences(
    seq: &EventSequence,
    episode: &Episode,
    cap: Option<usize>,
) -> Result<Vec<Occurrence>> {
    fn walk(
        seq: &EventSequence,
        events: &[EventId],
        after: Timestamp,
        prefix: &mut Vec<Timestamp>,
        out: &mut Vec<Occurrence>,
        cap: usize,
    ) -> bool {
        let Some((&head, rest)) = events.split_first() else {
            if out.len() == cap {
                return false;
            }
            out.push(Occurrence::new(prefix.clone()).expect("increasing by construction"));
            return true;
        };
        for &t in seq.column(head).iter().filter(|&&t| t > after) {
            prefix.push(t);
            let ok = walk(seq, rest, t, prefix, out, cap);
            prefix.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    let mut out = Vec::new();
    let limit = cap.unwrap_or(usize::MAX);
    if !walk(seq, episode.events(), 0, &mut Vec::new(), &mut out, limit) {
        return Err(Error::EnumerationCap {
            episode: episode.to_string(),
            cap: limit,
        });
    }
    Ok(out)
}

/// Occurrences of a fixed-gap episode, i.e. every start `t` at which each
/// event sits at its fixed offset.
pub fn fixed_gap_occurrences(seq: &EventSequence, fge: &FixedGapEpisode) -> Vec<Occurrence> {
    let offsets: Vec<u32> = fge.offsets().collect();
    seq.column(fge.events()[0])
        .iter()
        .filter(|&&t| {
            fge.events()
                .iter()
                .zip(&offsets)
                .all(|(&e, &off)| seq.contains(t + off, e))
        })
        .map(|&t| {
            Occurrence::new(offsets.iter().map(|off| t + off).collect()).expect("gaps are positive")
        })
        .collect()
}

/// Minimal occurrences of `episode` with span `< delta`.
pub fn minimal_occurrences(
    seq: &EventSequence,
    episode: &Episode,
    delta: u32,
) -> MinimalOccurrenceRecord {
    let events = episode.events();
    let (last, init) = events.split_last().expect("episode is non-empty");
    let mut mo_set = Vec::new();
    for &end in seq.column(*last) {
        // Latest possible position for each earlier event, right to left.
        let mut cursor = Some(end);
        for &e in init.iter().rev() {
            cursor = cursor.and_then(|c| latest_before(seq.column(e), c));
        }
        if let Some(start) = cursor {
            if end - start < delta {
                mo_set.push(MinimalOccurrence { start, end });
            }
        }
    }
    MinimalOccurrenceRecord {
        episode: episode.clone(),
        mo_set,
    }
}

fn latest_before(column: &[Timestamp], t: Timestamp) -> Option<Timestamp> {
    let idx = column.partition_point(|&u| u < t);
    idx.checked_sub(1).map(|k| column[k])
}

/// All episodes with at least `min_sup` minimal occurrences of span `< delta`,
/// ordered by length and then lexicographically.
pub fn mine_frequent_meo(
    seq: &EventSequence,
    min_sup: u64,
    delta: u32,
) -> Vec<MinimalOccurrenceRecord> {
    let min_sup = min_sup.max(1);
    let mut level: Vec<MinimalOccurrenceRecord> = seq
        .alphabet()
        .filter(|&e| seq.column(e).len() as u64 >= min_sup)
        .map(|e| MinimalOccurrenceRecord {
            episode: Episode::from_vec_unchecked(vec![e]),
            mo_set: seq
                .column(e)
                .iter()
                .map(|&t| MinimalOccurrence { start: t, end: t })
                .collect(),
        })
        .collect();

    let mut out = Vec::new();
    while !level.is_empty() {
        let mut next: Vec<MinimalOccurrenceRecord> = level
            .par_iter()
            .flat_map_iter(|rec| prepend_extensions(seq, rec, min_sup, delta))
            .collect();
        next.sort_unstable_by(|a, b| a.episode.cmp(&b.episode));
        out.append(&mut level);
        level = next;
    }
    out
}

/// Frequent `x·γ` for every event `x`, built from `γ`'s minimal occurrences.
///
/// For an entry `[s, t]` of `γ`, the latest start of `x·γ` ending at `t` is the
/// latest `x` strictly before `s`, because `s` is already the latest start of
/// `γ` at `t`.
fn prepend_extensions(
    seq: &EventSequence,
    rec: &MinimalOccurrenceRecord,
    min_sup: u64,
    delta: u32,
) -> Vec<MinimalOccurrenceRecord> {
    let mut children: BTreeMap<EventId, Vec<MinimalOccurrence>> = BTreeMap::new();
    let mut seen: Vec<EventId> = Vec::new();
    for mo in &rec.mo_set {
        seen.clear();
        // u ranges over (end - delta, start), latest first.
        let lowest = (mo.end + 1).saturating_sub(delta).max(1);
        for u in (lowest..mo.start).rev() {
            for &x in seq.slot(u) {
                if !seen.contains(&x) {
                    seen.push(x);
                    children.entry(x).or_default().push(MinimalOccurrence {
                        start: u,
                        end: mo.end,
                    });
                }
            }
        }
    }
    children
        .into_iter()
        .filter(|(_, mos)| mos.len() as u64 >= min_sup)
        .map(|(x, mo_set)| {
            let mut events = Vec::with_capacity(rec.episode.len() + 1);
            events.push(x);
            events.extend_from_slice(rec.episode.events());
            MinimalOccurrenceRecord {
                episode: Episode::from_vec_unchecked(events),
                mo_set,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example;

    // A=1 B=2 C=3 D=4 E=5 F=6
    fn times(occs: &[Occurrence]) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = occs.iter().map(|o| o.times().to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn occurrence_examples() {
        let seq = example();
        assert_eq!(
            times(&occurrences(&seq, &Episode::of(&[5, 6, 4]), None).unwrap()),
            vec![vec![7, 10, 11], vec![8, 10, 11], vec![9, 10, 11]]
        );
        assert_eq!(
            times(&occurrences(&seq, &Episode::of(&[1]), None).unwrap()),
            vec![vec![3], vec![4], vec![6], vec![10], vec![11]]
        );
        assert!(occurrences(&seq, &Episode::of(&[3, 3]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn occurrence_cap() {
        let seq = example();
        let err = occurrences(&seq, &Episode::of(&[5, 6, 4]), Some(2)).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { cap: 2, .. }));
        assert!(err.to_string().contains("<5,6,4>"));
        assert_eq!(
            occurrences(&seq, &Episode::of(&[5, 6, 4]), Some(3))
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn fixed_gap_examples() {
        let seq = example();
        let ef = FixedGapEpisode::new(vec![EventId(5), EventId(6)], vec![3]).unwrap();
        assert_eq!(
            times(&fixed_gap_occurrences(&seq, &ef)),
            vec![vec![7, 10], vec![9, 12]]
        );

        // Starts at 1 and 3 both have D, but A is absent at 5, so [3,5,6] is not a witness.
        let dab =
            FixedGapEpisode::new(vec![EventId(4), EventId(1), EventId(2)], vec![2, 1]).unwrap();
        let brute: Vec<Vec<u32>> = (1..=seq.end_time())
            .map(|t| vec![t, t + 2, t + 3])
            .filter(|v| {
                v.iter()
                    .zip([4u32, 1, 2])
                    .all(|(&t, e)| seq.contains(t, EventId(e)))
            })
            .collect();
        assert_eq!(brute, vec![vec![1, 3, 4]]);
        assert_eq!(times(&fixed_gap_occurrences(&seq, &dab)), brute);

        let a = FixedGapEpisode::new(vec![EventId(1)], vec![]).unwrap();
        assert_eq!(
            times(&fixed_gap_occurrences(&seq, &a)),
            vec![vec![3], vec![4], vec![6], vec![10], vec![11]]
        );
    }

    #[test]
    fn minimal_occurrence_examples() {
        let seq = example();
        let rec = minimal_occurrences(&seq, &Episode::of(&[5, 6, 4]), u32::MAX);
        assert_eq!(rec.mo_set, vec![MinimalOccurrence { start: 9, end: 11 }]);

        let rec = minimal_occurrences(&seq, &Episode::of(&[1]), 2);
        assert_eq!(rec.end_times(), vec![3, 4, 6, 10, 11]);

        let rec = minimal_occurrences(&seq, &Episode::of(&[1, 2]), 2);
        assert_eq!(
            rec.mo_set,
            vec![
                MinimalOccurrence { start: 3, end: 4 },
                MinimalOccurrence { start: 6, end: 7 }
            ]
        );
        assert_eq!(rec.support(), 2);
    }

    #[test]
    fn frequent_meo_examples() {
        let seq = example();
        let recs = mine_frequent_meo(&seq, 5, 2);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].episode, Episode::of(&[1]));
        assert_eq!(recs[0].end_times(), vec![3, 4, 6, 10, 11]);

        assert!(mine_frequent_meo(&seq, seq.len() as u64 + 1, 3).is_empty());

        let recs = mine_frequent_meo(&seq, 2, 2);
        let ab = recs
            .iter()
            .find(|r| r.episode == Episode::of(&[1, 2]))
            .unwrap();
        assert_eq!(ab.end_times(), vec![4, 7]);
        // Canonical order: length first, then lexicographic.
        assert!(recs
            .windows(2)
            .all(|w| (w[0].episode.len(), &w[0].episode) < (w[1].episode.len(), &w[1].episode)));
    }

    #[test]
    fn delta_one_yields_single_events_only() {
        let recs = mine_frequent_meo(&example(), 1, 1);
        assert!(recs.iter().all(|r| r.episode.len() == 1));
        assert_eq!(recs.len(), 6);
    }

    /// Def-level reference: enumerate every occurrence, keep the latest start
    /// per end time, then drop spans >= delta.
    fn reference_record(seq: &EventSequence, ep: &Episode, delta: u32) -> Vec<MinimalOccurrence> {
        let mut best: BTreeMap<u32, u32> = BTreeMap::new();
        for occ in occurrences(seq, ep, None).unwrap() {
            let e = best.entry(occ.end()).or_insert(occ.start());
            *e = (*e).max(occ.start());
        }
        best.into_iter()
            .filter(|&(end, start)| end - start < delta)
            .map(|(end, start)| MinimalOccurrence { start, end })
            .collect()
    }

    fn all_episodes(alphabet: u32, max_len: usize) -> Vec<Episode> {
        let mut out: Vec<Vec<u32>> = (0..alphabet).map(|e| vec![e]).collect();
        let mut frontier = out.clone();
        for _ in 1..max_len {
            frontier = frontier
                .iter()
                .flat_map(|p| {
                    (0..alphabet).map(move |e| {
                        let mut q = p.clone();
                        q.push(e);
                        q
                    })
                })
                .collect();
            out.extend(frontier.iter().cloned());
        }
        out.into_iter().map(|v| Episode::of(&v)).collect()
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_seq() -> impl Strategy<Value = EventSequence> {
            prop::collection::vec(prop::collection::vec(0u32..4, 0..3), 1..=20)
                .prop_map(EventSequence::from_ids)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mining_matches_exhaustive_enumeration(seq in small_seq(), min_sup in 1u64..4, delta in 1u32..5) {
                let mined: Vec<(Episode, Vec<MinimalOccurrence>)> = mine_frequent_meo(&seq, min_sup, delta)
                    .into_iter()
                    .map(|r| (r.episode, r.mo_set))
                    .collect();
                let mut expected = Vec::new();
                for ep in all_episodes(4, delta as usize) {
                    let mos = reference_record(&seq, &ep, delta);
                    if mos.len() as u64 >= min_sup {
                        expected.push((ep, mos));
                    }
                }
                expected.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
                prop_assert_eq!(mined, expected);
            }

            #[test]
            fn record_invariants(seq in small_seq(), delta in 1u32..5) {
                for rec in mine_frequent_meo(&seq, 1, delta) {
                    prop_assert!(rec.mo_set.windows(2).all(|w| w[0].end < w[1].end));
                    prop_assert!(rec.mo_set.iter().all(|mo| mo.span() < delta));
                    prop_assert_eq!(&rec.mo_set, &minimal_occurrences(&seq, &rec.episode, delta).mo_set);
                }
            }
        }
    }
}
