//! Positions of the query episode and the antecedent windows derived from them.
//!
//! A rule whose consequent contains the query has, for each of its
//! occurrences, an embedding of the query starting at `first` and ending at
//! `last` with `last - first <= epsilon`. The antecedent must end at some
//! `t` with `last - epsilon <= t < first`, so every antecedent end time
//! outside all such windows can be dropped before building its tree.

use crate::model::{Episode, EventSequence, Timestamp};

/// First and last times of one embedding of the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QeOccurrence {
    pub first_time: Timestamp,
    pub last_time: Timestamp,
}

/// Half-open range `[lo, hi)` of antecedent end times compatible with `source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AntecedentWindow {
    pub lo: Timestamp,
    pub hi: Timestamp,
    pub source: QeOccurrence,
}

impl AntecedentWindow {
    /// `None` when the clamped range is empty.
    pub fn for_occurrence(source: QeOccurrence, epsilon: u32) -> Option<Self> {
        let lo = source.last_time.saturating_sub(epsilon).max(1);
        let hi = source.first_time;
        (lo < hi).then_some(AntecedentWindow { lo, hi, source })
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.lo <= t && t < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QeIndex {
    qe: Episode,
    epsilon: u32,
    occurrences: Vec<QeOccurrence>,
    windows: Vec<AntecedentWindow>,
}

/// Result of intersecting antecedent end times with the index windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndTimeFilter {
    pub kept: Vec<Timestamp>,
    /// Largest distance from a kept end time to the first query event of a
    /// window containing it.
    pub max_first: Option<u32>,
    /// Same, to the last query event.
    pub max_last: Option<u32>,
}

impl QeIndex {
    pub fn qe(&self) -> &Episode {
        &self.qe
    }

    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }

    /// Ascending by `(first_time, last_time)`.
    pub fn occurrences(&self) -> &[QeOccurrence] {
        &self.occurrences
    }

    /// Ascending by `lo`.
    pub fn windows(&self) -> &[AntecedentWindow] {
        &self.windows
    }
}

/// Every `(first, last)` pair of a query embedding with `last - first <= epsilon`,
/// and the windows they induce.
pub fn build_qe_index(seq: &EventSequence, qe: &Episode, epsilon: u32) -> QeIndex {
    let events = qe.events();
    let mut occurrences = Vec::new();
    for &first in seq.column(events[0]) {
        let horizon = first.saturating_add(epsilon);
        if events.len() == 1 {
            occurrences.push(QeOccurrence {
                first_time: first,
                last_time: first,
            });
            continue;
        }
        // Leftmost placement of the interior events leaves the most room for
        // the last one; any later last-event time then also completes an
        // embedding.
        let mut cursor = first;
        let mut placed = true;
        for &e in &events[1..events.len() - 1] {
            match next_after(seq.column(e), cursor) {
                Some(t) if t <= horizon => cursor = t,
                _ => {
                    placed = false;
                    break;
                }
            }
        }
        if !placed {
            continue;
        }
        let col = seq.column(qe.last());
        let from = col.partition_point(|&t| t <= cursor);
        occurrences.extend(
            col[from..]
                .iter()
                .take_while(|&&t| t <= horizon)
                .map(|&last| QeOccurrence {
                    first_time: first,
                    last_time: last,
                }),
        );
    }

    let mut windows: Vec<AntecedentWindow> = occurrences
        .iter()
        .filter_map(|&occ| AntecedentWindow::for_occurrence(occ, epsilon))
        .collect();
    windows.sort_unstable();

    QeIndex {
        qe: qe.clone(),
        epsilon,
        occurrences,
        windows,
    }
}

fn next_after(column: &[Timestamp], t: Timestamp) -> Option<Timestamp> {
    column.get(column.partition_point(|&u| u <= t)).copied()
}

/// Keeps the end times that fall inside at least one window and measures how
/// far past them the query can start and end.
pub fn filter_end_times(end_times: &[Timestamp], index: &QeIndex) -> EndTimeFilter {
    let windows = &index.windows;
    let eps = index.epsilon;
    let mut kept = Vec::new();
    let mut max_first: Option<u32> = None;
    let mut max_last: Option<u32> = None;
    for &t in end_times {
        // A window holding t has hi - lo <= epsilon, so lo > t - epsilon.
        let from = windows.partition_point(|w| w.lo + eps <= t);
        let to = windows.partition_point(|w| w.lo <= t);
        let mut hit = false;
        for w in windows[from..to].iter().filter(|w| t < w.hi) {
            hit = true;
            let span_first = w.source.first_time - t;
            let span_last = w.source.last_time - t;
            max_first = Some(max_first.map_or(span_first, |m| m.max(span_first)));
            max_last = Some(max_last.map_or(span_last, |m| m.max(span_last)));
        }
        if hit {
            kept.push(t);
        }
    }
    EndTimeFilter {
        kept,
        max_first,
        max_last,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example;
    use crate::model::EventId;

    fn pairs(index: &QeIndex) -> Vec<(u32, u32)> {
        index
            .occurrences()
            .iter()
            .map(|o| (o.first_time, o.last_time))
            .collect()
    }

    fn ranges(index: &QeIndex) -> Vec<(u32, u32)> {
        index.windows().iter().map(|w| (w.lo, w.hi)).collect()
    }

    // D=4, A=1
    #[test]
    fn query_da_on_example() {
        let index = build_qe_index(&example(), &Episode::of(&[4, 1]), 4);
        assert_eq!(pairs(&index), vec![(1, 3), (1, 4), (3, 4), (3, 6), (5, 6)]);
        assert_eq!(ranges(&index), vec![(1, 3), (2, 3), (2, 5)]);

        let f = filter_end_times(&[3, 4, 6, 10, 11], &index);
        assert_eq!(f.kept, vec![3, 4]);
        assert_eq!(f.max_first, Some(2));
        assert_eq!(f.max_last, Some(3));
    }

    #[test]
    fn absent_query_gives_empty_index() {
        let index = build_qe_index(&example(), &Episode::of(&[99]), 4);
        assert!(index.occurrences().is_empty() && index.windows().is_empty());
        let f = filter_end_times(&[3, 4], &index);
        assert!(f.kept.is_empty());
        assert_eq!((f.max_first, f.max_last), (None, None));
    }

    #[test]
    fn single_event_query() {
        let index = build_qe_index(&example(), &Episode::of(&[6]), 3);
        assert_eq!(pairs(&index), vec![(10, 10), (12, 12)]);
        assert_eq!(ranges(&index), vec![(7, 10), (9, 12)]);
    }

    #[test]
    fn window_existence_condition() {
        for eps in 1..8u32 {
            for first in 1..10u32 {
                for last in first..first + eps + 1 {
                    let occ = QeOccurrence {
                        first_time: first,
                        last_time: last,
                    };
                    let expected = if last > eps {
                        last - first < eps
                    } else {
                        first >= 2
                    };
                    assert_eq!(
                        AntecedentWindow::for_occurrence(occ, eps).is_some(),
                        expected,
                        "{occ:?} eps={eps}"
                    );
                }
            }
        }
    }

    /// Naive enumerator: every strictly increasing embedding via nested search.
    fn naive_pairs(seq: &EventSequence, qe: &[EventId], eps: u32) -> Vec<(u32, u32)> {
        fn go(
            seq: &EventSequence,
            qe: &[EventId],
            after: u32,
            first: u32,
            eps: u32,
            out: &mut Vec<(u32, u32)>,
        ) {
            let Some((&e, rest)) = qe.split_first() else {
                return;
            };
            for t in (after + 1)..=seq.end_time() {
                if !seq.contains(t, e) || t - first > eps {
                    continue;
                }
                if rest.is_empty() {
                    out.push((first, t));
                } else {
                    go(seq, rest, t, first, eps, out);
                }
            }
        }
        let mut out = Vec::new();
        for f in 1..=seq.end_time() {
            if !seq.contains(f, qe[0]) {
                continue;
            }
            if qe.len() == 1 {
                out.push((f, f));
            } else {
                go(seq, &qe[1..], f, f, eps, &mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Brute force over every (end time, window) pair.
    fn naive_filter(end_times: &[u32], index: &QeIndex) -> EndTimeFilter {
        let mut kept = Vec::new();
        let (mut mf, mut ml) = (None::<u32>, None::<u32>);
        for &t in end_times {
            let hits: Vec<_> = index.windows().iter().filter(|w| w.contains(t)).collect();
            if !hits.is_empty() {
                kept.push(t);
            }
            for w in hits {
                mf = mf.max(Some(w.source.first_time - t));
                ml = ml.max(Some(w.source.last_time - t));
            }
        }
        EndTimeFilter {
            kept,
            max_first: mf,
            max_last: ml,
        }
    }

    #[test]
    fn max_last_on_example_from_brute_force() {
        let index = build_qe_index(&example(), &Episode::of(&[4, 1]), 4);
        let f = naive_filter(&[3, 4, 6, 10, 11], &index);
        assert_eq!(f.max_last, Some(3));
        assert_eq!(f, filter_end_times(&[3, 4, 6, 10, 11], &index));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn index_matches_naive(
                slots in prop::collection::vec(prop::collection::vec(0u32..4, 0..3), 1..=30),
                qe in prop::collection::vec(0u32..4, 1..=3),
                eps in 1u32..7,
                ends in prop::collection::btree_set(1u32..=30, 0..12),
            ) {
                let seq = EventSequence::from_ids(slots);
                let qe = Episode::of(&qe);
                let index = build_qe_index(&seq, &qe, eps);
                prop_assert_eq!(pairs(&index), naive_pairs(&seq, qe.events(), eps));
                prop_assert!(index.windows().iter().all(|w| w.lo < w.hi && w.hi - w.lo <= eps));

                let ends: Vec<u32> = ends.into_iter().collect();
                let f = filter_end_times(&ends, &index);
                prop_assert_eq!(&f, &naive_filter(&ends, &index));
                if let (Some(a), Some(b)) = (f.max_first, f.max_last) {
                    prop_assert!(1 <= a && a <= b && b <= eps);
                }
            }
        }
    }
}
