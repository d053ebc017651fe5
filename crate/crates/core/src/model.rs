//! Domain types shared by every stage of the miner, plus the handful of pure
//! predicates (subsequence containment, confidence, span) they are built on.
//!
//! Timestamps are dense positive integers starting at 1. A sequence slot is a
//! set of events, so the same event never appears twice at one timestamp.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time index of a sequence slot. Always `>= 1` for real slots.
pub type Timestamp = u32;

/// Member of the event alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for EventId {
    fn from(id: u32) -> Self {
        EventId(id)
    }
}

/// A single timeline of event sets, one slot per timestamp `1..=end_time`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSequence {
    slots: Vec<Vec<EventId>>,
    columns: BTreeMap<EventId, Vec<Timestamp>>,
}

impl EventSequence {
    /// Builds a sequence where `slots[k]` holds the events at timestamp `k + 1`.
    /// Each slot is sorted and duplicate events are collapsed.
    pub fn new(slots: Vec<Vec<EventId>>) -> Self {
        let mut slots = slots;
        let mut columns: BTreeMap<EventId, Vec<Timestamp>> = BTreeMap::new();
        for (k, slot) in slots.iter_mut().enumerate() {
            slot.sort_unstable();
            slot.dedup();
            for &e in slot.iter() {
                columns.entry(e).or_default().push(k as Timestamp + 1);
            }
        }
        EventSequence { slots, columns }
    }

    /// Convenience constructor from raw integer slots.
    pub fn from_ids<I, S>(slots: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = u32>,
    {
        Self::new(
            slots
                .into_iter()
                .map(|s| s.into_iter().map(EventId).collect())
                .collect(),
        )
    }

    pub fn begin_time(&self) -> Timestamp {
        1
    }

    /// Last timestamp; 0 for an empty sequence.
    pub fn end_time(&self) -> Timestamp {
        self.slots.len() as Timestamp
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Events at `t`, empty outside `[begin_time, end_time]`.
    pub fn slot(&self, t: Timestamp) -> &[EventId] {
        if t == 0 {
            return &[];
        }
        self.slots
            .get(t as usize - 1)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn slots(&self) -> impl Iterator<Item = (Timestamp, &[EventId])> {
        self.slots
            .iter()
            .enumerate()
            .map(|(k, s)| (k as Timestamp + 1, s.as_slice()))
    }

    pub fn contains(&self, t: Timestamp, event: EventId) -> bool {
        self.slot(t).binary_search(&event).is_ok()
    }

    /// Ascending timestamps at which `event` occurs.
    pub fn column(&self, event: EventId) -> &[Timestamp] {
        self.columns.get(&event).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Events that occur at least once, ascending.
    pub fn alphabet(&self) -> impl Iterator<Item = EventId> + '_ {
        self.columns.keys().copied()
    }

    pub fn alphabet_len(&self) -> usize {
        self.columns.len()
    }

    pub fn has_event(&self, event: EventId) -> bool {
        self.columns.contains_key(&event)
    }
}

/// Ordered, non-empty list of events expected at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Episode(Vec<EventId>);

impl Episode {
    pub fn new(events: Vec<EventId>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidArgument(
                "an episode needs at least one event".into(),
            ));
        }
        Ok(Episode(events))
    }

    /// Panics on an empty list; meant for literals in tests and examples.
    pub fn of(ids: &[u32]) -> Self {
        Self::new(ids.iter().copied().map(EventId).collect()).expect("non-empty episode")
    }

    pub(crate) fn from_vec_unchecked(events: Vec<EventId>) -> Self {
        debug_assert!(!events.is_empty());
        Episode(events)
    }

    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> EventId {
        self.0[0]
    }

    pub fn last(&self) -> EventId {
        self.0[self.0.len() - 1]
    }
}

impl fmt::Display for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_event_list(f, &self.0)
    }
}

impl FromStr for Episode {
    type Err = Error;

    /// Parses a comma- and/or whitespace-separated list of event ids, with
    /// optional surrounding angle brackets: `"3 6"`, `"3,6"`, `"<3,6>"`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('<').trim_end_matches('>');
        let events = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<u32>().map(EventId).map_err(|_| {
                    Error::InvalidArgument(format!("bad event id {tok:?} in episode {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Episode::new(events)
    }
}

fn write_event_list(f: &mut fmt::Formatter<'_>, items: &[impl fmt::Display]) -> fmt::Result {
    f.write_str("<")?;
    for (k, item) in items.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{item}")?;
    }
    f.write_str(">")
}

/// Witness times of an episode occurrence, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence(Vec<Timestamp>);

impl Occurrence {
    pub fn new(times: Vec<Timestamp>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument(
                "an occurrence needs at least one time".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "occurrence times must strictly increase: {times:?}"
            )));
        }
        Ok(Occurrence(times))
    }

    pub fn times(&self) -> &[Timestamp] {
        &self.0
    }

    pub fn start(&self) -> Timestamp {
        self.0[0]
    }

    pub fn end(&self) -> Timestamp {
        self.0[self.0.len() - 1]
    }

    pub fn span(&self) -> u32 {
        occurrence_span(self)
    }
}

/// The latest-starting occurrence among those sharing one end time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinimalOccurrence {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl MinimalOccurrence {
    pub fn span(&self) -> u32 {
        self.end - self.start
    }
}

/// Episode with exact inter-event gaps. Equal events with different gaps are
/// different fixed-gap episodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedGapEpisode {
    events: Vec<EventId>,
    gaps: Vec<u32>,
}

impl FixedGapEpisode {
    pub fn new(events: Vec<EventId>, gaps: Vec<u32>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidArgument(
                "a fixed-gap episode needs at least one event".into(),
            ));
        }
        if gaps.len() + 1 != events.len() {
            return Err(Error::InvalidArgument(format!(
                "{} events need {} gaps, got {}",
                events.len(),
                events.len() - 1,
                gaps.len()
            )));
        }
        if gaps.contains(&0) {
            return Err(Error::InvalidArgument("gaps must be at least 1".into()));
        }
        Ok(FixedGapEpisode { events, gaps })
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance from the first to the last event.
    pub fn span(&self) -> u32 {
        self.gaps.iter().sum()
    }

    /// Offsets of each event relative to the first one.
    pub fn offsets(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(0).chain(self.gaps.iter().scan(0, |acc, g| {
            *acc += g;
            Some(*acc)
        }))
    }
}

impl fmt::Display for FixedGapEpisode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_event_list(f, &self.events)?;
        f.write_str(",")?;
        write_event_list(f, &self.gaps)?;
        f.write_str(")")
    }
}

/// `antecedent -elapse-> consequent`, with the counts that justify it.
///
/// Ordering and equality follow the canonical rule order: antecedent, elapse,
/// consequent events, consequent gaps, then the counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpisodeRule {
    pub antecedent: Episode,
    pub elapse: u32,
    pub consequent: FixedGapEpisode,
    pub support: u64,
    pub antecedent_support: u64,
}

impl EpisodeRule {
    /// Time from the antecedent's last event to the consequent's last event.
    pub fn total_span(&self) -> u32 {
        self.elapse + self.consequent.span()
    }

    pub fn confidence(&self) -> Ratio<u64> {
        Ratio::new(self.support, self.antecedent_support)
    }

    pub fn confidence_f64(&self) -> f64 {
        self.support as f64 / self.antecedent_support as f64
    }

    /// Key that identifies the rule regardless of its counts.
    pub fn key(&self) -> (&Episode, u32, &FixedGapEpisode) {
        (&self.antecedent, self.elapse, &self.consequent)
    }
}

impl fmt::Display for EpisodeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -{}-> {} #SUP: {} #CONF: {:.4}",
            self.antecedent,
            self.elapse,
            self.consequent,
            self.support,
            self.confidence_f64()
        )
    }
}

/// Minimum confidence as an exact fraction in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinConf(Ratio<u64>);

impl MinConf {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument(
                "minimum confidence has a zero denominator".into(),
            ));
        }
        let r = Ratio::new(numer, denom);
        if *r.numer() == 0 || r > Ratio::from_integer(1) {
            return Err(Error::InvalidArgument(format!(
                "minimum confidence must lie in (0, 1], got {numer}/{denom}"
            )));
        }
        Ok(MinConf(r))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// Smallest integer rule support that reaches this confidence for an
    /// antecedent of support `antecedent_support`: `ceil(sp * minConf)`.
    pub fn min_count(&self, antecedent_support: u64) -> u64 {
        let num = antecedent_support as u128 * *self.0.numer() as u128;
        let den = *self.0.denom() as u128;
        num.div_ceil(den) as u64
    }

    pub fn admits(&self, support: u64, antecedent_support: u64) -> bool {
        support as u128 * *self.0.denom() as u128
            >= antecedent_support as u128 * *self.0.numer() as u128
    }
}

impl FromStr for MinConf {
    type Err = Error;

    /// Parses a plain decimal such as `0.2` or `1` exactly, without going
    /// through floating point.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad minimum confidence {s:?}"));
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        MinConf::new(num, den)
    }
}

impl TryFrom<f64> for MinConf {
    type Error = Error;

    /// Goes through the shortest decimal that round-trips, so `0.2` means 1/5.
    fn try_from(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad minimum confidence {value}"
            )));
        }
        format!("{value}").parse()
    }
}

impl fmt::Display for MinConf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = *self.0.numer() as f64 / *self.0.denom() as f64;
        write!(f, "{v}")
    }
}

/// Number of pruning strategies enabled, applied cumulatively in the order
/// pre-expansion windows, search distance, node deactivation, rule length.
/// Zero means plain mining followed by the target filter.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Strategies(u8);

impl Strategies {
    pub const NONE: Strategies = Strategies(0);
    pub const ALL: Strategies = Strategies(4);

    pub fn new(count: u8) -> Result<Self> {
        if count > 4 {
            return Err(Error::Config(format!(
                "strategy count must be 0..=4, got {count}"
            )));
        }
        Ok(Strategies(count))
    }

    pub fn all_masks() -> impl Iterator<Item = Strategies> {
        (0..=4).map(Strategies)
    }

    pub fn count(self) -> u8 {
        self.0
    }

    /// Filter antecedent end times by the query's pre-expansion windows.
    pub fn window_filter(self) -> bool {
        self.0 >= 1
    }

    /// Stop adding root children past the maximum search distance.
    pub fn distance_gate(self) -> bool {
        self.0 >= 2
    }

    /// Deactivate nodes whose path can no longer grow the query.
    pub fn node_deactivation(self) -> bool {
        self.0 >= 3
    }

    /// Skip emitting rules whose consequent is shorter than the query.
    pub fn length_gate(self) -> bool {
        self.0 >= 4
    }
}

impl fmt::Display for Strategies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningParams {
    pub query: Episode,
    pub min_sup: u64,
    pub min_conf: MinConf,
    /// Antecedent spans must be strictly below this.
    pub delta: u32,
    /// Antecedent end to consequent end must not exceed this.
    pub epsilon: u32,
    pub strategies: Strategies,
}

impl MiningParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_sup == 0 {
            return Err(Error::Config("min-sup must be at least 1".into()));
        }
        if self.delta == 0 {
            return Err(Error::Config("delta must be at least 1".into()));
        }
        if self.epsilon == 0 {
            return Err(Error::Config("epsilon must be at least 1".into()));
        }
        if (self.epsilon as usize) < self.query.len() {
            return Err(Error::Config(format!(
                "epsilon ({}) is smaller than the query length ({}): no consequent of span <= epsilon can contain the query",
                self.epsilon,
                self.query.len()
            )));
        }
        Ok(())
    }
}

/// Whether `pattern` embeds into `container` preserving order.
pub fn contains_subsequence(container: &[EventId], pattern: &[EventId]) -> bool {
    let mut rest = pattern.iter().peekable();
    for e in container {
        match rest.peek() {
            Some(&p) if p == e => {
                rest.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    rest.peek().is_none()
}

/// `rule_support / antecedent_support` as an exact fraction.
pub fn rule_confidence(rule_support: u64, antecedent_support: u64) -> Result<Ratio<u64>> {
    if antecedent_support == 0 {
        return Err(Error::InvalidArgument(
            "antecedent support must be at least 1".into(),
        ));
    }
    Ok(Ratio::new(rule_support, antecedent_support))
}

/// Last time minus first time.
pub fn occurrence_span(occ: &Occurrence) -> u32 {
    occ.end() - occ.start()
}
