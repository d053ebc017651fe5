//! Targeted mining of precise-positioning episode rules.
//!
//! Given one timestamped event sequence and a query episode, find every rule
//! `antecedent -Δt-> (consequent, gaps)` where the antecedent is a frequent
//! minimal-occurrence episode of span `< delta`, the consequent is a fixed-gap
//! episode ending within `epsilon` of the antecedent's end, the rule's
//! confidence reaches `min_conf`, and the consequent contains the query.
//!
//! ```
//! use episode_rules::{fixtures, mine, Episode, MiningParams, Strategies};
//!
//! let seq = fixtures::example();
//! let params = MiningParams {
//!     query: Episode::of(&[3, 6]),
//!     min_sup: 1,
//!     min_conf: "0.5".parse().unwrap(),
//!     delta: 4,
//!     epsilon: 4,
//!     strategies: Strategies::ALL,
//! };
//! let result = mine(&seq, &params).unwrap();
//! assert!(result
//!     .rules
//!     .iter()
//!     .any(|r| r.to_string() == "<1,4,1> -1-> (<3,5,6>,<1,2>) #SUP: 1 #CONF: 1.0000"));
//! ```

pub mod error;
pub mod fixtures;
pub mod io;
pub mod meo;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod qe_index;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
pub use io::DatasetFormat;
pub use meo::{mine_frequent_meo, minimal_occurrences, MinimalOccurrenceRecord};
pub use miner::{mine, target_filter, MiningResult, MiningStats};
pub use model::{
    contains_subsequence, occurrence_span, rule_confidence, Episode, EpisodeRule, EventId,
    EventSequence, FixedGapEpisode, MinConf, MinimalOccurrence, MiningParams, Occurrence,
    Strategies, Timestamp,
};
pub use oracle::{brute_force_mine, OracleBounds};
pub use qe_index::{build_qe_index, filter_end_times, QeIndex};
pub use synth::{generate_synthetic, SyntheticSpec};
pub use tree::{mining_feo, node_to_rule, TaperTree};
