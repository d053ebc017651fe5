//! Consequent trees grown from one frequent antecedent.
//!
//! The root carries the antecedent's end times. A node at root distance `d`
//! with event `e` stands for the fixed-gap consequent spelled by its root path,
//! and its `tlist` holds the absolute times at which `e` closes that consequent
//! for some root end time. The root-to-node map `t -> t + d` is injective, so
//! `|tlist|` is the rule's support.
//!
//! The search distance `i` runs from 1 to `epsilon`. At each step every active
//! node at distance `d < i` may gain a child at gap `i - d` for each event seen
//! at least `min_count` times at those offsets; the root gains children at gap
//! `i`. Three of the pruning strategies act here: the distance gate limits new
//! root children, node deactivation freezes paths that can no longer contain
//! the query, and the length gate suppresses rules shorter than the query.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::meo::MinimalOccurrenceRecord;
use crate::model::{
    Episode, EpisodeRule, EventId, EventSequence, FixedGapEpisode, MinConf, Strategies, Timestamp,
};

pub const ROOT: usize = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// `None` only for the root.
    pub event: Option<EventId>,
    pub tlist: Vec<Timestamp>,
    pub parent: Option<usize>,
    pub edge_gap: u32,
    pub root_distance: u32,
    pub children: Vec<usize>,
    pub active: bool,
    /// Number of events on the root path, root excluded.
    pub depth: usize,
    /// Length of the longest query prefix embedded in the root path.
    pub query_matched: usize,
}

/// Maximum distances from a kept end time to the query's first and last
/// events. With the window filter off both are `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_first: u32,
    pub max_last: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub candidates: u64,
    /// Frequent events refused as root children by the distance gate.
    pub pruned_by_distance: u64,
    pub deactivated: u64,
    /// Rule emissions suppressed by the length gate.
    pub pruned_by_length: u64,
}

#[derive(Debug, Clone)]
pub struct TaperTree {
    pub antecedent: Episode,
    /// Support of the antecedent over the whole sequence, before any end
    /// times were filtered; the confidence denominator.
    pub antecedent_support: u64,
    nodes: Vec<TreeNode>,
    /// Candidate rules in emission order, with the consequent length.
    pub emitted: Vec<(EpisodeRule, usize)>,
    pub stats: TreeStats,
}

impl TaperTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[ROOT]
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the tree has no node besides the root.
    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Checks the edge property of every parent/child pair: each child time is
    /// its parent's time plus the edge gap, and no node lies beyond `epsilon`.
    pub fn check_structure(&self, epsilon: u32, min_count: u64) -> std::result::Result<(), String> {
        for (idx, node) in self.nodes.iter().enumerate().skip(1) {
            let parent = &self.nodes[node.parent.ok_or(format!("node {idx} has no parent"))?];
            if node.root_distance != parent.root_distance + node.edge_gap || node.edge_gap == 0 {
                return Err(format!("node {idx}: bad distance"));
            }
            if node.root_distance > epsilon {
                return Err(format!(
                    "node {idx}: distance {} beyond epsilon",
                    node.root_distance
                ));
            }
            if (node.tlist.len() as u64) < min_count {
                return Err(format!("node {idx}: support below threshold"));
            }
            if !node.tlist.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("node {idx}: tlist not strictly increasing"));
            }
            for &t in &node.tlist {
                if t < node.edge_gap || parent.tlist.binary_search(&(t - node.edge_gap)).is_err() {
                    return Err(format!("node {idx}: time {t} has no parent witness"));
                }
            }
        }
        Ok(())
    }
}

/// The rule spelled by the root path of `idx`.
pub fn node_to_rule(tree: &TaperTree, idx: usize) -> Result<EpisodeRule> {
    if idx == ROOT || idx >= tree.nodes.len() {
        return Err(Error::InvalidArgument(format!(
            "node {idx} is not a non-root node of this tree"
        )));
    }
    let mut events = Vec::new();
    let mut gaps = Vec::new();
    let mut cur = idx;
    while let Some(parent) = tree.nodes[cur].parent {
        events.push(
            tree.nodes[cur]
                .event
                .expect("non-root nodes carry an event"),
        );
        gaps.push(tree.nodes[cur].edge_gap);
        cur = parent;
    }
    events.reverse();
    gaps.reverse();
    let elapse = gaps.remove(0);
    Ok(EpisodeRule {
        antecedent: tree.antecedent.clone(),
        elapse,
        consequent: FixedGapEpisode::new(events, gaps)?,
        support: tree.nodes[idx].tlist.len() as u64,
        antecedent_support: tree.antecedent_support,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct TreeConfig<'a> {
    pub query: &'a Episode,
    pub min_conf: MinConf,
    pub epsilon: u32,
    pub strategies: Strategies,
    pub bounds: SearchBounds,
}

/// Grows the consequent tree of `antecedent` from the end times in `kept`.
pub fn mining_feo(
    seq: &EventSequence,
    antecedent: &MinimalOccurrenceRecord,
    kept: &[Timestamp],
    cfg: TreeConfig<'_>,
) -> TaperTree {
    let antecedent_support = antecedent.support();
    let min_count = cfg.min_conf.min_count(antecedent_support).max(1) as usize;
    let query = cfg.query.events();
    let SearchBounds {
        max_first,
        max_last,
    } = cfg.bounds;

    let mut tree = TaperTree {
        antecedent: antecedent.episode.clone(),
        antecedent_support,
        nodes: vec![TreeNode {
            event: None,
            tlist: kept.to_vec(),
            parent: None,
            edge_gap: 0,
            root_distance: 0,
            children: Vec::new(),
            active: true,
            depth: 0,
            query_matched: 0,
        }],
        emitted: Vec::new(),
        stats: TreeStats::default(),
    };
    if kept.is_empty() {
        return tree;
    }

    let mut buckets: HashMap<EventId, Vec<Timestamp>> = HashMap::new();
    for i in 1..=cfg.epsilon {
        if cfg.strategies.node_deactivation() {
            if i == max_first + 1 {
                tree.deactivate_where(|n| n.query_matched == 0);
            }
            if i == max_last + 1 {
                tree.deactivate_where(|n| n.query_matched < query.len());
            }
        }

        let existing = tree.nodes.len();

        // New root children at gap i.
        for (event, times) in frequent_at(seq, &tree.nodes[ROOT].tlist, i, min_count, &mut buckets)
        {
            let admitted = !cfg.strategies.distance_gate()
                || i < max_first
                || (i == max_first && event == query[0]);
            if admitted {
                tree.attach(ROOT, event, i, times, query, cfg.strategies, min_count);
            } else {
                tree.stats.pruned_by_distance += 1;
            }
        }

        // Extensions of existing nodes. Every witness time of a child here is
        // also a root time plus i, so counting per node directly equals
        // intersecting with the root-level candidate lists.
        for w in 1..existing {
            let node = &tree.nodes[w];
            if !node.active {
                continue;
            }
            let gap = i - node.root_distance;
            for (event, times) in frequent_at(seq, &node.tlist, gap, min_count, &mut buckets) {
                tree.attach(w, event, gap, times, query, cfg.strategies, min_count);
            }
        }
    }
    debug_assert_eq!(tree.check_structure(cfg.epsilon, min_count as u64), Ok(()));
    tree
}

/// Events present at `t + gap` for at least `min_count` of the `t` in `tlist`,
/// sorted by event, each with its ascending times.
fn frequent_at(
    seq: &EventSequence,
    tlist: &[Timestamp],
    gap: u32,
    min_count: usize,
    buckets: &mut HashMap<EventId, Vec<Timestamp>>,
) -> Vec<(EventId, Vec<Timestamp>)> {
    buckets.clear();
    if tlist.len() < min_count {
        return Vec::new();
    }
    for &t in tlist {
        let at = t + gap;
        if at > seq.end_time() {
            break;
        }
        for &e in seq.slot(at) {
            buckets.entry(e).or_default().push(at);
        }
    }
    let mut out: Vec<(EventId, Vec<Timestamp>)> = buckets
        .drain()
        .filter(|(_, times)| times.len() >= min_count)
        .collect();
    out.sort_unstable_by_key(|(e, _)| *e);
    out
}

impl TaperTree {
    #[allow(clippy::too_many_arguments)]
    fn attach(
        &mut self,
        parent: usize,
        event: EventId,
        gap: u32,
        tlist: Vec<Timestamp>,
        query: &[EventId],
        strategies: Strategies,
        min_count: usize,
    ) {
        debug_assert!(tlist.len() >= min_count);
        let p = &self.nodes[parent];
        let matched = p.query_matched
            + usize::from(p.query_matched < query.len() && query[p.query_matched] == event);
        let node = TreeNode {
            event: Some(event),
            tlist,
            parent: Some(parent),
            edge_gap: gap,
            root_distance: p.root_distance + gap,
            children: Vec::new(),
            active: true,
            depth: p.depth + 1,
            query_matched: matched,
        };
        let depth = node.depth;
        let idx = self.nodes.len();
        self.nodes.push(node);
        self.nodes[parent].children.push(idx);

        if strategies.length_gate() && depth < query.len() {
            self.stats.pruned_by_length += 1;
            return;
        }
        let rule = node_to_rule(self, idx).expect("fresh non-root node");
        self.emitted.push((rule, depth));
        self.stats.candidates += 1;
    }

    fn deactivate_where(&mut self, pred: impl Fn(&TreeNode) -> bool) {
        for node in self.nodes.iter_mut().skip(1) {
            if node.active && pred(node) {
                node.active = false;
                self.stats.deactivated += 1;
            }
        }
    }
}
