//! The clustering-based compilation strategies, each realized as a
//! [`VariableOrderSource`] driving the top-down compile loop.
//!
//! Cluster-by-Cluster exhausts clusters one at a time in non-decreasing
//! total-weight order, applying MIN within the active cluster. Pick-and-Sort
//! picks one MIN-selected vertex per nonempty cluster per round, then emits
//! the batch sorted by vertex weight non-increasing (PaS) or by the MIN score
//! recorded at pick time (PaS-VO). Subproblems at or below the always-exact
//! threshold skip clustering entirely and fall back to plain MIN.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::bitset::VertexSet;
use crate::clustering::{cluster_count, exactness_threshold, kmeans, ClusterPolicy, Clustering, PolicyKind};
use crate::dd::{DiagramStats, Layer};
use crate::graph::WeightedGraph;
use crate::ordering::{min_next, MinOrder, VariableOrderSource};

/// Variable-ordering strategy for relaxed compilations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Baseline,
    Cbc,
    Pas,
    PasVo,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Baseline, Strategy::Cbc, Strategy::Pas, Strategy::PasVo];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Baseline => "baseline",
            Strategy::Cbc => "cbc",
            Strategy::Pas => "pas",
            Strategy::PasVo => "pas-vo",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baseline" => Ok(Strategy::Baseline),
            "cbc" => Ok(Strategy::Cbc),
            "pas" => Ok(Strategy::Pas),
            "pas-vo" => Ok(Strategy::PasVo),
            other => Err(format!(
                "unknown strategy `{other}` (expected baseline|cbc|pas|pas-vo)"
            )),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Fixed => "fixed",
            PolicyKind::Adaptive => "adaptive",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(PolicyKind::Fixed),
            "adaptive" => Ok(PolicyKind::Adaptive),
            other => Err(format!(
                "unknown policy `{other}` (expected fixed|adaptive)"
            )),
        }
    }
}

/// A solver configuration: strategy, cluster-count policy, width and the RNG
/// seed feeding the clustering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub policy: PolicyKind,
    pub width: usize,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(strategy: Strategy, policy: PolicyKind, width: usize, seed: u64) -> Self {
        assert!(width >= 2, "contract violation: width must be at least 2");
        StrategyConfig {
            strategy,
            policy,
            width,
            seed,
        }
    }

    pub fn cluster_policy(&self) -> ClusterPolicy {
        ClusterPolicy {
            kind: self.policy,
            width: self.width,
        }
    }
}

/// A Pick-and-Sort pick: the vertex, its MIN score frozen at pick time and
/// its weight.
#[derive(Clone, Copy, Debug)]
pub struct PickedVariable {
    pub vertex: usize,
    pub score: usize,
    pub weight: u64,
}

/// Cluster-by-Cluster: clusters ordered by non-decreasing total weight (ties
/// by cluster id), exhausted strictly one at a time with MIN inside the
/// active cluster.
pub struct CbcOrder {
    clustering: Clustering,
    /// Remaining vertices per cluster, in emission order.
    remaining: Vec<VertexSet>,
    active: usize,
}

impl CbcOrder {
    pub fn new(clustering: Clustering) -> Self {
        let mut order: Vec<usize> = (0..clustering.len()).collect();
        order.sort_by_key(|&c| (clustering.total_weights()[c], c));
        let remaining = order
            .iter()
            .map(|&c| clustering.clusters()[c].clone())
            .collect();
        CbcOrder {
            clustering,
            remaining,
            active: 0,
        }
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }
}

impl VariableOrderSource for CbcOrder {
    fn next_variable(&mut self, layer: &Layer, stats: &mut DiagramStats) -> Option<usize> {
        while self.active < self.remaining.len() && self.remaining[self.active].is_empty() {
            self.active += 1;
        }
        if self.active == self.remaining.len() {
            return None;
        }
        let pick = min_next(layer, &self.remaining[self.active], stats);
        self.remaining[self.active].remove(pick.vertex);
        Some(pick.vertex)
    }
}

/// Pick-and-Sort: one MIN pick per nonempty cluster per round, the batch then
/// emitted in sorted order. `by_score` selects the PaS-VO sort key.
pub struct PasOrder<'g> {
    g: &'g WeightedGraph,
    clustering: Clustering,
    remaining: Vec<VertexSet>,
    batch: VecDeque<usize>,
    by_score: bool,
}

impl<'g> PasOrder<'g> {
    pub fn new(g: &'g WeightedGraph, clustering: Clustering, by_score: bool) -> Self {
        let remaining = clustering.clusters().to_vec();
        PasOrder {
            g,
            clustering,
            remaining,
            batch: VecDeque::new(),
            by_score,
        }
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }

    /// Picks one vertex from every nonempty cluster (in cluster-id order,
    /// all scored against `layer`) and sorts the batch.
    fn refill(&mut self, layer: &Layer, stats: &mut DiagramStats) {
        let mut picks: Vec<PickedVariable> = Vec::new();
        for cluster in self.remaining.iter_mut() {
            if cluster.is_empty() {
                continue;
            }
            let pick = min_next(layer, cluster, stats);
            cluster.remove(pick.vertex);
            picks.push(PickedVariable {
                vertex: pick.vertex,
                score: pick.count,
                weight: self.g.weight(pick.vertex),
            });
        }
        if self.by_score {
            // PaS-VO: ascending MIN score recorded at pick time.
            picks.sort_by_key(|p| (p.score, p.vertex));
        } else {
            // PaS: vertex weight non-increasing.
            picks.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.vertex.cmp(&b.vertex)));
        }
        self.batch.extend(picks.iter().map(|p| p.vertex));
    }
}

impl VariableOrderSource for PasOrder<'_> {
    fn next_variable(&mut self, layer: &Layer, stats: &mut DiagramStats) -> Option<usize> {
        if self.batch.is_empty() {
            self.refill(layer, stats);
        }
        self.batch.pop_front()
    }
}

/// The order source selected by [`make_order_source`].
pub enum StrategyOrder<'g> {
    Min(MinOrder),
    Cbc(CbcOrder),
    Pas(PasOrder<'g>),
}

impl StrategyOrder<'_> {
    /// The clustering backing this source, when one was computed.
    pub fn clustering(&self) -> Option<&Clustering> {
        match self {
            StrategyOrder::Min(_) => None,
            StrategyOrder::Cbc(o) => Some(o.clustering()),
            StrategyOrder::Pas(o) => Some(o.clustering()),
        }
    }
}

impl VariableOrderSource for StrategyOrder<'_> {
    fn next_variable(&mut self, layer: &Layer, stats: &mut DiagramStats) -> Option<usize> {
        match self {
            StrategyOrder::Min(o) => o.next_variable(layer, stats),
            StrategyOrder::Cbc(o) => o.next_variable(layer, stats),
            StrategyOrder::Pas(o) => o.next_variable(layer, stats),
        }
    }
}

/// Builds the order source for a subproblem. Clustering is bypassed for the
/// baseline strategy and whenever the subproblem is small enough to compile
/// exactly at the configured width.
pub fn make_order_source<'g>(
    cfg: &StrategyConfig,
    g: &'g WeightedGraph,
    s: &VertexSet,
) -> StrategyOrder<'g> {
    let n_sub = s.count();
    if cfg.strategy == Strategy::Baseline || n_sub <= exactness_threshold(cfg.width) {
        return StrategyOrder::Min(MinOrder::new(s.clone()));
    }
    let n_c = cluster_count(&cfg.cluster_policy(), n_sub);
    let clustering = kmeans(g, s, n_c, cfg.seed);
    match cfg.strategy {
        Strategy::Cbc => StrategyOrder::Cbc(CbcOrder::new(clustering)),
        Strategy::Pas => StrategyOrder::Pas(PasOrder::new(g, clustering, false)),
        Strategy::PasVo => StrategyOrder::Pas(PasOrder::new(g, clustering, true)),
        Strategy::Baseline => unreachable!(),
    }
}
