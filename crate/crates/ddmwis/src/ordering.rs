//! Variable-ordering heuristics feeding the top-down compilation: the MIN
//! dynamic heuristic over an arbitrary candidate set and the static
//! non-increasing-weight order used for restricted diagrams.

use crate::bitset::VertexSet;
use crate::dd::{DiagramStats, Layer};
use crate::graph::WeightedGraph;

/// Source of the next decision variable during one compilation.
///
/// A source is stateful: across a whole compilation it must yield each vertex
/// of the root state exactly once and then return `None`.
pub trait VariableOrderSource {
    fn next_variable(&mut self, layer: &Layer, stats: &mut DiagramStats) -> Option<usize>;
}

/// A scored MIN pick: the selected vertex and its appearance count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinScore {
    pub vertex: usize,
    /// Occurrences of the vertex across the states of the scored layer.
    pub count: usize,
}

/// Selects the candidate appearing in the fewest states of `layer`, breaking
/// ties by smallest vertex index. Candidates absent from every state score 0
/// and remain legal selections. Adds one candidate evaluation per candidate
/// to `stats`.
pub fn min_next(layer: &Layer, candidates: &VertexSet, stats: &mut DiagramStats) -> MinScore {
    let mut best: Option<MinScore> = None;
    for v in candidates.iter() {
        let count = layer.nodes.iter().filter(|n| n.state.contains(v)).count();
        stats.candidate_evaluations += 1;
        if best.is_none_or(|b| count < b.count) {
            best = Some(MinScore { vertex: v, count });
        }
    }
    best.expect("contract violation: empty candidate set")
}

/// Vertices of `s` sorted by weight descending, ties by ascending index.
pub fn static_weight_order(g: &WeightedGraph, s: &VertexSet) -> Vec<usize> {
    let mut order: Vec<usize> = s.iter().collect();
    order.sort_by(|&a, &b| g.weight(b).cmp(&g.weight(a)).then(a.cmp(&b)));
    order
}

/// The baseline dynamic order: MIN over all unfixed vertices.
pub struct MinOrder {
    remaining: VertexSet,
}

impl MinOrder {
    pub fn new(candidates: VertexSet) -> Self {
        MinOrder {
            remaining: candidates,
        }
    }
}

impl VariableOrderSource for MinOrder {
    fn next_variable(&mut self, layer: &Layer, stats: &mut DiagramStats) -> Option<usize> {
        if self.remaining.is_empty() {
            return None;
        }
        let pick = min_next(layer, &self.remaining, stats);
        self.remaining.remove(pick.vertex);
        Some(pick.vertex)
    }
}

/// A pre-specified static order; performs no candidate evaluations.
pub struct FixedOrder {
    seq: std::vec::IntoIter<usize>,
}

impl FixedOrder {
    pub fn new(seq: Vec<usize>) -> Self {
        FixedOrder {
            seq: seq.into_iter(),
        }
    }
}

impl VariableOrderSource for FixedOrder {
    fn next_variable(&mut self, _layer: &Layer, _stats: &mut DiagramStats) -> Option<usize> {
        self.seq.next()
    }
}
