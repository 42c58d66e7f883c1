//! Top-down compilation of exact, restricted and relaxed decision diagrams
//! for the MWISP dynamic program.
//!
//! A node's state is the set of vertices still available for the independent
//! set; the root state is the subproblem's vertex set and every terminal
//! state is empty. Within a layer, nodes with equal states are merged keeping
//! the larger value, so states are pairwise distinct at all times. Width is
//! enforced after a layer has been fully generated: the `SortObj` rule keeps
//! the highest-value nodes and either merges the rest into a single node
//! (relaxed) or drops them (restricted).
//!
//! Arcs are never materialized. Each node carries the value of the longest
//! known root path and the set of 1-decisions along that path. In relaxed
//! compilations past the last exact layer it also carries a per-cutset-node
//! value table so the terminal can attribute the tightest bound through every
//! cutset node.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::bitset::VertexSet;
use crate::graph::WeightedGraph;
use crate::ordering::VariableOrderSource;

/// Sentinel for "no path through this cutset node reaches here (yet)".
const UNREACHED: u64 = u64::MAX;

/// A decision-diagram node: a DP state plus the longest known root path.
#[derive(Clone, Debug)]
pub struct Node {
    /// Vertices still available for the independent set.
    pub state: VertexSet,
    /// Length of the longest known root-to-node path.
    pub value: u64,
    /// 1-decision vertices along that longest path. Meaningful for exact
    /// nodes (in particular cutset nodes and restricted/exact terminals).
    pub chosen: VertexSet,
    /// `through[i]` = longest known root path to this node passing through
    /// cutset node `i`. Populated only below the last exact layer of a
    /// relaxed compilation.
    through: Option<Box<[u64]>>,
}

impl Node {
    /// Root node for a (sub)problem: full value table starts empty.
    pub fn root(state: VertexSet) -> Self {
        let chosen = VertexSet::empty(state.capacity());
        Node {
            state,
            value: 0,
            chosen,
            through: None,
        }
    }
}

/// One layer of the diagram under construction.
#[derive(Clone, Debug)]
pub struct Layer {
    pub nodes: Vec<Node>,
    /// Depth: number of decisions taken so far (root layer has index 0).
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompileMode {
    Exact,
    Relaxed,
    Restricted,
}

/// Per-layer record kept for tracing and layer-width assertions.
#[derive(Clone, Debug)]
pub struct LayerTrace {
    pub index: usize,
    pub variable: usize,
    /// Width after state deduplication, before any width enforcement.
    pub width_pre: usize,
    pub width_post: usize,
    /// Nodes eliminated by merging in this layer.
    pub merged: usize,
    /// Nodes dropped by restriction in this layer.
    pub removed: usize,
    /// Vertex-score computations spent selecting this layer's variable.
    pub candidate_evaluations: u64,
}

/// Compilation counters. All counters are monotone during one compilation.
#[derive(Clone, Debug, Default)]
pub struct DiagramStats {
    /// Maximum pre-enforcement layer width observed (equals the true maximum
    /// width for exact compilations).
    pub max_width: usize,
    /// Total nodes eliminated by relaxation merges.
    pub merges: u64,
    /// Total nodes dropped by restriction.
    pub removals: u64,
    /// Total vertex-score computations performed by `NextVariable` calls.
    pub candidate_evaluations: u64,
    pub layers_built: u64,
    pub layer_log: Vec<LayerTrace>,
}

/// Result of a top-down compilation.
#[derive(Clone, Debug)]
pub struct CompiledDiagram {
    /// Longest-path value at the terminal.
    pub bound: u64,
    /// True iff no merge or removal occurred.
    pub is_exact: bool,
    /// Snapshot of the deepest layer compiled before the first width
    /// violation; the terminal layer when the diagram is exact.
    pub last_exact_layer: Vec<Node>,
    /// For inexact relaxed diagrams: `cutset_bounds[i]` is the diagram bound
    /// restricted to paths through `last_exact_layer[i]`.
    pub cutset_bounds: Option<Vec<u64>>,
    /// Best terminal node; `chosen` is a maximum feasible set for exact and
    /// restricted compilations.
    pub best_terminal: Node,
    pub stats: DiagramStats,
}

impl CompiledDiagram {
    /// Relaxed: upper bound on the optimum. Restricted: lower bound achieved
    /// by a feasible set. Exact: the optimum.
    pub fn longest_path_bound(&self) -> u64 {
        self.bound
    }
}

/// DP state transition. `decision = false` removes `v` from availability;
/// `decision = true` selects `v` and removes its closed neighborhood.
pub fn transition(g: &WeightedGraph, s: &VertexSet, v: usize, decision: bool) -> VertexSet {
    let mut next = s.clone();
    if decision {
        assert!(
            s.contains(v),
            "contract violation: decision 1 on unavailable vertex {v}"
        );
        next.subtract(g.neighbors(v));
    }
    next.remove(v);
    next
}

/// Reward of a decision: the vertex weight when selecting, zero otherwise.
pub fn reward(g: &WeightedGraph, v: usize, decision: bool) -> u64 {
    if decision {
        g.weight(v)
    } else {
        0
    }
}

fn sort_layer(nodes: &mut [Node]) {
    nodes.sort_by(|a, b| b.value.cmp(&a.value).then_with(|| a.state.cmp(&b.state)));
}

/// Merges `src`'s through-table into `dst`, shifting by the arc reward.
fn merge_through(dst: &mut Option<Box<[u64]>>, src: &Option<Box<[u64]>>, delta: u64) {
    match (dst.as_deref_mut(), src.as_deref()) {
        (Some(d), Some(s)) => {
            for (di, &si) in d.iter_mut().zip(s) {
                if si != UNREACHED {
                    let candidate = si + delta;
                    if *di == UNREACHED || candidate > *di {
                        *di = candidate;
                    }
                }
            }
        }
        (None, None) => {}
        _ => unreachable!("through tables must be uniformly present in a layer"),
    }
}

fn shifted_through(src: &Option<Box<[u64]>>, delta: u64) -> Option<Box<[u64]>> {
    src.as_deref().map(|t| {
        t.iter()
            .map(|&x| if x == UNREACHED { UNREACHED } else { x + delta })
            .collect()
    })
}

/// Builds the next layer from `prev` by branching on vertex `v`, merging
/// equal states (keeping the maximum value) and enforcing the width `w` for
/// approximate modes. Counters and the layer log are updated on `stats`.
pub fn build_layer(
    g: &WeightedGraph,
    prev: &Layer,
    v: usize,
    w: usize,
    mode: CompileMode,
    stats: &mut DiagramStats,
) -> Layer {
    assert!(!prev.nodes.is_empty(), "contract violation: empty layer");
    match mode {
        CompileMode::Relaxed => assert!(w >= 2, "relaxed width must be at least 2"),
        CompileMode::Restricted => assert!(w >= 1, "restricted width must be at least 1"),
        CompileMode::Exact => {}
    }

    struct Partial {
        value: u64,
        chosen: VertexSet,
        through: Option<Box<[u64]>>,
    }

    let mut map: HashMap<VertexSet, Partial> = HashMap::with_capacity(prev.nodes.len() * 2);
    let mut upsert = |state: VertexSet, value: u64, chosen: VertexSet, node: &Node, delta: u64| {
        match map.entry(state) {
            Entry::Vacant(e) => {
                e.insert(Partial {
                    value,
                    chosen,
                    through: shifted_through(&node.through, delta),
                });
            }
            Entry::Occupied(mut e) => {
                let cur = e.get_mut();
                if value > cur.value || (value == cur.value && chosen < cur.chosen) {
                    cur.value = value;
                    cur.chosen = chosen;
                }
                merge_through(&mut cur.through, &node.through, delta);
            }
        }
    };

    for node in &prev.nodes {
        upsert(
            transition(g, &node.state, v, false),
            node.value,
            node.chosen.clone(),
            node,
            0,
        );
        if node.state.contains(v) {
            let gain = reward(g, v, true);
            let mut chosen = node.chosen.clone();
            chosen.insert(v);
            upsert(
                transition(g, &node.state, v, true),
                node.value + gain,
                chosen,
                node,
                gain,
            );
        }
    }

    let mut nodes: Vec<Node> = map
        .drain()
        .map(|(state, p)| Node {
            state,
            value: p.value,
            chosen: p.chosen,
            through: p.through,
        })
        .collect();
    sort_layer(&mut nodes);

    let width_pre = nodes.len();
    let mut merged = 0;
    let mut removed = 0;
    match mode {
        CompileMode::Relaxed if width_pre > w => {
            nodes = relax_sorted(nodes, w);
            merged = width_pre - nodes.len();
        }
        CompileMode::Restricted if width_pre > w => {
            nodes.truncate(w);
            removed = width_pre - w;
        }
        _ => {}
    }

    stats.max_width = stats.max_width.max(width_pre);
    stats.merges += merged as u64;
    stats.removals += removed as u64;
    stats.layers_built += 1;
    stats.layer_log.push(LayerTrace {
        index: prev.index + 1,
        variable: v,
        width_pre,
        width_post: nodes.len(),
        merged,
        removed,
        candidate_evaluations: 0,
    });

    Layer {
        nodes,
        index: prev.index + 1,
    }
}

/// `SortObj` relaxation: keeps the `w - 1` highest-value nodes and merges the
/// rest into a single node whose state is the union of the merged states and
/// whose value is their maximum. Ties are broken by ascending lexicographic
/// state order. When the merged state coincides with a kept state the two are
/// combined, so the result has `w` or `w - 1` nodes and never duplicates a
/// state.
pub fn relax_layer(layer: Layer, w: usize) -> Layer {
    assert!(w >= 2, "contract violation: relaxation requires w >= 2");
    assert!(
        layer.nodes.len() > w,
        "contract violation: layer width must exceed w"
    );
    let Layer { mut nodes, index } = layer;
    sort_layer(&mut nodes);
    nodes = relax_sorted(nodes, w);
    Layer { nodes, index }
}

fn relax_sorted(mut nodes: Vec<Node>, w: usize) -> Vec<Node> {
    let rest = nodes.split_off(w - 1);
    let mut merged_state = VertexSet::empty(rest[0].state.capacity());
    let mut merged_through: Option<Box<[u64]>> = rest[0].through.clone();
    for node in &rest {
        merged_state.union_with(&node.state);
        merge_through(&mut merged_through, &node.through, 0);
    }
    // rest is sorted, so the head carries the maximum value.
    let merged = Node {
        state: merged_state,
        value: rest[0].value,
        chosen: rest[0].chosen.clone(),
        through: merged_through,
    };
    if let Some(kept) = nodes.iter_mut().find(|k| k.state == merged.state) {
        if merged.value > kept.value {
            kept.value = merged.value;
            kept.chosen = merged.chosen;
        }
        merge_through(&mut kept.through, &merged.through, 0);
    } else {
        nodes.push(merged);
    }
    sort_layer(&mut nodes);
    nodes
}

/// `SortObj` restriction: keeps the `w` highest-value nodes, dropping the
/// rest; same tie rule as [`relax_layer`].
pub fn restrict_layer(layer: Layer, w: usize) -> Layer {
    assert!(w >= 1, "contract violation: restriction requires w >= 1");
    assert!(
        layer.nodes.len() > w,
        "contract violation: layer width must exceed w"
    );
    let Layer { mut nodes, index } = layer;
    sort_layer(&mut nodes);
    nodes.truncate(w);
    Layer { nodes, index }
}

/// Compiles a diagram for the subproblem rooted at `root`, drawing variables
/// from `source` until the terminal layer. For [`CompileMode::Exact`] the
/// width is ignored.
///
/// The source must yield each vertex of `root.state` exactly once; exhausting
/// early or repeating a vertex is a contract violation.
pub fn compile(
    g: &WeightedGraph,
    root: Node,
    source: &mut dyn VariableOrderSource,
    w: usize,
    mode: CompileMode,
) -> CompiledDiagram {
    compile_observed(g, root, source, w, mode, |_| {})
}

/// [`compile`] with a per-layer observer, used by instrumented tests.
pub fn compile_observed(
    g: &WeightedGraph,
    root: Node,
    source: &mut dyn VariableOrderSource,
    w: usize,
    mode: CompileMode,
    mut on_layer: impl FnMut(&Layer),
) -> CompiledDiagram {
    let total = root.state.count();
    let root_state = root.state.clone();
    let mut stats = DiagramStats::default();
    let mut seen = VertexSet::empty(g.n());
    let mut cur = Layer {
        nodes: vec![root],
        index: 0,
    };
    let mut lel: Option<Vec<Node>> = None;
    on_layer(&cur);

    for _ in 0..total {
        let evals_before = stats.candidate_evaluations;
        let v = source
            .next_variable(&cur, &mut stats)
            .expect("contract violation: variable order source exhausted early");
        let pick_evals = stats.candidate_evaluations - evals_before;
        assert!(
            root_state.contains(v),
            "contract violation: vertex {v} outside the root state"
        );
        assert!(!seen.contains(v), "contract violation: vertex {v} repeated");
        seen.insert(v);

        let before = StatsMark::take(&stats);
        let mut next = build_layer(g, &cur, v, w, mode, &mut stats);
        let violated_now =
            lel.is_none() && (stats.merges > before.merges || stats.removals > before.removals);
        if violated_now {
            // The layer before the first width violation is the cutset. For
            // relaxed diagrams, rebuild the violating layer with per-cutset
            // value tables on its parents so terminal values can be
            // attributed through each cutset node.
            lel = Some(cur.nodes.clone());
            if mode == CompileMode::Relaxed {
                before.restore(&mut stats);
                let cutset_width = cur.nodes.len();
                for (i, node) in cur.nodes.iter_mut().enumerate() {
                    let mut table = vec![UNREACHED; cutset_width].into_boxed_slice();
                    table[i] = node.value;
                    node.through = Some(table);
                }
                next = build_layer(g, &cur, v, w, mode, &mut stats);
            }
        }
        if let Some(t) = stats.layer_log.last_mut() {
            t.candidate_evaluations = pick_evals;
        }
        on_layer(&next);
        cur = next;
    }

    assert!(
        source.next_variable(&cur, &mut stats).is_none(),
        "contract violation: variable order source yields extra vertices"
    );
    debug_assert!(
        cur.nodes.iter().all(|n| n.state.is_empty()),
        "terminal states must be empty"
    );
    debug_assert_eq!(cur.nodes.len(), 1, "terminal layer must deduplicate to one node");

    let best_terminal = cur
        .nodes
        .iter()
        .max_by(|a, b| a.value.cmp(&b.value).then_with(|| b.chosen.cmp(&a.chosen)))
        .expect("terminal layer is nonempty")
        .clone();
    let bound = best_terminal.value;
    let is_exact = stats.merges == 0 && stats.removals == 0;
    let cutset_bounds = match (&lel, mode) {
        (Some(_), CompileMode::Relaxed) => {
            let table = best_terminal
                .through
                .as_deref()
                .expect("relaxed compilation tracks cutset bounds");
            debug_assert!(table.iter().all(|&b| b != UNREACHED));
            Some(table.to_vec())
        }
        _ => None,
    };
    let last_exact_layer = lel.unwrap_or_else(|| cur.nodes.clone());

    CompiledDiagram {
        bound,
        is_exact,
        last_exact_layer,
        cutset_bounds,
        best_terminal,
        stats,
    }
}

struct StatsMark {
    max_width: usize,
    merges: u64,
    removals: u64,
    layers_built: u64,
    log_len: usize,
}

impl StatsMark {
    fn take(stats: &DiagramStats) -> Self {
        StatsMark {
            max_width: stats.max_width,
            merges: stats.merges,
            removals: stats.removals,
            layers_built: stats.layers_built,
            log_len: stats.layer_log.len(),
        }
    }

    /// Rolls the counters back to the snapshot (used when a layer is rebuilt).
    fn restore(&self, stats: &mut DiagramStats) {
        stats.max_width = self.max_width;
        stats.merges = self.merges;
        stats.removals = self.removals;
        stats.layers_built = self.layers_built;
        stats.layer_log.truncate(self.log_len);
    }
}
