//! Decision-diagram branch-and-bound: restricted diagrams supply primal
//! bounds, relaxed diagrams (compiled under the configured strategy) supply
//! dual bounds, and the last exact layer of an inexact relaxed diagram is the
//! branching cutset.
//!
//! The search is best-first on the dual bound (ties: larger prefix value,
//! then lexicographically smaller state). Open subproblems are deduplicated
//! by state, keeping the maximum prefix value and the maximum dual bound; a
//! state rediscovered after being processed re-enters the queue, since a
//! better prefix may have been found. The incumbent starts at 0, since the
//! empty set is always feasible.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use crate::bitset::VertexSet;
use crate::dd::{compile, CompileMode, CompiledDiagram, Node};
use crate::graph::WeightedGraph;
use crate::ordering::{static_weight_order, FixedOrder};
use crate::strategies::{make_order_source, StrategyConfig};

/// A branch-and-bound search node.
#[derive(Clone, Debug)]
pub struct Subproblem {
    /// Vertices still available below this node.
    pub state: VertexSet,
    /// Objective accumulated along the fixed decisions above this node.
    pub prefix_value: u64,
    /// Best known upper bound for completions of this node plus the prefix.
    pub dual_bound: u64,
    /// The 1-decision vertices realizing `prefix_value`.
    pub fixed: VertexSet,
}

/// Outcome of a solve, with the instrumentation counters.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub optimum: u64,
    /// A maximum-weight independent set realizing `optimum`.
    pub best_set: VertexSet,
    /// Subproblems fully processed (popped and not pruned on arrival).
    pub nodes_processed: u64,
    /// Vertex-score computations summed over all compilations.
    pub candidate_evaluations: u64,
    /// Relaxed diagrams compiled.
    pub relaxed_compilations: u64,
    pub wall_time: Duration,
}

/// Knobs that do not affect the returned optimum.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Bound every cutset child by the whole relaxed-diagram bound instead of
    /// the per-cutset-node attribution (sound but looser).
    pub whole_diagram_bound: bool,
}

/// Snapshot handed to the observer after each processed subproblem.
pub struct NodeReport<'a> {
    pub subproblem: &'a Subproblem,
    pub incumbent: u64,
    /// Maximum dual bound over the still-open queue, if any.
    pub max_open_dual: Option<u64>,
    pub restricted: &'a CompiledDiagram,
    pub relaxed: Option<&'a CompiledDiagram>,
}

/// The vertex set of a maximum-value root-terminal path of a restricted or
/// exact compilation.
pub fn best_set_extract(dd: &CompiledDiagram) -> VertexSet {
    dd.best_terminal.chosen.clone()
}

/// Solves the instance to optimality under the given strategy configuration.
pub fn solve(g: &WeightedGraph, cfg: &StrategyConfig) -> SolveResult {
    solve_with(g, cfg, SolveOptions::default(), None)
}

pub fn solve_with(
    g: &WeightedGraph,
    cfg: &StrategyConfig,
    opts: SolveOptions,
    mut observer: Option<&mut dyn FnMut(&NodeReport)>,
) -> SolveResult {
    let start = Instant::now();
    let n = g.n();
    let mut incumbent = 0u64;
    let mut best_set = VertexSet::empty(n);
    let mut nodes_processed = 0u64;
    let mut candidate_evaluations = 0u64;
    let mut relaxed_compilations = 0u64;

    let mut open: HashMap<VertexSet, OpenInfo> = HashMap::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    push_subproblem(
        &mut open,
        &mut heap,
        VertexSet::full(n),
        0,
        u64::MAX,
        VertexSet::empty(n),
    );

    while let Some(entry) = heap.pop() {
        let info = match open.get(&entry.state) {
            Some(info) if info.stamp == entry.stamp => info.clone(),
            _ => continue, // superseded queue entry
        };
        open.remove(&entry.state);
        if info.dual <= incumbent {
            continue; // cannot improve the incumbent
        }
        let sub = Subproblem {
            state: entry.state,
            prefix_value: info.prefix,
            dual_bound: info.dual,
            fixed: info.fixed,
        };
        nodes_processed += 1;

        // Primal side: restricted diagram under the static weight order.
        let mut restricted_order = FixedOrder::new(static_weight_order(g, &sub.state));
        let restricted = compile(
            g,
            Node::root(sub.state.clone()),
            &mut restricted_order,
            cfg.width,
            CompileMode::Restricted,
        );
        candidate_evaluations += restricted.stats.candidate_evaluations;
        if sub.prefix_value + restricted.bound > incumbent {
            incumbent = sub.prefix_value + restricted.bound;
            best_set = sub.fixed.clone();
            best_set.union_with(&best_set_extract(&restricted));
        }

        let mut relaxed = None;
        if !restricted.is_exact {
            // Dual side: relaxed diagram under the configured strategy.
            let mut order = make_order_source(cfg, g, &sub.state);
            let dd = compile(
                g,
                Node::root(sub.state.clone()),
                &mut order,
                cfg.width,
                CompileMode::Relaxed,
            );
            relaxed_compilations += 1;
            candidate_evaluations += dd.stats.candidate_evaluations;

            if dd.is_exact {
                if sub.prefix_value + dd.bound > incumbent {
                    incumbent = sub.prefix_value + dd.bound;
                    best_set = sub.fixed.clone();
                    best_set.union_with(&dd.best_terminal.chosen);
                }
            } else if sub.prefix_value + dd.bound > incumbent {
                let bounds = dd
                    .cutset_bounds
                    .as_ref()
                    .expect("inexact relaxed diagram carries cutset bounds");
                for (i, u) in dd.last_exact_layer.iter().enumerate() {
                    let through = if opts.whole_diagram_bound {
                        dd.bound
                    } else {
                        bounds[i]
                    };
                    let dual = sub.prefix_value + through;
                    if dual <= incumbent {
                        continue;
                    }
                    let mut fixed = sub.fixed.clone();
                    fixed.union_with(&u.chosen);
                    push_subproblem(
                        &mut open,
                        &mut heap,
                        u.state.clone(),
                        sub.prefix_value + u.value,
                        dual,
                        fixed,
                    );
                }
            }
            relaxed = Some(dd);
        }

        if let Some(obs) = observer.as_deref_mut() {
            obs(&NodeReport {
                subproblem: &sub,
                incumbent,
                max_open_dual: open.values().map(|i| i.dual).max(),
                restricted: &restricted,
                relaxed: relaxed.as_ref(),
            });
        }
    }

    debug_assert!(is_independent(g, &best_set), "best set must be independent");
    debug_assert_eq!(
        best_set.iter().map(|v| g.weight(v)).sum::<u64>(),
        incumbent,
        "best set weight must equal the optimum"
    );

    SolveResult {
        optimum: incumbent,
        best_set,
        nodes_processed,
        candidate_evaluations,
        relaxed_compilations,
        wall_time: start.elapsed(),
    }
}

/// Whether `set` is an independent set of `g`.
pub fn is_independent(g: &WeightedGraph, set: &VertexSet) -> bool {
    set.iter().all(|v| g.neighbors(v).intersection_count(set) == 0)
}

#[derive(Clone)]
struct OpenInfo {
    prefix: u64,
    dual: u64,
    fixed: VertexSet,
    stamp: u64,
}

struct HeapEntry {
    dual: u64,
    prefix: u64,
    state: VertexSet,
    stamp: u64,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dual
            .cmp(&other.dual)
            .then(self.prefix.cmp(&other.prefix))
            .then_with(|| other.state.cmp(&self.state))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

fn push_subproblem(
    open: &mut HashMap<VertexSet, OpenInfo>,
    heap: &mut BinaryHeap<HeapEntry>,
    state: VertexSet,
    prefix: u64,
    dual: u64,
    fixed: VertexSet,
) {
    match open.entry(state.clone()) {
        Entry::Vacant(e) => {
            e.insert(OpenInfo {
                prefix,
                dual,
                fixed,
                stamp: 0,
            });
            heap.push(HeapEntry {
                dual,
                prefix,
                state,
                stamp: 0,
            });
        }
        Entry::Occupied(mut e) => {
            let info = e.get_mut();
            let mut changed = false;
            if prefix > info.prefix || (prefix == info.prefix && fixed < info.fixed) {
                info.prefix = prefix;
                info.fixed = fixed;
                changed = true;
            }
            if dual > info.dual {
                info.dual = dual;
                changed = true;
            }
            if changed {
                info.stamp += 1;
                heap.push(HeapEntry {
                    dual: info.dual,
                    prefix: info.prefix,
                    state,
                    stamp: info.stamp,
                });
            }
        }
    }
}
