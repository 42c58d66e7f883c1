//! Weighted-graph instances: construction, text format I/O and the random
//! instance generator.
//!
//! The text format is line oriented and DIMACS-flavoured, with 1-based vertex
//! indices on disk (0-based everywhere in the API):
//!
//! ```text
//! c optional comment
//! p <n> <m>
//! v <index> <weight>     (n lines, each index exactly once)
//! e <u> <v>              (m lines, duplicates allowed and deduplicated)
//! ```

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::bitset::VertexSet;

/// An immutable MWISP instance: symmetric adjacency bitsets plus positive
/// integer vertex weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<VertexSet>,
    weights: Vec<u64>,
}

/// Errors raised when assembling a graph from raw parts.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("vertex {vertex} has non-positive weight")]
    NonPositiveWeight { vertex: usize },
    #[error("vertex index {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
}

impl WeightedGraph {
    /// Builds a graph from `n`, per-vertex weights and an undirected edge
    /// list (0-based endpoints). Each edge is inserted in both directions, so
    /// the adjacency is symmetric by construction.
    pub fn new(
        n: usize,
        weights: Vec<u64>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if weights.len() != n {
            return Err(GraphError::WeightCount {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(GraphError::NonPositiveWeight { vertex: v });
        }
        let mut adj = vec![VertexSet::empty(n); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(WeightedGraph { n, adj, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Neighbor bitset of `v`.
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::count).sum::<usize>() / 2
    }

    /// The full vertex set `{0, .., n-1}`.
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Degree of `v` in the subgraph induced by `s`, i.e. `|adj(v) ∩ s|`.
    ///
    /// `v` must be a member of `s`.
    pub fn induced_degree(&self, s: &VertexSet, v: usize) -> usize {
        assert!(s.contains(v), "contract violation: vertex {v} not in state");
        self.adj[v].intersection_count(s)
    }
}

/// Generates an Erdős–Rényi `G(n, density)` instance.
///
/// Unordered pairs `(i, j)` with `i < j` are visited in lexicographic order
/// and one uniform variate is drawn per pair from a `Xoshiro256**` generator
/// seeded with `seed`; the pair becomes an edge when the variate is below
/// `density`. The weight of vertex `i` (0-based) is `(i mod 100) + 1`.
pub fn generate_instance(n: usize, density: f64, seed: u64) -> WeightedGraph {
    assert!(n >= 1, "contract violation: n must be at least 1");
    assert!(
        (0.0..=1.0).contains(&density),
        "contract violation: density must lie in [0, 1]"
    );
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let weights: Vec<u64> = (0..n).map(|i| (i % 100) as u64 + 1).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let draw: f64 = rng.random();
            if draw < density {
                edges.push((i, j));
            }
        }
    }
    WeightedGraph::new(n, weights, edges).expect("generated graph is valid")
}

/// Errors produced by [`parse_graph`]; line numbers are 1-based.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: expected `v <index> <weight>`")]
    MalformedWeight { line: usize },
    #[error("line {line}: expected `e <u> <v>`")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex index out of range")]
    VertexOutOfRange { line: usize },
    #[error("line {line}: non-positive weight for vertex {vertex}")]
    NonPositiveWeight { line: usize, vertex: usize },
    #[error("line {line}: duplicate weight for vertex {vertex}")]
    DuplicateWeight { line: usize, vertex: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: unrecognized line type `{token}`")]
    UnrecognizedLine { line: usize, token: String },
    #[error("line {line}: data before header")]
    DataBeforeHeader { line: usize },
    #[error("missing `p <n> <m>` header")]
    MissingHeader,
    #[error("expected {expected} vertex weights, found {found}")]
    WeightCountMismatch { expected: usize, found: usize },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

/// Parses the text instance format. Edge lines add both directions, so the
/// result is symmetric regardless of how the file lists endpoints.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    // (vertex, weight) pairs, kept sparse until the header count is verified
    // so a hostile header cannot force a huge allocation.
    let mut weights: Vec<(usize, u64)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_lines = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(kind) = tokens.next() else { continue };
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                let n = parse_count(tokens.next(), line)?;
                let m = parse_count(tokens.next(), line)?;
                if tokens.next().is_some() {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "trailing tokens".into(),
                    });
                }
                header = Some((n, m));
            }
            "v" => {
                let (n, _) = header.ok_or(ParseError::DataBeforeHeader { line })?;
                let idx: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(ParseError::MalformedWeight { line })?;
                let w: i64 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(ParseError::MalformedWeight { line })?;
                if tokens.next().is_some() {
                    return Err(ParseError::MalformedWeight { line });
                }
                if idx == 0 || idx > n {
                    return Err(ParseError::VertexOutOfRange { line });
                }
                if w <= 0 {
                    return Err(ParseError::NonPositiveWeight { line, vertex: idx });
                }
                if weights.iter().any(|&(v, _)| v == idx) {
                    return Err(ParseError::DuplicateWeight { line, vertex: idx });
                }
                weights.push((idx, w as u64));
            }
            "e" => {
                let (n, _) = header.ok_or(ParseError::DataBeforeHeader { line })?;
                let u: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(ParseError::MalformedEdge { line })?;
                let v: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(ParseError::MalformedEdge { line })?;
                if tokens.next().is_some() {
                    return Err(ParseError::MalformedEdge { line });
                }
                if u == 0 || u > n || v == 0 || v > n {
                    return Err(ParseError::VertexOutOfRange { line });
                }
                if u == v {
                    return Err(ParseError::SelfLoop { line, vertex: u });
                }
                edge_lines += 1;
                edges.push((u - 1, v - 1));
            }
            other => {
                return Err(ParseError::UnrecognizedLine {
                    line,
                    token: other.to_string(),
                });
            }
        }
    }

    let (n, m) = header.ok_or(ParseError::MissingHeader)?;
    if weights.len() != n {
        return Err(ParseError::WeightCountMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if edge_lines != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found: edge_lines,
        });
    }
    // Each index appears exactly once and lies in 1..=n, so this fills all n.
    let mut weight_vec = vec![0u64; n];
    for (idx, w) in weights {
        weight_vec[idx - 1] = w;
    }
    Ok(WeightedGraph::new(n, weight_vec, edges).expect("validated during parse"))
}

fn parse_count(token: Option<&str>, line: usize) -> Result<usize, ParseError> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::MalformedHeader {
            line,
            reason: "expected `p <n> <m>`".into(),
        })
}

/// Canonical serialization: header, weights by ascending index, then edges
/// `(u, v)` with `u < v` in lexicographic order. `parse_graph` of the output
/// reproduces the graph exactly.
pub fn serialize_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("p {} {}\n", g.n(), g.edge_count()));
    for v in 0..g.n() {
        out.push_str(&format!("v {} {}\n", v + 1, g.weight(v)));
    }
    for u in 0..g.n() {
        for v in g.neighbors(u).iter() {
            if u < v {
                out.push_str(&format!("e {} {}\n", u + 1, v + 1));
            }
        }
    }
    out
}
