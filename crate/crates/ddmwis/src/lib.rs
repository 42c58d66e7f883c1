//! Decision-diagram branch-and-bound for the Maximum Weighted Independent
//! Set Problem, with clustering-based variable ordering for the relaxed
//! diagrams.
//!
//! The solver compiles restricted diagrams for primal bounds and relaxed
//! diagrams for dual bounds, branching on the last exact layer of an inexact
//! relaxed diagram. The variable order of a relaxed compilation comes from
//! one of four strategies: the plain MIN heuristic (`baseline`), or MIN
//! scoped by a k-means clustering of the vertices under Cluster-by-Cluster
//! (`cbc`), Pick-and-Sort (`pas`) or Pick-and-Sort on recorded scores
//! (`pas-vo`), with a fixed or adaptive cluster count.
//!
//! All randomness (instance generation, k-means seeding) is drawn from
//! `Xoshiro256**` seeded with `SeedableRng::seed_from_u64`, so instances and
//! solver runs are reproducible bit for bit.

pub mod bench;
pub mod bitset;
pub mod bnb;
pub mod clustering;
pub mod dd;
pub mod graph;
pub mod ordering;
pub mod strategies;

pub use bitset::VertexSet;
pub use bnb::{solve, SolveOptions, SolveResult};
pub use graph::{generate_instance, parse_graph, serialize_graph, WeightedGraph};
pub use strategies::{Strategy, StrategyConfig};
