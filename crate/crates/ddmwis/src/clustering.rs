//! Vertex clustering on the feature vector `[induced degree, weight]` and the
//! policies deciding how many clusters a subproblem gets.
//!
//! Both features are min-max normalized to `[0, 1]` over the subproblem's
//! vertices (a degenerate all-equal feature normalizes to 0), so the raw
//! degree range cannot dominate the weight range. Clustering runs Lloyd's
//! algorithm with k-means++ seeding from the pinned RNG, an iteration cap of
//! 100, and empty clusters repaired by moving in the point farthest from its
//! centroid. Identical inputs always produce the identical partition.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::bitset::VertexSet;
use crate::graph::WeightedGraph;

/// Cluster-count policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    /// Always two clusters.
    Fixed,
    /// Scales the count with the subproblem size relative to the
    /// always-exact threshold of the configured width.
    Adaptive,
}

#[derive(Clone, Copy, Debug)]
pub struct ClusterPolicy {
    pub kind: PolicyKind,
    pub width: usize,
}

/// Size below which any diagram of the subproblem compiles exactly at width
/// `w` regardless of the variable order: `2 * ceil(log2(w))`.
pub fn exactness_threshold(w: usize) -> usize {
    assert!(w >= 2, "contract violation: width must be at least 2");
    2 * ceil_log2(w)
}

fn ceil_log2(w: usize) -> usize {
    (usize::BITS - (w - 1).leading_zeros()) as usize
}

/// Number of clusters for a subproblem of `n_sub` vertices.
///
/// Fixed policy: 2. Adaptive: `max(R / 2, 1)` with
/// `R = n_sub / (2 * ceil(log2 W))` (integer division). The result is capped
/// at `n_sub` and kept strictly below the always-exact threshold.
pub fn cluster_count(policy: &ClusterPolicy, n_sub: usize) -> usize {
    assert!(n_sub >= 1, "contract violation: empty subproblem");
    let threshold = exactness_threshold(policy.width);
    let raw = match policy.kind {
        PolicyKind::Fixed => 2,
        PolicyKind::Adaptive => (n_sub / threshold / 2).max(1),
    };
    raw.min(n_sub).min((threshold - 1).max(1))
}

/// A partition of a subproblem's vertices into nonempty clusters.
#[derive(Clone, Debug)]
pub struct Clustering {
    clusters: Vec<VertexSet>,
    total_weights: Vec<u64>,
}

impl Clustering {
    /// Builds a clustering from hand-specified clusters. Panics when a
    /// cluster is empty or two clusters overlap.
    pub fn from_clusters(g: &WeightedGraph, clusters: Vec<VertexSet>) -> Self {
        let mut seen = VertexSet::empty(g.n());
        let mut total_weights = Vec::with_capacity(clusters.len());
        for cluster in &clusters {
            assert!(!cluster.is_empty(), "empty cluster");
            assert_eq!(seen.intersection_count(cluster), 0, "clusters overlap");
            seen.union_with(cluster);
            total_weights.push(cluster.iter().map(|v| g.weight(v)).sum());
        }
        Clustering {
            clusters,
            total_weights,
        }
    }

    /// Disjoint, nonempty vertex sets covering the clustered subproblem.
    pub fn clusters(&self) -> &[VertexSet] {
        &self.clusters
    }

    /// Sum of vertex weights per cluster, aligned with [`Self::clusters`].
    pub fn total_weights(&self) -> &[u64] {
        &self.total_weights
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster id of `v`, if `v` was part of the clustered set.
    pub fn assignment(&self, v: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(v))
    }
}

/// Feature vector of a vertex within a subproblem, normalized to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector {
    pub degree: f64,
    pub weight: f64,
}

impl FeatureVector {
    fn dist2(&self, other: &[f64; 2]) -> f64 {
        let dd = self.degree - other[0];
        let dw = self.weight - other[1];
        dd * dd + dw * dw
    }
}

/// Normalized `[induced degree, weight]` features for the vertices of `s`,
/// in ascending vertex order.
pub fn features(g: &WeightedGraph, s: &VertexSet) -> Vec<FeatureVector> {
    let verts: Vec<usize> = s.iter().collect();
    let degrees: Vec<usize> = verts.iter().map(|&v| g.induced_degree(s, v)).collect();
    let weights: Vec<u64> = verts.iter().map(|&v| g.weight(v)).collect();
    let norm_deg = min_max(&degrees.iter().map(|&d| d as f64).collect::<Vec<_>>());
    let norm_w = min_max(&weights.iter().map(|&w| w as f64).collect::<Vec<_>>());
    norm_deg
        .into_iter()
        .zip(norm_w)
        .map(|(degree, weight)| FeatureVector { degree, weight })
        .collect()
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        values.iter().map(|&x| (x - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Lloyd's k-means over the normalized features of the vertices of `s`.
/// Deterministic given `(g, s, n_c, seed)`.
pub fn kmeans(g: &WeightedGraph, s: &VertexSet, n_c: usize, seed: u64) -> Clustering {
    let verts: Vec<usize> = s.iter().collect();
    let m = verts.len();
    assert!(
        n_c >= 1 && n_c <= m,
        "contract violation: cluster count {n_c} outside 1..={m}"
    );
    let feats = features(g, s);
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);

    // k-means++ seeding; duplicate feature points fall back to the smallest
    // unchosen index once all squared distances vanish.
    let mut centers: Vec<[f64; 2]> = Vec::with_capacity(n_c);
    let mut picked: Vec<usize> = Vec::with_capacity(n_c);
    let first = rng.random_range(0..m);
    picked.push(first);
    centers.push([feats[first].degree, feats[first].weight]);
    while centers.len() < n_c {
        let d2: Vec<f64> = feats
            .iter()
            .map(|f| {
                centers
                    .iter()
                    .map(|c| f.dist2(c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    chosen = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            chosen.expect("total > 0 implies a positive entry")
        } else {
            (0..m)
                .find(|i| !picked.contains(i))
                .expect("n_c <= m leaves an unchosen point")
        };
        picked.push(next);
        centers.push([feats[next].degree, feats[next].weight]);
    }

    let mut assign: Vec<usize> = vec![0; m];
    for iter in 0..100 {
        let mut next_assign: Vec<usize> = feats
            .iter()
            .map(|f| {
                let mut best = 0;
                let mut best_d = f.dist2(&centers[0]);
                for (c, center) in centers.iter().enumerate().skip(1) {
                    let d = f.dist2(center);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            })
            .collect();
        repair_empty_clusters(&feats, &centers, &mut next_assign, n_c);
        let stable = next_assign == assign;
        assign = next_assign;
        if stable && iter > 0 {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let mut sum = [0.0f64; 2];
            let mut count = 0usize;
            for (f, &a) in feats.iter().zip(&assign) {
                if a == c {
                    sum[0] += f.degree;
                    sum[1] += f.weight;
                    count += 1;
                }
            }
            *center = [sum[0] / count as f64, sum[1] / count as f64];
        }
    }

    let n = g.n();
    let mut clusters = vec![VertexSet::empty(n); n_c];
    let mut total_weights = vec![0u64; n_c];
    for (i, &v) in verts.iter().enumerate() {
        clusters[assign[i]].insert(v);
        total_weights[assign[i]] += g.weight(v);
    }
    debug_assert!(clusters.iter().all(|c| !c.is_empty()));
    Clustering {
        clusters,
        total_weights,
    }
}

/// Moves, for each empty cluster, the point farthest from its current
/// centroid (ties: smallest point index) out of a cluster that can spare one.
fn repair_empty_clusters(
    feats: &[FeatureVector],
    centers: &[[f64; 2]],
    assign: &mut [usize],
    n_c: usize,
) {
    let mut counts = vec![0usize; n_c];
    for &a in assign.iter() {
        counts[a] += 1;
    }
    for empty in 0..n_c {
        if counts[empty] > 0 {
            continue;
        }
        let mut donor: Option<(usize, f64)> = None;
        for (i, f) in feats.iter().enumerate() {
            if counts[assign[i]] < 2 {
                continue;
            }
            let d = f.dist2(&centers[assign[i]]);
            if donor.is_none_or(|(_, best)| d > best) {
                donor = Some((i, d));
            }
        }
        let (i, _) = donor.expect("a cluster with at least two points exists");
        counts[assign[i]] -= 1;
        assign[i] = empty;
        counts[empty] = 1;
    }
}
