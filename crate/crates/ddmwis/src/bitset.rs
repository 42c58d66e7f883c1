//! Compact vertex sets backed by `u64` blocks.
//!
//! Every set created for a universe of `n` vertices carries exactly
//! `ceil(n / 64)` blocks with the unused high bits kept at zero, so `Eq` and
//! `Hash` can operate on the raw blocks. Sets over the same graph can be
//! combined freely; mixing universes is a bug caught by debug assertions.

use std::fmt;

use smallvec::SmallVec;

const BLOCK_BITS: usize = 64;

/// A set of vertex indices over a fixed universe `0..n`.
///
/// The ordering implemented by [`Ord`] is the ascending lexicographic order
/// of the sorted index sequences: `{}` < `{0}` < `{0, 1}` < `{0, 2}` < `{1}`.
/// This is the tie-breaking order used everywhere a deterministic choice
/// among equal-valued nodes is needed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    blocks: SmallVec<[u64; 2]>,
}

impl VertexSet {
    /// The empty set over a universe of `n` vertices.
    pub fn empty(n: usize) -> Self {
        VertexSet {
            blocks: SmallVec::from_elem(0, n.div_ceil(BLOCK_BITS)),
        }
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut set = Self::empty(n);
        for block in set.blocks.iter_mut() {
            *block = u64::MAX;
        }
        if !n.is_multiple_of(BLOCK_BITS) {
            if let Some(last) = set.blocks.last_mut() {
                *last = (1u64 << (n % BLOCK_BITS)) - 1;
            }
        }
        set
    }

    /// Builds a set from an iterator of indices.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(n);
        for v in indices {
            set.insert(v);
        }
        set
    }

    /// Number of vertices the underlying blocks can address.
    pub fn capacity(&self) -> usize {
        self.blocks.len() * BLOCK_BITS
    }

    pub fn contains(&self, v: usize) -> bool {
        match self.blocks.get(v / BLOCK_BITS) {
            Some(block) => block & (1u64 << (v % BLOCK_BITS)) != 0,
            None => false,
        }
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.capacity(), "vertex {v} outside universe");
        self.blocks[v / BLOCK_BITS] |= 1u64 << (v % BLOCK_BITS);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.capacity() {
            self.blocks[v / BLOCK_BITS] &= !(1u64 << (v % BLOCK_BITS));
        }
    }

    /// Number of elements in the set.
    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    /// Removes every element of `other` from `self`.
    pub fn subtract(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    /// `|self ∩ other|` without materializing the intersection.
    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        for (i, &block) in self.blocks.iter().enumerate() {
            if block != 0 {
                return Some(i * BLOCK_BITS + block.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterates over the elements in ascending order.
    pub fn iter(&self) -> SetBits<'_> {
        SetBits {
            blocks: &self.blocks,
            block_idx: 0,
            current: self.blocks.first().copied().unwrap_or(0),
        }
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = SetBits<'a>;

    fn into_iter(self) -> SetBits<'a> {
        self.iter()
    }
}

/// Iterator over the indices stored in a [`VertexSet`].
pub struct SetBits<'a> {
    blocks: &'a [u64],
    block_idx: usize,
    current: u64,
}

impl Iterator for SetBits<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.block_idx += 1;
            if self.block_idx >= self.blocks.len() {
                return None;
            }
            self.current = self.blocks[self.block_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.block_idx * BLOCK_BITS + bit)
    }
}
