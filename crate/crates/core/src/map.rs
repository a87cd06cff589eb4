//! Collision maps and their highlighted-matrix representation.
//!
//! A collision map for `k` particles and expansion depth `n` assigns to each
//! new particle `k+l` (`l = 1..=n`) the earlier particle `μ(k+l) < k+l` it is
//! contracted into. Entry `mu[l-1]` stores `μ(k+l)`; all values are 1-based.

use alloc::vec::Vec;

use crate::{CoreError, Result};

/// Largest number of maps [`enumerate_maps`] will materialize.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CollisionMap {
    k: usize,
    mu: Vec<usize>,
}

impl CollisionMap {
    pub fn new(k: usize, mu: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(CoreError::InvalidMap("k must be positive"));
        }
        if mu.is_empty() {
            return Err(CoreError::InvalidMap("n must be positive"));
        }
        for (i, &m) in mu.iter().enumerate() {
            // column l = i+1 may point at rows 1..=k+l-1
            if m == 0 || m > k + i {
                return Err(CoreError::InvalidMap("entry outside 1..=k+l-1"));
            }
        }
        Ok(Self { k, mu })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// The raw entries, `mu()[l-1] = μ(k+l)`.
    pub fn mu(&self) -> &[usize] {
        &self.mu
    }

    /// `μ(k+l)` for the 1-based column `l`.
    pub fn target(&self, l: usize) -> usize {
        self.mu[l - 1]
    }

    pub fn to_matrix(&self) -> HighlightedMatrix {
        HighlightedMatrix {
            k: self.k,
            highlight: self.mu.clone(),
        }
    }

    pub fn from_matrix(m: &HighlightedMatrix) -> Self {
        // HighlightedMatrix already upholds the map invariants.
        Self {
            k: m.k,
            mu: m.highlight.clone(),
        }
    }
}

/// `(k+n−1) × n` matrix with exactly one highlighted entry per column.
///
/// Column `l` highlights row `highlight[l-1]`; rows below the staircase
/// (`row > k+l−1`) are structurally zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HighlightedMatrix {
    k: usize,
    highlight: Vec<usize>,
}

impl HighlightedMatrix {
    pub fn new(k: usize, highlight: Vec<usize>) -> Result<Self> {
        CollisionMap::new(k, highlight).map(|m| m.to_matrix())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.highlight.len()
    }

    pub fn rows(&self) -> usize {
        self.k + self.n() - 1
    }

    pub fn highlights(&self) -> &[usize] {
        &self.highlight
    }

    /// Highlighted `(row, column)` positions, both 1-based, in column order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.highlight.iter().enumerate().map(|(i, &row)| (row, i + 1))
    }

    pub fn is_highlighted(&self, row: usize, col: usize) -> bool {
        col >= 1 && col <= self.n() && self.highlight[col - 1] == row
    }
}

impl From<&CollisionMap> for HighlightedMatrix {
    fn from(m: &CollisionMap) -> Self {
        m.to_matrix()
    }
}

impl From<&HighlightedMatrix> for CollisionMap {
    fn from(m: &HighlightedMatrix) -> Self {
        CollisionMap::from_matrix(m)
    }
}

pub fn map_to_matrix(m: &CollisionMap) -> HighlightedMatrix {
    m.to_matrix()
}

pub fn matrix_to_map(m: &HighlightedMatrix) -> CollisionMap {
    CollisionMap::from_matrix(m)
}

/// A bijection on `{1,…,n}`, stored 1-based: `sigma()[i-1] = σ(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        let mut seen = alloc::vec![false; n];
        for &s in &sigma {
            if s == 0 || s > n || seen[s - 1] {
                return Err(CoreError::InvalidPermutation);
            }
            seen[s - 1] = true;
        }
        Ok(Self(sigma))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &s)| s == i + 1)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Self(inv)
    }

    /// Exchanges the images of `i` and `i+1`.
    pub fn swap_adjacent(&mut self, i: usize) {
        self.0.swap(i - 1, i);
    }
}

/// Index of a time variable: `0` is the outer time `t`, `1..=n` the Duhamel times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeLabel(pub usize);

impl TimeLabel {
    pub const OUTER: TimeLabel = TimeLabel(0);

    pub fn index(self) -> usize {
        self.0
    }
}

/// `k(k+1)⋯(k+n−1)`, the number of collision maps, or `None` on overflow.
pub fn map_count(k: usize, n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, i| acc.checked_mul((k + i) as u128))
}

fn check_guard(k: usize, n: usize) -> Result<u64> {
    if k == 0 || n == 0 {
        return Err(CoreError::InvalidMap("k and n must be positive"));
    }
    let count = map_count(k, n).unwrap_or(u128::MAX);
    if count > ENUMERATION_LIMIT as u128 {
        return Err(CoreError::SizeGuardExceeded {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(count as u64)
}

/// All collision maps for `(k, n)` in lexicographic order of `mu`.
pub fn enumerate_maps(k: usize, n: usize) -> Result<Vec<CollisionMap>> {
    let count = check_guard(k, n)?;
    let mut out = Vec::with_capacity(count as usize);
    let mut mu = alloc::vec![1usize; n];
    loop {
        debug_assert!(mu.iter().enumerate().all(|(i, &m)| m <= k + i));
        out.push(CollisionMap { k, mu: mu.clone() });
        // odometer, last column fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if mu[i] < k + i {
                mu[i] += 1;
                break;
            }
            mu[i] = 1;
        }
    }
}
