//! The board game: acceptable moves on highlighted matrices augmented with a
//! row of time labels, reduction to special upper echelon form, and the
//! partition of all collision maps into echelon classes.
//!
//! A [`BoardState`] pairs a map with its time row: column `l` carries the
//! time label `t_{σ⁻¹(l)}`. The integrand of the map read with that time row
//! over the standard ordered simplex equals the integral `I(μ, σ)` over the
//! simplex `{t ≥ t_σ(1) ≥ … ≥ t_σ(n)}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::map::{enumerate_maps, CollisionMap, HighlightedMatrix, Permutation};
use crate::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoardState {
    map: CollisionMap,
    /// `time_row.apply(l)` is the index of the time label written above column `l`.
    time_row: Permutation,
}

impl BoardState {
    /// The board of `I(μ, id)`: column `l` carries `t_l`.
    pub fn new(map: CollisionMap) -> Self {
        let n = map.n();
        Self {
            map,
            time_row: Permutation::identity(n),
        }
    }

    pub fn with_time_row(map: CollisionMap, time_row: Permutation) -> Result<Self> {
        if time_row.len() != map.n() {
            return Err(CoreError::InvalidPermutation);
        }
        Ok(Self { map, time_row })
    }

    pub fn map(&self) -> &CollisionMap {
        &self.map
    }

    pub fn matrix(&self) -> HighlightedMatrix {
        self.map.to_matrix()
    }

    pub fn time_row(&self) -> &Permutation {
        &self.time_row
    }

    /// The ordering permutation `σ` of the integration simplex (inverse of the time row).
    pub fn sigma(&self) -> Permutation {
        self.time_row.inverse()
    }

    /// Whether an acceptable move is allowed at column `j` (1-based).
    pub fn can_move(&self, j: usize) -> bool {
        j >= 1 && j < self.map.n() && self.map.target(j + 1) < self.map.target(j)
    }

    /// Columns at which an acceptable move is currently allowed.
    pub fn legal_moves(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.map.n()).filter(move |&j| self.can_move(j))
    }

    /// The three simultaneous exchanges of a move at column `j`, without the
    /// descent check. Fails only if the result leaves the staircase, which
    /// happens when column `j+1` highlights row `k+j`. On boards where it
    /// succeeds the transformation is an involution.
    pub fn exchange(&self, j: usize) -> Result<Self> {
        let k = self.map.k();
        let mut mu = self.map.mu().to_vec();
        mu.swap(j - 1, j);
        let (lo, hi) = (k + j, k + j + 1);
        for row in mu.iter_mut() {
            if *row == lo {
                *row = hi;
            } else if *row == hi {
                *row = lo;
            }
        }
        let mut time_row = self.time_row.clone();
        time_row.swap_adjacent(j);
        Ok(Self {
            map: CollisionMap::new(k, mu)?,
            time_row,
        })
    }
}

/// Applies the acceptable move at column `j`.
///
/// Requires `μ(k+j+1) < μ(k+j)`. Exchanges the highlights of columns `j` and
/// `j+1`, the highlights of rows `k+j` and `k+j+1`, and the time labels of
/// columns `j` and `j+1`.
pub fn acceptable_move(b: &BoardState, j: usize) -> Result<BoardState> {
    if !b.can_move(j) {
        return Err(CoreError::MoveNotApplicable { column: j });
    }
    b.exchange(j)
}

/// True iff the highlighted rows are nondecreasing from left to right.
pub fn is_upper_echelon(m: &HighlightedMatrix) -> bool {
    m.highlights().windows(2).all(|w| w[0] <= w[1])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub representative: HighlightedMatrix,
    /// Ordering permutation of the simplex the representative is integrated over.
    pub sigma: Permutation,
    /// Columns of the applied moves, in order.
    pub moves: Vec<usize>,
}

impl Reduction {
    pub fn final_board(&self) -> BoardState {
        BoardState {
            map: CollisionMap::from_matrix(&self.representative),
            time_row: self.sigma.inverse(),
        }
    }
}

/// Brings a map to special upper echelon form by acceptable moves.
///
/// Rows are swept top-down: the smallest remaining highlighted row is moved
/// into the leftmost free column by adjacent moves, one highlight at a time.
/// Relabeling only touches rows `k+j, k+j+1` above the row being swept, so
/// swept columns are never disturbed and at most `n(n−1)/2` moves are made.
pub fn reduce_to_echelon(m: &CollisionMap) -> Reduction {
    let mut board = BoardState::new(m.clone());
    let mut moves = Vec::new();
    let n = m.n();
    for placed in 0..n {
        let mu = board.map.mu();
        let (offset, _) = mu[placed..]
            .iter()
            .enumerate()
            .min_by_key(|&(i, &row)| (row, i))
            .expect("nonempty suffix");
        let mut col = placed + offset + 1;
        while col > placed + 1 {
            board = acceptable_move(&board, col - 1).expect("row sweep only moves a strictly smaller row leftwards");
            moves.push(col - 1);
            col -= 1;
        }
    }
    debug_assert!(is_upper_echelon(&board.matrix()));
    Reduction {
        representative: board.matrix(),
        sigma: board.sigma(),
        moves,
    }
}

/// Replays a move sequence from the identity-time board of `m`.
pub fn replay_moves(m: &CollisionMap, moves: &[usize]) -> Result<BoardState> {
    moves
        .iter()
        .try_fold(BoardState::new(m.clone()), |b, &j| acceptable_move(&b, j))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchelonClass {
    pub representative: HighlightedMatrix,
    /// Maps reducing to the representative, each with its simplex permutation.
    pub members: Vec<(CollisionMap, Permutation)>,
}

impl EchelonClass {
    /// The permutations whose simplices make up the domain `D` of the class.
    pub fn domain(&self) -> Vec<Permutation> {
        self.members.iter().map(|(_, s)| s.clone()).collect()
    }

    /// Whether distinct members carry distinct permutations.
    pub fn has_distinct_permutations(&self) -> bool {
        let mut sigmas: Vec<&Permutation> = self.members.iter().map(|(_, s)| s).collect();
        sigmas.sort();
        sigmas.windows(2).all(|w| w[0] != w[1])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Partitions `M_{k,n}` into echelon classes, ordered by representative.
/// Members keep the lexicographic order of [`enumerate_maps`].
pub fn partition_classes(k: usize, n: usize) -> Result<Vec<EchelonClass>> {
    let mut classes: BTreeMap<HighlightedMatrix, Vec<(CollisionMap, Permutation)>> = BTreeMap::new();
    for m in enumerate_maps(k, n)? {
        let r = reduce_to_echelon(&m);
        classes.entry(r.representative).or_default().push((m, r.sigma));
    }
    Ok(classes
        .into_iter()
        .map(|(representative, members)| EchelonClass {
            representative,
            members,
        })
        .collect())
}

/// `2^{k+2n−2}`, the upper bound on the number of echelon classes.
pub fn echelon_class_bound(k: usize, n: usize) -> u128 {
    1u128 << (k + 2 * n - 2)
}

/// All boards reachable from `I(m, id)` through acceptable moves.
#[derive(Debug, Clone, Default)]
pub struct ReductionGraph {
    pub nodes: Vec<BoardState>,
    /// `(from, to, column)` with node indices into `nodes`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl ReductionGraph {
    /// Nodes without outgoing moves; these are exactly the echelon boards reached.
    pub fn sinks(&self) -> Vec<&BoardState> {
        let mut has_out = alloc::vec![false; self.nodes.len()];
        for &(from, _, _) in &self.edges {
            has_out[from] = true;
        }
        self.nodes
            .iter()
            .zip(has_out)
            .filter_map(|(b, out)| (!out).then_some(b))
            .collect()
    }
}

pub fn reduction_graph(m: &CollisionMap) -> ReductionGraph {
    let mut graph = ReductionGraph::default();
    let mut index: BTreeMap<BoardState, usize> = BTreeMap::new();
    let start = BoardState::new(m.clone());
    index.insert(start.clone(), 0);
    graph.nodes.push(start);
    let mut cursor = 0;
    while cursor < graph.nodes.len() {
        let board = graph.nodes[cursor].clone();
        for j in board.legal_moves().collect::<Vec<_>>() {
            let next = board.exchange(j).expect("legal moves stay in the staircase");
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = graph.nodes.len();
                    index.insert(next.clone(), id);
                    graph.nodes.push(next);
                    id
                }
            };
            graph.edges.push((cursor, id, j));
        }
        cursor += 1;
    }
    graph
}
