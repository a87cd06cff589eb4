//! Binary collision forests.
//!
//! Reading the contractions of a collision map from the innermost one
//! outwards, every particle slot carries a one-particle kernel. The internal
//! vertex `v_l` (the contraction `B_{μ(k+l);k+l}` at time `t_l`) merges two
//! kernels:
//!
//! * its *slot child* is what occupies slot `μ(k+l)` just after `v_l`: the
//!   next internal vertex `v_{l'}` (`l' > l`, smallest) contracting into the
//!   same slot, or else the leaf `u_{μ(k+l)}`;
//! * its *contracted child* is what occupies slot `k+l`: the smallest `v_{l'}`
//!   with `μ(k+l') = k+l`, or else the leaf `u_{k+l}`.
//!
//! Root `W_j` is attached to the first vertex contracting into slot `j`, or to
//! the leaf `u_j`. The result is `k` disjoint binary trees; the one holding
//! `v_n` is distinguished.

use alloc::vec::Vec;

use crate::map::{CollisionMap, TimeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Root(usize),
    Internal(usize),
    Leaf(usize),
}

impl Vertex {
    /// Time at which the kernel of this vertex is produced: `t_l` for `v_l`,
    /// the final time `t_n` for leaves, the outer time for roots.
    pub fn time(self, n: usize) -> TimeLabel {
        match self {
            Vertex::Root(_) => TimeLabel::OUTER,
            Vertex::Internal(l) => TimeLabel(l),
            Vertex::Leaf(_) => TimeLabel(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InternalVertex {
    pub l: usize,
    /// Slot the contraction lands in, `μ(k+l)`.
    pub slot: usize,
    /// Particle removed by the contraction, `k+l`.
    pub particle: usize,
    /// `κ₋`: the kernel that stays in `slot`.
    pub slot_child: Vertex,
    /// `κ₊`: the kernel contracted away from `particle`.
    pub contracted_child: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub root: usize,
    pub root_child: Vertex,
    /// Internal vertex indices `l`, increasing.
    pub internal: Vec<usize>,
    /// Leaf indices `i`, increasing.
    pub leaves: Vec<usize>,
}

impl Tree {
    pub fn m(&self) -> usize {
        self.internal.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeForest {
    map: CollisionMap,
    vertices: Vec<InternalVertex>,
    trees: Vec<Tree>,
    distinguished: usize,
}

impl TreeForest {
    pub fn k(&self) -> usize {
        self.map.k()
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    pub fn map(&self) -> &CollisionMap {
        &self.map
    }

    /// Internal vertex `v_l`, 1-based.
    pub fn vertex(&self, l: usize) -> &InternalVertex {
        &self.vertices[l - 1]
    }

    pub fn vertices(&self) -> &[InternalVertex] {
        &self.vertices
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Tree rooted at `W_j`, 1-based.
    pub fn tree(&self, j: usize) -> &Tree {
        &self.trees[j - 1]
    }

    /// 1-based index of the tree containing `v_n`.
    pub fn distinguished_index(&self) -> usize {
        self.distinguished
    }

    /// Internal-vertex counts `m_j` per tree.
    pub fn m(&self) -> Vec<usize> {
        self.trees.iter().map(Tree::m).collect()
    }

    /// The two children of every vertex, `(parent, child)`, tree by tree.
    pub fn edges(&self, j: usize) -> Vec<(Vertex, Vertex)> {
        let tree = self.tree(j);
        let mut edges = alloc::vec![(Vertex::Root(j), tree.root_child)];
        for &l in &tree.internal {
            let v = self.vertex(l);
            edges.push((Vertex::Internal(l), v.slot_child));
            edges.push((Vertex::Internal(l), v.contracted_child));
        }
        edges
    }

    /// Children of `v_l` in the order `(κ₋, κ₊)`.
    pub fn children(&self, l: usize) -> (Vertex, Vertex) {
        let v = self.vertex(l);
        (v.slot_child, v.contracted_child)
    }
}

/// Builds the collision forest of any map (echelon form is not required).
pub fn build_forest(m: &CollisionMap) -> TreeForest {
    let k = m.k();
    let n = m.n();
    let first_into = |slot: usize, after: usize| -> Option<usize> { (after + 1..=n).find(|&l| m.target(l) == slot) };

    let vertices: Vec<InternalVertex> = (1..=n)
        .map(|l| {
            let slot = m.target(l);
            let particle = k + l;
            InternalVertex {
                l,
                slot,
                particle,
                slot_child: first_into(slot, l).map_or(Vertex::Leaf(slot), Vertex::Internal),
                contracted_child: first_into(particle, l).map_or(Vertex::Leaf(particle), Vertex::Internal),
            }
        })
        .collect();

    let trees: Vec<Tree> = (1..=k)
        .map(|j| {
            let root_child = first_into(j, 0).map_or(Vertex::Leaf(j), Vertex::Internal);
            let mut internal = Vec::new();
            let mut leaves = Vec::new();
            let mut stack = alloc::vec![root_child];
            while let Some(v) = stack.pop() {
                match v {
                    Vertex::Internal(l) => {
                        internal.push(l);
                        let iv = &vertices[l - 1];
                        stack.push(iv.slot_child);
                        stack.push(iv.contracted_child);
                    }
                    Vertex::Leaf(i) => leaves.push(i),
                    Vertex::Root(_) => unreachable!("roots have no parent"),
                }
            }
            internal.sort_unstable();
            leaves.sort_unstable();
            Tree {
                root: j,
                root_child,
                internal,
                leaves,
            }
        })
        .collect();

    let distinguished = trees
        .iter()
        .position(|t| t.internal.contains(&n))
        .expect("v_n belongs to some tree")
        + 1;

    TreeForest {
        map: m.clone(),
        vertices,
        trees,
        distinguished,
    }
}

/// The one-particle factor of tree `j`, relabeled as a map with `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMap {
    pub j: usize,
    /// `sigma[α-1] = σ_j(α+1)`, empty for a bare root-leaf tree.
    pub sigma: Vec<usize>,
    /// Global times `t_{ℓ_{j,1}} < … < t_{ℓ_{j,m_j}}` the factor depends on.
    pub time_slots: Vec<TimeLabel>,
    pub distinguished: bool,
}

impl FactorMap {
    pub fn m(&self) -> usize {
        self.sigma.len()
    }

    /// `σ_j(r)` for `r = 2..=m_j+1`.
    pub fn sigma_of(&self, r: usize) -> usize {
        self.sigma[r - 2]
    }

    /// The factor as a one-particle collision map, if it has any vertex.
    pub fn as_map(&self) -> Option<CollisionMap> {
        (!self.sigma.is_empty())
            .then(|| CollisionMap::new(1, self.sigma.clone()).expect("relabeling is order preserving"))
    }
}

/// Relabels every tree by order-preserving compression of its particles:
/// root particle `j ↦ 1`, the particle `k+ℓ_{j,α}` of its `α`-th vertex `↦ α+1`.
pub fn extract_factor_maps(f: &TreeForest) -> Vec<FactorMap> {
    let k = f.k();
    f.trees()
        .iter()
        .map(|tree| {
            let relabel = |particle: usize| -> usize {
                if particle == tree.root {
                    1
                } else {
                    let l = particle - k;
                    tree.internal
                        .iter()
                        .position(|&x| x == l)
                        .expect("slot belongs to the same tree")
                        + 2
                }
            };
            let sigma = tree.internal.iter().map(|&l| relabel(f.vertex(l).slot)).collect();
            FactorMap {
                j: tree.root,
                sigma,
                time_slots: tree.internal.iter().map(|&l| TimeLabel(l)).collect(),
                distinguished: tree.root == f.distinguished_index(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::enumerate_maps;
    use alloc::vec;

    fn forest(k: usize, mu: &[usize]) -> TreeForest {
        build_forest(&CollisionMap::new(k, mu.to_vec()).unwrap())
    }

    #[test]
    fn worked_example_forest() {
        let f = forest(2, &[1, 2, 3, 3]);
        let t1 = f.tree(1);
        assert_eq!(t1.internal, vec![1, 3, 4]);
        assert_eq!(t1.leaves, vec![1, 3, 5, 6]);
        let t2 = f.tree(2);
        assert_eq!(t2.internal, vec![2]);
        assert_eq!(t2.leaves, vec![2, 4]);
        assert_eq!(f.distinguished_index(), 1);
        assert_eq!(f.m(), vec![3, 1]);
        // v4 carries the two distinguished leaves
        assert_eq!(f.children(4), (Vertex::Leaf(3), Vertex::Leaf(6)));
        assert_eq!(f.children(1), (Vertex::Leaf(1), Vertex::Internal(3)));
        assert_eq!(f.children(3), (Vertex::Internal(4), Vertex::Leaf(5)));
    }

    #[test]
    fn single_contraction() {
        let f = forest(2, &[1]);
        assert_eq!(f.tree(1).internal, vec![1]);
        assert_eq!(f.tree(1).leaves, vec![1, 3]);
        assert_eq!(f.tree(2).root_child, Vertex::Leaf(2));
        assert_eq!(f.tree(2).leaves, vec![2]);
        assert_eq!(f.distinguished_index(), 1);
        assert_eq!(f.m(), vec![1, 0]);

        for k in 1..=4 {
            for m in enumerate_maps(k, 1).unwrap() {
                let f = build_forest(&m);
                assert_eq!(f.m().iter().filter(|&&x| x == 1).count(), 1);
                assert_eq!(f.m().iter().sum::<usize>(), 1);
            }
        }
    }

    #[test]
    fn forest_invariants_exhaustive() {
        for k in 1..=3 {
            for n in 1..=5 {
                for m in enumerate_maps(k, n).unwrap() {
                    let f = build_forest(&m);
                    assert_eq!(f.m().iter().sum::<usize>(), n);
                    let mut all_leaves = Vec::new();
                    for t in f.trees() {
                        assert_eq!(t.leaves.len(), t.m() + 1);
                        all_leaves.extend_from_slice(&t.leaves);
                    }
                    all_leaves.sort_unstable();
                    assert_eq!(all_leaves, (1..=k + n).collect::<Vec<_>>());
                    let d = f.distinguished_index();
                    for t in f.trees() {
                        assert_eq!(t.internal.contains(&n), t.root == d);
                    }
                    assert!(matches!(f.children(n), (Vertex::Leaf(_), Vertex::Leaf(_))));
                }
            }
        }
    }

    #[test]
    fn worked_example_factor_maps() {
        let fms = extract_factor_maps(&forest(2, &[1, 2, 3, 3]));
        // relabeled operators B_{1,2}, B_{2,3}, B_{2,4}
        assert_eq!(fms[0].sigma, vec![1, 2, 2]);
        assert_eq!(fms[0].time_slots, vec![TimeLabel(1), TimeLabel(3), TimeLabel(4)]);
        assert!(fms[0].distinguished);
        assert_eq!(fms[1].sigma, vec![1]);
        assert_eq!(fms[1].time_slots, vec![TimeLabel(2)]);
        assert!(!fms[1].distinguished);

        let fms = extract_factor_maps(&forest(2, &[1]));
        assert!(fms[1].sigma.is_empty());
        assert!(fms[1].time_slots.is_empty());
    }

    #[test]
    fn factor_maps_rebuild_their_trees() {
        for k in 1..=3 {
            for n in 1..=5 {
                for m in enumerate_maps(k, n).unwrap() {
                    let f = build_forest(&m);
                    let mut slots: Vec<usize> = Vec::new();
                    for fm in extract_factor_maps(&f) {
                        slots.extend(fm.time_slots.iter().map(|t| t.index()));
                        assert!(fm.time_slots.windows(2).all(|w| w[0] < w[1]));
                        let Some(local) = fm.as_map() else {
                            assert_eq!(f.tree(fm.j).m(), 0);
                            continue;
                        };
                        assert_eq!(fm.sigma_of(2), 1);
                        let g = build_forest(&local);
                        let tree = f.tree(fm.j);
                        // vertex α of the factor is vertex ℓ_{j,α} of the forest
                        let to_global = |v: Vertex| match v {
                            Vertex::Internal(a) => Vertex::Internal(tree.internal[a - 1]),
                            other => other,
                        };
                        assert_eq!(to_global(g.tree(1).root_child), tree.root_child.internal_or_leaf());
                        for (a, &l) in tree.internal.iter().enumerate() {
                            let (s, c) = g.children(a + 1);
                            let (gs, gc) = f.children(l);
                            assert_eq!(to_global(s).internal_or_leaf(), gs.internal_or_leaf());
                            assert_eq!(to_global(c).internal_or_leaf(), gc.internal_or_leaf());
                        }
                    }
                    slots.sort_unstable();
                    assert_eq!(slots, (1..=n).collect::<Vec<_>>());
                }
            }
        }
    }

    impl Vertex {
        // leaves are compared by kind only: their labels differ after relabeling
        fn internal_or_leaf(self) -> Vertex {
            match self {
                Vertex::Leaf(_) => Vertex::Leaf(0),
                other => other,
            }
        }
    }
}
