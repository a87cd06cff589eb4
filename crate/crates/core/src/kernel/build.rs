//! Recursive construction of the one-particle kernels `Θ_α`.

use alloc::vec::Vec;

use super::expr::{ExprArena, ExprId};
use crate::forest::{extract_factor_maps, FactorMap, TreeForest, Vertex};
use crate::map::TimeLabel;
use crate::{CoreError, Result};

/// Largest expansion depth the symbolic engine accepts.
pub const DEPTH_CAP: usize = 12;

/// One summand `sign · ψ(x) · conj(χ(x′))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub sign: i8,
    pub psi: ExprId,
    pub chi: ExprId,
}

/// A signed sum of factorized one-particle kernels, all produced at `time`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelExpr {
    /// Vertex index inside the factor (`1..=m_j`), `0` for the outer kernel.
    pub alpha: usize,
    pub vertex: Vertex,
    pub time: TimeLabel,
    pub terms: Vec<Term>,
}

impl KernelExpr {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sign_sum(&self) -> i64 {
        self.terms.iter().map(|t| t.sign as i64).sum()
    }
}

/// All kernels of one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorKernel {
    pub factor: FactorMap,
    /// `theta[α-1] = Θ_α`.
    pub theta: Vec<KernelExpr>,
    /// `J¹_j = U(t − t_{ℓ_{j,1}}) Θ_1`, or the free evolution of `|φ⟩⟨φ|`
    /// for a tree without internal vertices.
    pub outer: KernelExpr,
}

impl FactorKernel {
    pub fn j(&self) -> usize {
        self.factor.j
    }

    pub fn m(&self) -> usize {
        self.factor.m()
    }

    pub fn is_distinguished(&self) -> bool {
        self.factor.distinguished
    }

    pub fn theta(&self, alpha: usize) -> &KernelExpr {
        &self.theta[alpha - 1]
    }
}

/// Kernels of every tree of a forest, sharing one arena.
#[derive(Debug, Clone)]
pub struct ForestKernels {
    pub arena: ExprArena,
    pub factors: Vec<FactorKernel>,
}

impl ForestKernels {
    pub fn factor(&self, j: usize) -> &FactorKernel {
        &self.factors[j - 1]
    }

    pub fn distinguished(&self) -> &FactorKernel {
        self.factors
            .iter()
            .find(|f| f.is_distinguished())
            .expect("one factor is distinguished")
    }
}

/// `U(t_to − …)`: propagate both sides of every term to `to`.
fn propagate(arena: &mut ExprArena, terms: &[Term], from: TimeLabel, to: TimeLabel) -> Vec<Term> {
    terms
        .iter()
        .map(|t| Term {
            sign: t.sign,
            psi: arena.prop(to, from, t.psi),
            chi: arena.prop(to, from, t.chi),
        })
        .collect()
}

/// `B_{1,2}[A ⊗ C] = B⁺ − B⁻` on factorized two-particle kernels.
fn contract(arena: &mut ExprArena, slot: &[Term], contracted: &[Term]) -> Vec<Term> {
    let mut out = Vec::with_capacity(2 * slot.len() * contracted.len());
    for a in slot {
        for c in contracted {
            let sign = a.sign * c.sign;
            // x₂ = x₂′ = x
            let chi_c_bar = arena.conj(c.chi);
            out.push(Term {
                sign,
                psi: arena.prod3(a.psi, c.psi, chi_c_bar),
                chi: a.chi,
            });
            // x₂ = x₂′ = x′
            let psi_c_bar = arena.conj(c.psi);
            out.push(Term {
                sign: -sign,
                psi: a.psi,
                chi: arena.prod3(a.chi, psi_c_bar, c.chi),
            });
        }
    }
    out
}

fn check_depth(f: &TreeForest) -> Result<()> {
    if f.n() > DEPTH_CAP {
        return Err(CoreError::DepthCapExceeded {
            n: f.n(),
            cap: DEPTH_CAP,
        });
    }
    Ok(())
}

/// Builds `Θ_{m_j}, …, Θ_1` and `J¹_j` for the tree of `fm`.
pub fn build_kernel(arena: &mut ExprArena, f: &TreeForest, fm: &FactorMap) -> Result<FactorKernel> {
    check_depth(f)?;
    let tree = f.tree(fm.j);
    let leaf_time = TimeLabel(f.n());
    let phi = arena.phi();
    let leaf = [Term {
        sign: 1,
        psi: phi,
        chi: phi,
    }];

    let m = tree.m();
    let mut theta: Vec<Option<KernelExpr>> = alloc::vec![None; m];
    let local = |l: usize| tree.internal.iter().position(|&x| x == l).expect("vertex in tree");

    // children carry larger indices, so decreasing α sees them first
    for alpha in (1..=m).rev() {
        let l = tree.internal[alpha - 1];
        let time = TimeLabel(l);
        let child_terms = |arena: &mut ExprArena, v: Vertex| -> Vec<Term> {
            match v {
                Vertex::Leaf(_) => propagate(arena, &leaf, leaf_time, time),
                Vertex::Internal(c) => {
                    let k = theta[local(c)].as_ref().expect("child built first");
                    let terms = k.terms.clone();
                    propagate(arena, &terms, k.time, time)
                }
                Vertex::Root(_) => unreachable!("roots are never children"),
            }
        };
        let (slot_child, contracted_child) = f.children(l);
        let a = child_terms(arena, slot_child);
        let c = child_terms(arena, contracted_child);
        let terms = contract(arena, &a, &c);
        theta[alpha - 1] = Some(KernelExpr {
            alpha,
            vertex: Vertex::Internal(l),
            time,
            terms,
        });
    }
    let theta: Vec<KernelExpr> = theta.into_iter().map(|k| k.expect("all built")).collect();

    let outer_terms = match theta.first() {
        Some(k) => propagate(arena, &k.terms, k.time, TimeLabel::OUTER),
        None => propagate(arena, &leaf, leaf_time, TimeLabel::OUTER),
    };
    Ok(FactorKernel {
        factor: fm.clone(),
        theta,
        outer: KernelExpr {
            alpha: 0,
            vertex: Vertex::Root(fm.j),
            time: TimeLabel::OUTER,
            terms: outer_terms,
        },
    })
}

/// Kernels for every tree of `f`.
pub fn build_kernels(f: &TreeForest) -> Result<ForestKernels> {
    check_depth(f)?;
    let mut arena = ExprArena::new();
    let factors = extract_factor_maps(f)
        .iter()
        .map(|fm| build_kernel(&mut arena, f, fm))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestKernels { arena, factors })
}

/// The terms of `k` as `(sign, ψ, χ)` triples, in construction order.
pub fn expand_term_signs(k: &KernelExpr) -> Vec<(i8, ExprId, ExprId)> {
    k.terms.iter().map(|t| (t.sign, t.psi, t.chi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::build_forest;
    use crate::kernel::expr::Node;
    use crate::map::{enumerate_maps, CollisionMap};
    use alloc::vec;

    fn kernels(k: usize, mu: &[usize]) -> ForestKernels {
        build_kernels(&build_forest(&CollisionMap::new(k, mu.to_vec()).unwrap())).unwrap()
    }

    #[test]
    fn worked_example_term_counts() {
        let fk = kernels(2, &[1, 2, 3, 3]);
        let d = fk.factor(1);
        assert!(d.is_distinguished());
        let counts: Vec<_> = d.theta.iter().map(KernelExpr::len).collect();
        assert_eq!(counts, vec![8, 4, 2]);
        assert_eq!(fk.factor(2).theta(1).len(), 2);
        assert_eq!(d.outer.len(), 8);
    }

    #[test]
    fn base_case_is_cubic_minus_mirror() {
        let fk = kernels(2, &[1, 2, 3, 3]);
        let base = fk.factor(1).theta(3);
        let a = &fk.arena;
        let signs: Vec<_> = expand_term_signs(base).iter().map(|t| t.0).collect();
        assert_eq!(signs, vec![1, -1]);
        assert_eq!(a.node(base.terms[0].psi), Node::Cubic);
        assert_eq!(a.node(base.terms[0].chi), Node::Phi);
        assert_eq!(a.node(base.terms[1].psi), Node::Phi);
        assert_eq!(a.node(base.terms[1].chi), Node::Cubic);

        let theta2 = fk.factor(1).theta(2);
        let signs: Vec<_> = theta2.terms.iter().map(|t| t.sign).collect();
        assert_eq!(signs, vec![1, -1, -1, 1]);
    }

    #[test]
    fn regular_factor_matches_hand_computation() {
        let fk = kernels(2, &[1, 2, 3, 3]);
        let a = &fk.arena;
        let t = fk.factor(2).theta(1);
        assert_eq!(a.render(t.terms[0].psi), "(|U_{2,4}φ|²U_{2,4}φ)");
        assert_eq!(a.render(t.terms[0].chi), "U_{2,4}φ");
        assert_eq!(a.render(t.terms[1].psi), "U_{2,4}φ");
        assert_eq!(a.render(t.terms[1].chi), "(|U_{2,4}φ|²U_{2,4}φ)");
        assert_eq!(t.terms[1].sign, -1);
    }

    #[test]
    fn depth_one_is_the_base_case() {
        let fk = kernels(1, &[1]);
        let t = fk.factor(1).theta(1);
        assert_eq!(t.len(), 2);
        assert_eq!(fk.arena.node(t.terms[0].psi), Node::Cubic);
    }

    #[test]
    fn bare_leaf_factor() {
        let fk = kernels(2, &[1]);
        let f2 = fk.factor(2);
        assert!(f2.theta.is_empty());
        assert_eq!(f2.outer.len(), 1);
        assert_eq!(fk.arena.render(f2.outer.terms[0].psi), "U_{0,1}φ");
    }

    #[test]
    fn depth_cap() {
        let mu: Vec<usize> = vec![1; DEPTH_CAP + 1];
        let f = build_forest(&CollisionMap::new(1, mu).unwrap());
        assert!(matches!(build_kernels(&f), Err(CoreError::DepthCapExceeded { .. })));
    }

    #[test]
    fn exhaustive_structure() {
        for k in 1..=2 {
            for n in 1..=5 {
                for m in enumerate_maps(k, n).unwrap() {
                    let fk = build_kernels(&build_forest(&m)).unwrap();
                    for f in &fk.factors {
                        let mj = f.m();
                        for (i, th) in f.theta.iter().enumerate() {
                            let alpha = i + 1;
                            assert!(th.len() <= 1 << (mj - alpha + 1));
                            assert_eq!(th.sign_sum(), 0);
                        }
                        for t in &f.outer.terms {
                            let cubics = fk.arena.cubic_count(t.psi) + fk.arena.cubic_count(t.chi);
                            assert_eq!(cubics, usize::from(f.is_distinguished()));
                            let atoms = fk.arena.atom_count(t.psi) + fk.arena.atom_count(t.chi);
                            assert_eq!(atoms, 2 * mj + 2);
                        }
                    }
                }
            }
        }
    }
}
