//! Numerical evaluation of the Duhamel integrands `J^k(t_0,…,t_n; μ)`.
//!
//! `times[0]` is the outer time `t` and `times[l]` is `t_l`. The innermost
//! state is `(|φ_n⟩⟨φ_n|)^{⊗(k+n)}`, where `φ_n` depends on [`FinalState`].

use num_complex::Complex64;

use gpbg_core::forest::TreeForest;
use gpbg_core::kernel::{ExprArena, ForestKernels, KernelExpr, Node};
use gpbg_core::map::CollisionMap;

use crate::error::{GpbgError, Result};
use crate::grid::GridFunction;
use crate::tensor::{check_guard, contract_pair, DensityTensor};

/// Largest number of expanded products the factorized evaluator accepts.
pub const TERM_CAP: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FinalState {
    /// `φ_n = φ` whatever `t_n` is.
    Fixed,
    /// `φ_n = e^{i t_n Δ} φ`.
    #[default]
    FreeEvolved,
}

impl FinalState {
    pub fn state(self, phi: &GridFunction, t_n: f64) -> GridFunction {
        match self {
            FinalState::Fixed => phi.clone(),
            FinalState::FreeEvolved => phi.propagate(t_n),
        }
    }
}

fn check_times(m: &CollisionMap, times: &[f64]) -> Result<()> {
    if times.len() != m.n() + 1 {
        return Err(GpbgError::Invalid(format!(
            "{} times given, {} expected",
            times.len(),
            m.n() + 1
        )));
    }
    Ok(())
}

/// Full-tensor evaluation by alternating contraction and propagation.
pub fn evaluate_j_full(m: &CollisionMap, times: &[f64], phi: &GridFunction, fin: FinalState) -> Result<DensityTensor> {
    check_times(m, times)?;
    let (k, n) = (m.k(), m.n());
    check_guard(phi.grid.n, k + n)?;
    let mut gamma = DensityTensor::factorized(&fin.state(phi, times[n]), k + n)?;
    for l in (1..=n).rev() {
        gamma = contract_pair(&gamma, m.target(l))?;
        gamma = gamma.propagate(times[l - 1] - times[l]);
    }
    Ok(gamma)
}

/// Evaluates every distinct subexpression once.
struct ExprEval<'a> {
    arena: &'a ExprArena,
    times: &'a [f64],
    phi: GridFunction,
    memo: Vec<Option<GridFunction>>,
}

impl<'a> ExprEval<'a> {
    fn eval(&mut self, id: gpbg_core::kernel::ExprId) -> GridFunction {
        if let Some(v) = &self.memo[id.index()] {
            return v.clone();
        }
        let v = match self.arena.node(id) {
            Node::Phi => self.phi.clone(),
            Node::Cubic => self.phi.cubic(),
            Node::Conj(e) => self.eval(e).conj(),
            Node::Prop { from, to, arg } => {
                let dt = self.times[from.index()] - self.times[to.index()];
                self.eval(arg).propagate(dt)
            }
            Node::Prod3([a, b, c]) => {
                let (a, b, c) = (self.eval(a), self.eval(b), self.eval(c));
                a.mul(&b).mul(&c)
            }
        };
        self.memo[id.index()] = Some(v.clone());
        v
    }

    fn kernel(&mut self, k: &KernelExpr) -> DensityTensor {
        let grid = self.phi.grid;
        let mut out = DensityTensor::zeros(grid, 1).expect("one-particle kernels fit");
        for t in &k.terms {
            let psi = self.eval(t.psi);
            let chi = self.eval(t.chi);
            out.add_scaled(&DensityTensor::outer(&psi, &chi), Complex64::new(t.sign as f64, 0.0));
        }
        out
    }
}

/// The one-particle factors `J¹_1, …, J¹_k` of `J^k`.
pub fn evaluate_j_factorized(
    forest: &TreeForest,
    kernels: &ForestKernels,
    times: &[f64],
    phi: &GridFunction,
    fin: FinalState,
) -> Result<Vec<DensityTensor>> {
    check_times(forest.map(), times)?;
    let terms: u128 = kernels.factors.iter().map(|f| f.outer.len() as u128).product();
    if terms > TERM_CAP as u128 {
        return Err(GpbgError::TermCapExceeded { terms, cap: TERM_CAP });
    }
    let mut ev = ExprEval {
        arena: &kernels.arena,
        times,
        phi: fin.state(phi, times[forest.n()]),
        memo: vec![None; kernels.arena.len()],
    };
    Ok(kernels.factors.iter().map(|f| ev.kernel(&f.outer)).collect())
}

/// Cheap scalar summary of `J^k = ⊗_j J¹_j`: its value at the probe pair
/// `(x_p,…,x_p; x′_p,…,x′_p)` and its discrete trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub value: Complex64,
    pub trace: Complex64,
}

impl Probe {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            trace: Complex64::new(0.0, 0.0),
        }
    }

    pub fn of_factors(factors: &[DensityTensor]) -> Self {
        let n = factors[0].grid.n;
        // off-diagonal and off-centre so that symmetric cancellations cannot hide errors
        let (p, q) = (n / 4 + 1, n / 2 + 3 % n);
        Self {
            value: factors.iter().map(|f| f.values[p * n + q]).product(),
            trace: factors.iter().map(DensityTensor::trace).product(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, w: f64) {
        self.value += other.value * w;
        self.trace += other.trace * w;
    }

    fn norm(&self) -> f64 {
        (self.value.norm_sqr() + self.trace.norm_sqr()).sqrt()
    }

    /// Relative difference of `(value, trace)` as a vector in `ℂ²`. The
    /// trace of `J^k` vanishes for `n ≥ 1`, so it cannot be compared alone.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let d = Probe {
            value: self.value - other.value,
            trace: self.trace - other.trace,
        };
        d.norm() / self.norm().max(other.norm()).max(1e-30)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rel_l2_diff, Grid};
    use gpbg_core::forest::build_forest;
    use gpbg_core::kernel::build_kernels;
    use gpbg_core::map::enumerate_maps;

    fn phi(g: Grid) -> GridFunction {
        GridFunction::from_fn(g, |x| Complex64::new(x.cos() + 0.2, 0.4 * (2.0 * x).sin()))
    }

    #[test]
    fn equal_times_give_the_base_case() {
        let g = Grid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let p = phi(g);
        let m = CollisionMap::new(1, vec![1]).unwrap();
        let j = evaluate_j_full(&m, &[0.4, 0.4], &p, FinalState::Fixed).unwrap();
        let mut expected = DensityTensor::outer(&p.cubic(), &p);
        expected.add_scaled(&DensityTensor::outer(&p, &p.cubic()), Complex64::new(-1.0, 0.0));
        assert!(rel_l2_diff(&j.values, &expected.values) < 1e-13);
    }

    #[test]
    fn full_matches_factorized_small() {
        let g = Grid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let p = phi(g);
        let times = [0.5, 0.3, -0.2, 0.7];
        for (k, n) in [(1, 1), (1, 2), (2, 1)] {
            for m in enumerate_maps(k, n).unwrap() {
                let f = build_forest(&m);
                let kern = build_kernels(&f).unwrap();
                for fin in [FinalState::Fixed, FinalState::FreeEvolved] {
                    let full = evaluate_j_full(&m, &times[..=n], &p, fin).unwrap();
                    let parts = evaluate_j_factorized(&f, &kern, &times[..=n], &p, fin).unwrap();
                    let prod = DensityTensor::tensor_product(&parts).unwrap();
                    let err = rel_l2_diff(&full.values, &prod.values);
                    assert!(err < 1e-10, "{m:?}: {err}");
                }
            }
        }
    }
}
