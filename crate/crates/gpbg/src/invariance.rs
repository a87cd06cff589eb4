//! Quadrature checks of move invariance and of the echelon domain identity.

use rayon::prelude::*;

use gpbg_core::board::{BoardState, EchelonClass};
use gpbg_core::forest::build_forest;
use gpbg_core::kernel::build_kernels;
use gpbg_core::map::{CollisionMap, Permutation};

use crate::duhamel::{evaluate_j_factorized, FinalState, Probe};
use crate::error::Result;
use crate::grid::GridFunction;
use crate::quadrature::SimplexQuadrature;

/// `I(μ, σ) = ∫_{t ≥ t_σ(1) ≥ ⋯ ≥ t_σ(n) ≥ 0} J^k(t_0,…,t_n; μ)`, reduced to a [`Probe`].
pub fn simplex_integral(
    m: &CollisionMap,
    sigma: &Permutation,
    phi: &GridFunction,
    quad: SimplexQuadrature,
    t: f64,
    fin: FinalState,
) -> Result<Probe> {
    let n = m.n();
    let forest = build_forest(m);
    let kernels = build_kernels(&forest)?;
    let nodes = quad.nodes(n, t);
    let values: Vec<Probe> = nodes
        .par_iter()
        .map(|(s, w)| {
            let mut times = vec![t; n + 1];
            for i in 1..=n {
                times[sigma.apply(i)] = s[i - 1];
            }
            let parts = evaluate_j_factorized(&forest, &kernels, &times, phi, fin)?;
            let mut p = Probe::of_factors(&parts);
            p.value *= *w;
            p.trace *= *w;
            Ok(p)
        })
        .collect::<Result<_>>()?;
    // fixed summation order keeps results bit-reproducible
    let mut total = Probe::zero();
    for v in &values {
        total.add_scaled(v, 1.0);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairReport {
    pub left: Probe,
    pub right: Probe,
    pub rel_diff: f64,
}

impl PairReport {
    fn new(left: Probe, right: Probe) -> Self {
        Self {
            left,
            right,
            rel_diff: left.rel_diff(&right),
        }
    }
}

/// Compares `I(μ, σ)` and `I(μ′, σ′)` for two boards.
pub fn verify_move_invariance(
    before: &BoardState,
    after: &BoardState,
    phi: &GridFunction,
    quad: SimplexQuadrature,
    t: f64,
    fin: FinalState,
) -> Result<PairReport> {
    let left = simplex_integral(before.map(), &before.sigma(), phi, quad, t, fin)?;
    let right = if after == before {
        left
    } else {
        simplex_integral(after.map(), &after.sigma(), phi, quad, t, fin)?
    };
    Ok(PairReport::new(left, right))
}

/// Sum over members of their standard-simplex integrals against the
/// representative integrated over the members' permuted simplices.
pub fn verify_domain_union(
    cls: &EchelonClass,
    phi: &GridFunction,
    quad: SimplexQuadrature,
    t: f64,
    fin: FinalState,
) -> Result<PairReport> {
    let rep = CollisionMap::from_matrix(&cls.representative);
    let mut left = Probe::zero();
    let mut right = Probe::zero();
    for (m, sigma) in &cls.members {
        let id = Permutation::identity(m.n());
        left.add_scaled(&simplex_integral(m, &id, phi, quad, t, fin)?, 1.0);
        right.add_scaled(&simplex_integral(&rep, sigma, phi, quad, t, fin)?, 1.0);
    }
    Ok(PairReport::new(left, right))
}
