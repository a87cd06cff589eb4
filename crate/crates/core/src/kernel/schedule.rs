//! Mechanical replay of the inductive norm estimates.
//!
//! Every term of a factor kernel is bounded separately. The distinguished
//! chain is followed downwards: a product containing the cubic marker costs
//! one trilinear application (weak norm on the distinguished factor), a
//! propagator is absorbed by the group property, and `|φ|²φ` is closed by
//! `‖|φ|²φ‖ ≲ ‖φ‖³`. Regular products each cost one Sobolev trilinear
//! application; bare `φ` atoms contribute one power of `‖φ‖`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::build::{FactorKernel, KernelExpr};
use super::expr::{ExprArena, ExprId, Node};
use crate::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DimMode {
    D1,
    D2,
    D3Plus,
}

impl DimMode {
    pub const ALL: [DimMode; 3] = [DimMode::D1, DimMode::D2, DimMode::D3Plus];

    pub fn time_label(self) -> &'static str {
        match self {
            DimMode::D1 => "T^{1/2}",
            DimMode::D2 => "T^{1/3}",
            DimMode::D3Plus => "T^ε",
        }
    }

    /// Norm on regular functions.
    pub fn regular_norm(self) -> Norm {
        match self {
            DimMode::D1 => Norm::L2,
            DimMode::D2 => Norm::H13,
            DimMode::D3Plus => Norm::HsEps,
        }
    }

    /// Norm on the distinguished chain.
    pub fn weak_norm(self) -> Norm {
        match self {
            DimMode::D1 => Norm::L1,
            DimMode::D2 => Norm::WeakD2,
            DimMode::D3Plus => Norm::WeakEps,
        }
    }

    /// Norm of `φ` in the combined bound.
    pub fn combined_norm(self) -> Norm {
        match self {
            DimMode::D1 => Norm::H16,
            DimMode::D2 => Norm::H13,
            DimMode::D3Plus => Norm::HsEps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Norm {
    HsEps,
    WeakEps,
    H13,
    WeakD2,
    H16,
    L1,
    L2,
}

impl Norm {
    pub fn label(self) -> &'static str {
        match self {
            Norm::HsEps => "H^{s_ε}",
            Norm::WeakEps => "W^{-(s_c+ε/2),r_ε}",
            Norm::H13 => "H^{1/3}",
            Norm::WeakD2 => "W^{-(1/3-ε/2),r}",
            Norm::H16 => "H^{1/6}",
            Norm::L1 => "L^1",
            Norm::L2 => "L^2",
        }
    }
}

/// `2^{prefactor_log2} (C T)^{time_power} ‖φ‖^{phi_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormBound {
    pub mode: DimMode,
    pub distinguished: bool,
    /// Internal vertices covered by the bound.
    pub m: usize,
    pub time_power: u32,
    pub phi_power: u32,
    pub prefactor_log2: u32,
    /// Norm of `φ` in the final bound.
    pub phi_norm: Norm,
    /// Norm that absorbed the cubic term, if any.
    pub terminal_norm: Option<Norm>,
}

impl NormBound {
    /// Compact form without norm subscripts, e.g. `2^4 (C T^ε)^3 ‖φ‖^12`.
    pub fn pretty(&self) -> String {
        format!(
            "2^{} (C {})^{} ‖φ‖^{}",
            self.prefactor_log2,
            self.mode.time_label(),
            self.time_power,
            self.phi_power
        )
    }

    /// Form with the norm of `φ` spelled out.
    pub fn pretty_with_norm(&self) -> String {
        format!(
            "2^{} (C {})^{} ‖φ‖_{{{}}}^{}",
            self.prefactor_log2,
            self.mode.time_label(),
            self.time_power,
            self.phi_norm.label(),
            self.phi_power
        )
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Tally {
    time: u32,
    phi: u32,
}

fn strip(arena: &ExprArena, mut e: ExprId) -> ExprId {
    loop {
        match arena.node(e) {
            Node::Conj(x) | Node::Prop { arg: x, .. } => e = x,
            _ => return e,
        }
    }
}

fn regular(arena: &ExprArena, start: ExprId, tally: &mut Tally) -> Result<()> {
    let mut stack = alloc::vec![start];
    while let Some(e) = stack.pop() {
        match arena.node(strip(arena, e)) {
            Node::Phi => tally.phi += 1,
            Node::Prod3(fs) => {
                tally.time += 1;
                stack.extend_from_slice(&fs);
            }
            Node::Cubic => return Err(CoreError::SchedulerStuck("cubic term in a regular slot")),
            Node::Conj(_) | Node::Prop { .. } => unreachable!("stripped"),
        }
    }
    Ok(())
}

fn distinguished(arena: &ExprArena, mut d: ExprId, tally: &mut Tally) -> Result<()> {
    loop {
        match arena.node(d) {
            Node::Cubic => {
                tally.phi += 3;
                return Ok(());
            }
            // group property: merged propagators drop out of the estimate
            Node::Conj(x) | Node::Prop { arg: x, .. } => d = x,
            Node::Prod3(fs) => {
                let dist: Vec<_> = fs.iter().filter(|&&f| arena.is_distinguished(f)).collect();
                if dist.len() != 1 {
                    return Err(CoreError::SchedulerStuck(
                        "product without a unique distinguished factor",
                    ));
                }
                tally.time += 1;
                for &f in &fs {
                    if f != *dist[0] {
                        regular(arena, f, tally)?;
                    }
                }
                // identical distinguished factors cannot occur, so the filter kept one
                d = *dist[0];
            }
            Node::Phi => return Err(CoreError::SchedulerStuck("distinguished chain ends at φ")),
        }
    }
}

fn schedule_term(arena: &ExprArena, psi: ExprId, chi: ExprId, is_distinguished: bool) -> Result<Tally> {
    let mut tally = Tally::default();
    let (dp, dc) = (arena.is_distinguished(psi), arena.is_distinguished(chi));
    if is_distinguished {
        let (d, r) = match (dp, dc) {
            (true, false) => (psi, chi),
            (false, true) => (chi, psi),
            _ => return Err(CoreError::SchedulerStuck("term needs exactly one distinguished side")),
        };
        distinguished(arena, d, &mut tally)?;
        regular(arena, r, &mut tally)?;
    } else {
        if dp || dc {
            return Err(CoreError::SchedulerStuck("distinguished term in a regular factor"));
        }
        regular(arena, psi, &mut tally)?;
        regular(arena, chi, &mut tally)?;
    }
    Ok(tally)
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Bounds a kernel of a factor with `m` internal vertices term by term.
pub fn schedule_bounds(
    arena: &ExprArena,
    k: &KernelExpr,
    m: usize,
    mode: DimMode,
    is_distinguished: bool,
) -> Result<NormBound> {
    let mut tally: Option<Tally> = None;
    for t in &k.terms {
        let this = schedule_term(arena, t.psi, t.chi, is_distinguished)?;
        match tally {
            None => tally = Some(this),
            Some(prev) if prev != this => {
                return Err(CoreError::SchedulerStuck("terms disagree on exponents"));
            }
            Some(_) => {}
        }
    }
    let tally = tally.ok_or(CoreError::SchedulerStuck("empty kernel"))?;
    Ok(NormBound {
        mode,
        distinguished: is_distinguished,
        m,
        time_power: tally.time,
        phi_power: tally.phi,
        prefactor_log2: ceil_log2(k.len()),
        phi_norm: mode.regular_norm(),
        terminal_norm: is_distinguished.then(|| mode.weak_norm()),
    })
}

/// Bound for `J¹_j` of one factor.
pub fn schedule_factor(arena: &ExprArena, f: &FactorKernel, mode: DimMode) -> Result<NormBound> {
    schedule_bounds(arena, &f.outer, f.m(), mode, f.is_distinguished())
}

/// Multiplies the per-factor bounds of a `k`-particle, depth-`n` expansion.
pub fn combine_factors(bounds: &[NormBound], k: usize, n: usize) -> Result<NormBound> {
    if bounds.len() != k {
        return Err(CoreError::InconsistentForest("one bound per particle expected"));
    }
    if bounds.iter().filter(|b| b.distinguished).count() != 1 {
        return Err(CoreError::InconsistentForest(
            "exactly one distinguished factor expected",
        ));
    }
    if bounds.iter().map(|b| b.m).sum::<usize>() != n {
        return Err(CoreError::InconsistentForest("vertex counts do not add up to n"));
    }
    let mode = bounds[0].mode;
    if bounds.iter().any(|b| b.mode != mode) {
        return Err(CoreError::InconsistentForest("mixed dimension modes"));
    }
    Ok(NormBound {
        mode,
        distinguished: true,
        m: n,
        time_power: bounds.iter().map(|b| b.time_power).sum(),
        phi_power: bounds.iter().map(|b| b.phi_power).sum(),
        prefactor_log2: bounds.iter().map(|b| b.prefactor_log2).sum(),
        phi_norm: mode.combined_norm(),
        terminal_norm: None,
    })
}
