//! Symbolic contraction kernels and the bound scheduler.

mod build;
mod expr;
mod schedule;

pub use build::{
    build_kernel, build_kernels, expand_term_signs, FactorKernel, ForestKernels, KernelExpr, Term, DEPTH_CAP,
};
pub use expr::{ExprArena, ExprId, Node};
pub use schedule::{combine_factors, schedule_bounds, schedule_factor, DimMode, Norm, NormBound};
