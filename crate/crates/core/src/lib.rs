//! Combinatorial and symbolic machinery for iterated Duhamel expansions of
//! the cubic Gross-Pitaevskii hierarchy.
//!
//! The crate is `no_std` (it needs `alloc`) and does no I/O. It covers:
//!
//! * [`map`]: collision maps `μ: {k+1,…,k+n} → {1,…,k+n−1}` with `μ(j) < j`,
//!   their highlighted-matrix form, and exhaustive enumeration.
//! * [`board`]: acceptable moves, reduction to special upper echelon form and
//!   the partition of all maps into echelon classes.
//! * [`forest`]: the binary collision forest of a map and the relabeled
//!   one-particle factor maps.
//! * [`kernel`]: hash-consed kernel expressions built by recursive
//!   contraction, and the bound scheduler that replays the inductive
//!   norm estimates to produce exponent bookkeeping.
//!
//! Numerics, file formats and the command line live in the `gpbg` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod board;
mod error;
pub mod forest;
pub mod kernel;
pub mod map;

pub use error::{CoreError, Result};
