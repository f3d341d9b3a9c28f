//! Mallows permutations and the longest common subsequence.
//!
//! This crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`perm`]: permutations in one-line notation, inversions, induced
//!   sub-permutations and an exact enumeration of the Mallows law for small `n`.
//! * [`sampling`]: counter-based random streams, geometric draws, the
//!   q-Mallows process and the Mallows(q) insertion process.
//! * [`subsequence`]: patience-sorting LIS, LIS of planar point sets and LCS
//!   of two permutations through the inverse-permutation reduction.
//! * [`regeneration`]: renewal blocks of two coupled insertion processes, the
//!   product Markov chain of prefix deficits and its stationary law.
//! * [`limits`]: the finite-beta constant `J(beta)`, its asymptote and the
//!   reciprocal Euler product.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod order_stat;

pub mod limits;
pub mod perm;
pub mod regeneration;
pub mod sampling;
pub mod subsequence;

pub use error::{Error, Result};

/// Crate version, recorded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use limits::{euler_z, j_bar, weak_law_constant, QuadratureResult};
pub use order_stat::UnusedNaturals;
pub use perm::{enumerate_pmf, MallowsLaw, Permutation};
pub use sampling::{InsertionTrace, RngStream, TraceKind};
