//! Regenerative structure of two independent Mallows(q) insertion processes.
//!
//! Running the insertion processes for `q` and `q'` side by side, a renewal
//! happens at step `T` when both have used exactly `{1, ..., T}`. After a
//! renewal both processes restart from scratch, so the stretches between
//! renewals are i.i.d. blocks `(X_j, Sigma_j, Sigma'_j)`, and the LCS of the
//! induced prefixes is sandwiched between partial sums of the block LCS
//! values `Y_j`.
//!
//! The deficits `M_n = max_{j <= n} Pi~(j) - n` form the Markov chain
//! `M_n = max(M_{n-1}, Z_n) - 1`, and renewals are exactly the visits of the
//! product chain `(M_n, M'_n)` to `(0, 0)`.

mod blocks;
mod chain;
mod clt;
mod stationary;

pub use blocks::{
    coupled_prefix, renewal_blocks, BlockSampler, CoupledPrefix, CoupledStep, RenewalBlock,
};
pub use chain::{
    hitting_time, product_chain_step, renewal_index, simulate_return_time, ChainParams,
    ProductChainState, DEFAULT_CAP,
};
pub use clt::{estimate_clt_params, BlockMoments, CltEstimate};
pub use stationary::{stationary_pmf, StationaryLaw};
