use alloc::format;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::sampling::Geometric;

/// Default step cap for return and hitting times.
pub const DEFAULT_CAP: u64 = 100_000_000;

/// State `(M_n, M'_n)` of the product chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ProductChainState {
    pub m: u64,
    pub m_prime: u64,
}

impl ProductChainState {
    pub const ORIGIN: ProductChainState = ProductChainState { m: 0, m_prime: 0 };

    pub fn new(m: u64, m_prime: u64) -> Self {
        ProductChainState { m, m_prime }
    }

    pub fn is_origin(&self) -> bool {
        self.m == 0 && self.m_prime == 0
    }

    pub fn level(&self) -> u64 {
        self.m + self.m_prime
    }
}

/// `(max(m, z) - 1, max(m', z') - 1)`; `z, z' >= 1`.
#[inline]
pub fn product_chain_step(s: ProductChainState, z: u64, z_prime: u64) -> ProductChainState {
    debug_assert!(z >= 1 && z_prime >= 1);
    ProductChainState {
        m: s.m.max(z) - 1,
        m_prime: s.m_prime.max(z_prime) - 1,
    }
}

/// The two geometric laws driving the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub z: Geometric,
    pub z_prime: Geometric,
}

impl ChainParams {
    pub fn new(q: f64, q_prime: f64) -> Result<Self> {
        Ok(ChainParams {
            z: Geometric::new(q).map_err(|_| invalid(format!("q must lie in (0, 1), got {q}")))?,
            z_prime: Geometric::new(q_prime)
                .map_err(|_| invalid(format!("q' must lie in (0, 1), got {q_prime}")))?,
        })
    }

    /// Draws `Z` then `Z'` and advances the chain.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, s: ProductChainState, rng: &mut R) -> ProductChainState {
        let z = self.z.sample(rng);
        let zp = self.z_prime.sample(rng);
        product_chain_step(s, z, zp)
    }
}

/// First `k >= 1` with the chain, started at `(0, 0)`, back at `(0, 0)`.
pub fn simulate_return_time<R: Rng + ?Sized>(
    q: f64,
    q_prime: f64,
    rng: &mut R,
    cap: u64,
) -> Result<u64> {
    let params = ChainParams::new(q, q_prime)?;
    let mut s = ProductChainState::ORIGIN;
    for k in 1..=cap {
        s = params.step(s, rng);
        if s.is_origin() {
            return Ok(k);
        }
    }
    Err(Error::CapExceeded { cap, steps: cap })
}

/// First `k >= 0` with `M_k + M'_k <= level`, started from `start`.
/// `level = 0` gives the hitting time of `(0, 0)`.
pub fn hitting_time<R: Rng + ?Sized>(
    params: &ChainParams,
    start: ProductChainState,
    level: u64,
    rng: &mut R,
    cap: u64,
) -> Result<u64> {
    let mut s = start;
    let mut k = 0;
    while s.level() > level {
        if k == cap {
            return Err(Error::CapExceeded { cap, steps: k });
        }
        s = params.step(s, rng);
        k += 1;
    }
    Ok(k)
}

/// `S_n = min{j : T_j >= n}`: one plus the number of visits to `(0, 0)`
/// at times `1..n`, for the chain started at the origin.
pub fn renewal_index<R: Rng + ?Sized>(params: &ChainParams, n: u64, rng: &mut R) -> Result<u64> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut s = ProductChainState::ORIGIN;
    let mut visits = 0;
    for _ in 1..n {
        s = params.step(s, rng);
        if s.is_origin() {
            visits += 1;
        }
    }
    Ok(visits + 1)
}
