use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::order_stat::UnusedNaturals;
use crate::perm::Permutation;
use crate::sampling::rank_relabel;
use crate::subsequence::lcs;

use super::chain::{product_chain_step, ChainParams, ProductChainState};

/// One regeneration cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenewalBlock {
    /// `X_j = T_j - T_{j-1}`.
    pub length: u64,
    /// `Sigma_j(i) = Pi~(i + T_{j-1}) - T_{j-1}`.
    pub sigma: Permutation,
    pub sigma_prime: Permutation,
    /// `Y_j = LCS(Sigma_j, Sigma'_j)`.
    pub y: u64,
}

/// Everything observable after one step of the coupled processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledStep {
    pub z: u64,
    pub z_prime: u64,
    /// Values placed in this step, relative to the current block.
    pub value: u64,
    pub value_prime: u64,
    /// Product chain after the step, advanced by its own update rule.
    pub chain: ProductChainState,
    /// `max_{j <= n} Pi~(j) - n` for each process.
    pub deficits: (u64, u64),
    /// Both processes have used exactly `{1, ..., len}` of the current block.
    pub complete: bool,
}

/// Two coupled Mallows(q) and Mallows(q') insertion processes cut at their
/// common renewal times. Each block restarts the processes from scratch.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    params: ChainParams,
    unused: UnusedNaturals,
    unused_prime: UnusedNaturals,
    values: Vec<u64>,
    values_prime: Vec<u64>,
    max_value: u64,
    max_value_prime: u64,
    chain: ProductChainState,
}

impl BlockSampler {
    pub fn new(q: f64, q_prime: f64) -> Result<Self> {
        Ok(BlockSampler {
            params: ChainParams::new(q, q_prime)?,
            unused: UnusedNaturals::new(),
            unused_prime: UnusedNaturals::new(),
            values: Vec::new(),
            values_prime: Vec::new(),
            max_value: 0,
            max_value_prime: 0,
            chain: ProductChainState::ORIGIN,
        })
    }

    /// Steps taken in the current (unfinished) block.
    pub fn block_len(&self) -> u64 {
        self.values.len() as u64
    }

    /// Advances both processes and the product chain with the same draws.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> CoupledStep {
        let z = self.params.z.sample(rng);
        let z_prime = self.params.z_prime.sample(rng);
        let value = self.unused.take_nth(z);
        let value_prime = self.unused_prime.take_nth(z_prime);
        self.values.push(value);
        self.values_prime.push(value_prime);
        self.max_value = self.max_value.max(value);
        self.max_value_prime = self.max_value_prime.max(value_prime);
        self.chain = product_chain_step(self.chain, z, z_prime);

        let len = self.block_len();
        let complete =
            self.unused.smallest_unused() > len && self.unused_prime.smallest_unused() > len;
        CoupledStep {
            z,
            z_prime,
            value,
            value_prime,
            chain: self.chain,
            deficits: (self.max_value - len, self.max_value_prime - len),
            complete,
        }
    }

    /// Closes the current block. Only valid right after a complete step.
    fn take_block(&mut self) -> RenewalBlock {
        let to_perm = |v: &[u64]| {
            Permutation::from_zero_based_unchecked(v.iter().map(|&x| (x - 1) as u32).collect())
        };
        let sigma = to_perm(&self.values);
        let sigma_prime = to_perm(&self.values_prime);
        let y = lcs(&sigma, &sigma_prime).expect("blocks have equal length") as u64;
        let length = self.block_len();
        self.values.clear();
        self.values_prime.clear();
        self.unused.reset();
        self.unused_prime.reset();
        self.max_value = 0;
        self.max_value_prime = 0;
        RenewalBlock {
            length,
            sigma,
            sigma_prime,
            y,
        }
    }

    /// Runs to the next renewal. At most `cap` steps are taken per block.
    pub fn next_block<R: Rng + ?Sized>(&mut self, rng: &mut R, cap: u64) -> Result<RenewalBlock> {
        loop {
            if self.block_len() >= cap {
                return Err(Error::CapExceeded {
                    cap,
                    steps: self.block_len(),
                });
            }
            if self.step(rng).complete {
                debug_assert!(self.chain.is_origin());
                return Ok(self.take_block());
            }
        }
    }

    /// `(X_j, Y_j)` of the next block; the block permutations are dropped.
    pub fn next_xy<R: Rng + ?Sized>(&mut self, rng: &mut R, cap: u64) -> Result<(u64, u64)> {
        let b = self.next_block(rng, cap)?;
        Ok((b.length, b.y))
    }
}

/// The first `count` renewal blocks of a fresh coupled run, retained whole.
pub fn renewal_blocks<R: Rng + ?Sized>(
    q: f64,
    q_prime: f64,
    count: usize,
    rng: &mut R,
    cap: u64,
) -> Result<Vec<RenewalBlock>> {
    if count == 0 {
        return Err(invalid("block count must be positive"));
    }
    let mut sampler = BlockSampler::new(q, q_prime)?;
    (0..count).map(|_| sampler.next_block(rng, cap)).collect()
}

/// Induced prefixes `Pi_n`, `Pi'_n` of a coupled run, with the `(X_j, Y_j)`
/// of the blocks `1..=S_n` that cover them.
#[derive(Debug, Clone)]
pub struct CoupledPrefix {
    pub pi: Permutation,
    pub tau: Permutation,
    pub block_lengths: Vec<u64>,
    pub block_lcs: Vec<u64>,
}

impl CoupledPrefix {
    /// `S_n = min{j : T_j >= n}`.
    pub fn s_n(&self) -> usize {
        self.block_lcs.len()
    }

    /// `(sum_{j < S_n} Y_j, sum_{j <= S_n} Y_j)`.
    pub fn sandwich_bounds(&self) -> (u64, u64) {
        let upper: u64 = self.block_lcs.iter().sum();
        let lower = upper - self.block_lcs.last().copied().unwrap_or(0);
        (lower, upper)
    }

    /// `T_{S_n - 1}`, the last renewal strictly before `n`.
    pub fn last_renewal_before_n(&self) -> u64 {
        self.block_lengths[..self.block_lengths.len() - 1]
            .iter()
            .sum()
    }

    /// LCS of `Pi_n`, `Pi'_n` restricted to positions after the last renewal
    /// before `n`, each side rank-relabeled.
    pub fn tail_lcs(&self) -> u64 {
        let start = self.last_renewal_before_n() as usize;
        let idx: Vec<usize> = (start + 1..=self.pi.len()).collect();
        let a = self.pi.induced(&idx).expect("nonempty tail");
        let b = self.tau.induced(&idx).expect("nonempty tail");
        lcs(&a, &b).expect("same length") as u64
    }

    /// Completed blocks occupy the same value range in both prefixes, so
    /// `LCS(Pi_n, Pi'_n) = sum_{j < S_n} Y_j + tail_lcs()` exactly.
    ///
    /// The tail is not a whole block: both sides are relabeled separately and
    /// `tail_lcs()` can exceed `Y_{S_n}`, which breaks the upper half of
    /// [`sandwich_bounds`](Self::sandwich_bounds) on a small fraction of runs.
    /// `(lower, lower + n - T_{S_n - 1})` always brackets the LCS.
    pub fn tail_length_bounds(&self) -> (u64, u64) {
        let (lower, _) = self.sandwich_bounds();
        (
            lower,
            lower + self.pi.len() as u64 - self.last_renewal_before_n(),
        )
    }

    /// Whether `n` is itself a renewal time.
    pub fn ends_on_renewal(&self) -> bool {
        self.block_lengths.iter().sum::<u64>() == self.pi.len() as u64
    }
}

/// Runs the coupled processes until the first renewal at or after `n`.
pub fn coupled_prefix<R: Rng + ?Sized>(
    n: usize,
    q: f64,
    q_prime: f64,
    rng: &mut R,
    cap: u64,
) -> Result<CoupledPrefix> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut sampler = BlockSampler::new(q, q_prime)?;
    let mut values = Vec::with_capacity(n);
    let mut values_prime = Vec::with_capacity(n);
    let mut block_lengths = Vec::new();
    let mut block_lcs = Vec::new();
    let mut offset = 0u64;
    while (offset as usize) < n {
        let b = sampler.next_block(rng, cap)?;
        let take = (n - offset as usize).min(b.length as usize);
        for i in 1..=take {
            values.push(offset + b.sigma.get(i) as u64);
            values_prime.push(offset + b.sigma_prime.get(i) as u64);
        }
        offset += b.length;
        block_lengths.push(b.length);
        block_lcs.push(b.y);
    }
    Ok(CoupledPrefix {
        pi: rank_relabel(&values),
        tau: rank_relabel(&values_prime),
        block_lengths,
        block_lcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{insertion_prefix_values, RngStream};

    #[test]
    fn blocks_are_valid_and_restart() {
        let mut rng = RngStream::new(1, 0);
        let blocks = renewal_blocks(0.5, 0.6, 500, &mut rng, 1_000_000).unwrap();
        for b in &blocks {
            assert_eq!(b.sigma.len() as u64, b.length);
            assert_eq!(b.sigma_prime.len() as u64, b.length);
            assert!(b.y >= 1 && b.y <= b.length);
            if b.length == 1 {
                assert_eq!(b.sigma, Permutation::identity(1));
                assert_eq!(b.sigma_prime, Permutation::identity(1));
                assert_eq!(b.y, 1);
            }
            // no proper prefix is complete for both permutations
            let mut max = 0;
            let mut max_p = 0;
            for i in 1..=b.length as usize {
                max = max.max(b.sigma.get(i));
                max_p = max_p.max(b.sigma_prime.get(i));
                let both = max == i && max_p == i;
                assert_eq!(both, i == b.length as usize);
            }
        }
        assert!(blocks.iter().any(|b| b.length == 1));
        assert!(blocks.iter().any(|b| b.length > 5));
    }

    #[test]
    fn block_values_follow_insertion_rule() {
        // replaying one block's draws through the standalone insertion
        // process reproduces Sigma_j
        let mut rng = RngStream::new(4, 0);
        let mut s = BlockSampler::new(0.7, 0.4).unwrap();
        let mut zs = Vec::new();
        let mut vals = Vec::new();
        loop {
            let st = s.step(&mut rng);
            zs.push(st.z);
            vals.push(st.value);
            if st.complete {
                break;
            }
        }
        assert_eq!(insertion_prefix_values(&zs).unwrap(), vals);
    }

    #[test]
    fn relabeled_tail_can_beat_its_block() {
        // a single block whose 3-prefixes relabel to the same permutation
        let sigma = Permutation::from_one_based(&[1, 2, 3, 5, 4]).unwrap();
        let sigma_p = Permutation::from_one_based(&[3, 4, 5, 1, 2]).unwrap();
        let cp = CoupledPrefix {
            pi: sigma.induced(&[1, 2, 3]).unwrap(),
            tau: sigma_p.induced(&[1, 2, 3]).unwrap(),
            block_lengths: alloc::vec![5],
            block_lcs: alloc::vec![lcs(&sigma, &sigma_p).unwrap() as u64],
        };
        assert_eq!(cp.sandwich_bounds(), (0, 2));
        assert_eq!(lcs(&cp.pi, &cp.tau).unwrap(), 3);
        assert_eq!(cp.tail_lcs(), 3);
        assert_eq!(cp.tail_length_bounds(), (0, 3));
    }

    #[test]
    fn cap_is_enforced() {
        let mut rng = RngStream::new(5, 0);
        let err = (0..200)
            .map(|_| renewal_blocks(0.95, 0.95, 1, &mut rng, 2))
            .find(|r| r.is_err());
        assert!(matches!(
            err,
            Some(Err(Error::CapExceeded { cap: 2, steps: 2 }))
        ));
        assert!(renewal_blocks(0.5, 0.5, 0, &mut rng, 10).is_err());
    }

    #[test]
    fn prefix_covers_n() {
        let mut rng = RngStream::new(6, 0);
        for n in [1usize, 2, 10, 333] {
            let cp = coupled_prefix(n, 0.4, 0.4, &mut rng, 1_000_000).unwrap();
            assert_eq!(cp.pi.len(), n);
            assert_eq!(cp.tau.len(), n);
            let total: u64 = cp.block_lengths.iter().sum();
            let before: u64 = total - cp.block_lengths.last().unwrap();
            assert!(total >= n as u64 && before < n as u64);
            let (lo, hi) = cp.sandwich_bounds();
            assert_eq!(hi - lo, *cp.block_lcs.last().unwrap());
            let l = lcs(&cp.pi, &cp.tau).unwrap() as u64;
            assert_eq!(l, lo + cp.tail_lcs());
            let (tlo, thi) = cp.tail_length_bounds();
            assert!(tlo < l && l <= thi);
            if cp.ends_on_renewal() {
                assert_eq!(l, hi);
            }
        }
    }
}
