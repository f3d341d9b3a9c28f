//! Random streams and the two Mallows constructions.
//!
//! * The q-Mallows process inserts element `i` at a truncated-geometric rank
//!   `p_i(i)` in `[1, i]`; its `n`-th state is distributed as `mu_{n, 1/q}`.
//! * The Mallows(q) insertion process sends `i` to the `Z_i`-th smallest
//!   unused natural number, `Z_i ~ Geom(1 - q)`; the permutation induced on
//!   the first `n` positions is distributed as `mu_{n, q}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{invalid, Result};
use crate::order_stat::{Fenwick, UnusedNaturals};
use crate::perm::Permutation;

/// A reproducible random stream identified by `(master_seed, stream_index)`.
///
/// The ChaCha12 key is expanded from `master_seed` by `SeedableRng::seed_from_u64`
/// and `stream_index` selects the 64-bit ChaCha stream (nonce). Streams with
/// different indices share a key but never overlap, so replica `r` of an
/// experiment can use `RngStream::new(seed, r)` regardless of which thread
/// runs it.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        RngStream {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A sibling stream of the same master seed.
    pub fn substream(&self, stream_index: u64) -> Self {
        RngStream::new(self.master_seed, stream_index)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Uniform on `(0, 1)`; an exact zero is redrawn.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `Geom(1 - q)` on `{1, 2, ...}`: `P(k) = (1 - q) q^(k - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    q: f64,
    ln_q: f64,
}

impl Geometric {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!(
                "geometric parameter q must lie in (0, 1), got {q}"
            )));
        }
        Ok(Geometric {
            q,
            ln_q: libm::log(q),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Inverse CDF: `1 + floor(ln U / ln q)`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = open_unit(rng);
        let k = libm::floor(libm::log(u) / self.ln_q);
        // saturating float-to-int cast
        1u64.saturating_add(k as u64)
    }
}

pub fn geom<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<u64> {
    Ok(Geometric::new(q)?.sample(rng))
}

/// Draws `j` in `[1, i]` with probability proportional to `q^(j - 1)`.
pub fn truncated_geom<R: Rng + ?Sized>(q: f64, i: u64, rng: &mut R) -> Result<u64> {
    if i < 1 {
        return Err(invalid("truncation point must be at least 1"));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("q must be positive and finite, got {q}")));
    }
    Ok(truncated_geom_unchecked(q, i, rng))
}

fn truncated_geom_unchecked<R: Rng + ?Sized>(q: f64, i: u64, rng: &mut R) -> u64 {
    if i == 1 {
        return 1;
    }
    if q == 1.0 {
        return rng.random_range(1..=i);
    }
    if q > 1.0 {
        // weights q^(j-1) on [1, i] are (1/q)^(i-j) up to a constant
        return i + 1 - truncated_geom_unchecked(1.0 / q, i, rng);
    }
    let ln_q = libm::log(q);
    let u: f64 = rng.random();
    // P(J <= j) = (1 - q^j) / (1 - q^i)
    let tail = libm::expm1(i as f64 * ln_q);
    let k = libm::floor(libm::log1p(u * tail) / ln_q);
    (1 + k as u64).clamp(1, i)
}

/// Which construction produced an [`InsertionTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// `p_i(i)` of the q-Mallows process, `1 <= draws[i-1] <= i`.
    Truncated,
    /// `Z_i` of the Mallows(q) insertion process, `draws[i-1] >= 1`.
    Geometric,
}

/// The random draws that built a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionTrace {
    pub kind: TraceKind,
    pub draws: Vec<u64>,
}

impl InsertionTrace {
    pub fn new(kind: TraceKind, draws: Vec<u64>) -> Result<Self> {
        if draws.is_empty() {
            return Err(invalid("trace must be nonempty"));
        }
        let ok = match kind {
            TraceKind::Truncated => draws
                .iter()
                .enumerate()
                .all(|(i, &d)| d >= 1 && d <= i as u64 + 1),
            TraceKind::Geometric => draws.iter().all(|&d| d >= 1),
        };
        if !ok {
            return Err(invalid(format!(
                "draws {draws:?} out of range for {kind:?} trace"
            )));
        }
        Ok(InsertionTrace { kind, draws })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("q must be positive and finite, got {q}")))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n >= 1 && n <= u32::MAX as usize {
        Ok(())
    } else {
        Err(invalid(format!("n must lie in 1..=2^32-1, got {n}")))
    }
}

/// Runs the q-Mallows process for `n` steps. The result is `mu_{n, 1/q}`.
pub fn qmallows_process<R: Rng + ?Sized>(
    n: usize,
    q: f64,
    rng: &mut R,
) -> Result<(Permutation, InsertionTrace)> {
    check_n(n)?;
    check_q(q)?;
    let draws: Vec<u64> = (1..=n as u64)
        .map(|i| truncated_geom_unchecked(q, i, rng))
        .collect();
    let trace = InsertionTrace {
        kind: TraceKind::Truncated,
        draws,
    };
    let p = qmallows_from_trace(&trace)?;
    Ok((p, trace))
}

/// Final state `p_n` of the q-Mallows process with the given `p_i(i)`.
///
/// The values at positions `1..=i` keep the relative order of `p_i`, so going
/// backwards `p_n(i)` is the `p_i(i)`-th smallest value not used by a later
/// position. `O(n log n)`.
pub fn qmallows_from_trace(trace: &InsertionTrace) -> Result<Permutation> {
    if trace.kind != TraceKind::Truncated {
        return Err(invalid("q-Mallows reconstruction needs a truncated trace"));
    }
    let n = trace.len();
    let mut free = Fenwick::from_counts(core::iter::repeat(1), n);
    let mut values = vec![0u32; n];
    for i in (0..n).rev() {
        let rank = trace.draws[i];
        if rank < 1 || rank > i as u64 + 1 {
            return Err(invalid(format!(
                "p_{}({}) = {rank} out of range",
                i + 1,
                i + 1
            )));
        }
        let v = free.select(rank).expect("rank within remaining count");
        free.add(v, -1);
        values[i] = (v - 1) as u32;
    }
    Ok(Permutation::from_zero_based_unchecked(values))
}

/// Values `Pi~(1..=n)` of the infinite insertion process driven by `draws`.
pub fn insertion_prefix_values(draws: &[u64]) -> Result<Vec<u64>> {
    if draws.contains(&0) {
        return Err(invalid("geometric draws must be positive"));
    }
    let max_draw = draws.iter().copied().max().unwrap_or(1);
    let cap =
        usize::try_from(draws.len() as u64 + max_draw).map_err(|_| invalid("draws too large"))?;
    let mut unused = UnusedNaturals::with_capacity(cap);
    Ok(draws.iter().map(|&z| unused.take_nth(z)).collect())
}

/// Rank-relabels distinct positive integers to a permutation in `O(max)`.
pub(crate) fn rank_relabel(values: &[u64]) -> Permutation {
    let max = values.iter().copied().max().unwrap_or(0) as usize;
    let mut rank = vec![0u32; max + 1];
    for &v in values {
        rank[v as usize] = 1;
    }
    let mut acc = 0u32;
    for r in rank.iter_mut() {
        if *r == 1 {
            *r = acc;
            acc += 1;
        }
    }
    debug_assert_eq!(acc as usize, values.len(), "values must be distinct");
    Permutation::from_zero_based_unchecked(values.iter().map(|&v| rank[v as usize]).collect())
}

/// The permutation `Pi_n` induced by the first `n = draws.len()` steps of the
/// insertion process.
pub fn insertion_from_draws(draws: &[u64]) -> Result<Permutation> {
    if draws.is_empty() {
        return Err(invalid("need at least one draw"));
    }
    Ok(rank_relabel(&insertion_prefix_values(draws)?))
}

/// Draws `Z_1..Z_n ~ Geom(1 - q)` and returns the induced `Pi_n ~ mu_{n,q}`.
pub fn insertion_process_prefix<R: Rng + ?Sized>(
    n: usize,
    q: f64,
    rng: &mut R,
) -> Result<(Permutation, InsertionTrace)> {
    check_n(n)?;
    let g = Geometric::new(q)?;
    let draws: Vec<u64> = (0..n).map(|_| g.sample(rng)).collect();
    let p = insertion_from_draws(&draws)?;
    Ok((
        p,
        InsertionTrace {
            kind: TraceKind::Geometric,
            draws,
        },
    ))
}

/// Largest value range `n + 64 / (1 - q)` for which [`sample_mallows`] runs
/// the insertion process, whose memory grows with the values it visits.
pub const INSERTION_VALUE_RANGE_LIMIT: f64 = (1u64 << 25) as f64;

/// An exact `mu_{n,q}` sample for any `q > 0`.
///
/// `q < 1` uses the insertion process, `q = 1` a Fisher-Yates shuffle and
/// `q > 1` reverses a `mu_{n, 1/q}` sample. When `q` is so close to 1 that the
/// insertion values would exceed [`INSERTION_VALUE_RANGE_LIMIT`], the reversed
/// q-Mallows process (same law, memory `O(n)`) is used instead.
pub fn sample_mallows<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<Permutation> {
    check_n(n)?;
    check_q(q)?;
    if q < 1.0 {
        if n as f64 + 64.0 / (1.0 - q) <= INSERTION_VALUE_RANGE_LIMIT {
            Ok(insertion_process_prefix(n, q, rng)?.0)
        } else {
            Ok(qmallows_process(n, q, rng)?.0.reverse())
        }
    } else if q == 1.0 {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.shuffle(rng);
        Ok(Permutation::from_zero_based_unchecked(v))
    } else {
        Ok(sample_mallows(n, 1.0 / q, rng)?.reverse())
    }
}
