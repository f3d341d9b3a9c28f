//! Permutations of `[n]` and the Mallows measure.
//!
//! Values are stored 0-based; everything that crosses the API boundary as
//! plain integers (constructors, [`Permutation::get`], text format) is 1-based
//! one-line notation.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::order_stat::Fenwick;

/// A bijection of `{1, ..., n}` in one-line notation. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_based(values: &[usize]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(invalid("permutation must have at least one element"));
        }
        if n > u32::MAX as usize {
            return Err(invalid("permutation too large"));
        }
        let mut seen = alloc::vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &v in values {
            if v == 0 || v > n || seen[v - 1] {
                return Err(invalid(format!("{values:?} is not a bijection of 1..={n}")));
            }
            seen[v - 1] = true;
            zero_based.push((v - 1) as u32);
        }
        Ok(Permutation { values: zero_based })
    }

    /// Caller guarantees `values` is a bijection of `0..values.len()`.
    pub(crate) fn from_zero_based_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&values));
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Permutation {
            values: (0..n as u32).collect(),
        }
    }

    /// `(n, n-1, ..., 1)`.
    pub fn reversal(n: usize) -> Self {
        assert!(n >= 1);
        Permutation {
            values: (0..n as u32).rev().collect(),
        }
    }

    /// Rank-relabels distinct keys: position `i` gets the rank of `keys[i]`.
    pub fn from_ranks<T: Ord>(keys: &[T]) -> Result<Self> {
        if keys.is_empty() {
            return Err(invalid("cannot rank an empty sequence"));
        }
        let mut order: Vec<u32> = (0..keys.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
        if order
            .windows(2)
            .any(|w| keys[w[0] as usize] == keys[w[1] as usize])
        {
            return Err(invalid("keys to rank must be distinct"));
        }
        let mut values = alloc::vec![0u32; keys.len()];
        for (rank, &pos) in order.iter().enumerate() {
            values[pos as usize] = rank as u32;
        }
        Ok(Permutation { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `pi(i)` for 1-based `i`.
    pub fn get(&self, i: usize) -> usize {
        self.values[i - 1] as usize + 1
    }

    /// 0-based values.
    pub fn as_zero_based(&self) -> &[u32] {
        &self.values
    }

    /// 1-based one-line notation.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.values.iter().map(|&v| v as usize + 1).collect()
    }

    /// Number of pairs `i < j` with `pi(i) > pi(j)`, in `O(n log n)`.
    pub fn inversion_count(&self) -> u64 {
        let n = self.len();
        let mut seen = Fenwick::new(n);
        let mut inv = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            let smaller_before = seen.prefix_sum(v as usize + 1);
            inv += i as u64 - smaller_before;
            seen.add(v as usize + 1, 1);
        }
        inv
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0u32; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { values: inv }
    }

    /// Position reversal: `reverse(pi)(i) = pi(n + 1 - i)`.
    pub fn reverse(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Permutation { values }
    }

    /// The permutation induced on the 1-based positions `indices`: entry `k`
    /// is the rank of `pi(indices[k])` among the selected values.
    pub fn induced(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("index list is empty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("indices must be strictly increasing"));
        }
        if indices[0] == 0 || *indices.last().unwrap() > self.len() {
            return Err(invalid(format!("indices must lie in 1..={}", self.len())));
        }
        let picked: Vec<u32> = indices.iter().map(|&i| self.values[i - 1]).collect();
        Self::from_ranks(&picked)
    }
}

pub(crate) fn is_bijection(values: &[u32]) -> bool {
    let mut seen = alloc::vec![false; values.len()];
    values.iter().all(|&v| {
        let v = v as usize;
        v < seen.len() && !core::mem::replace(&mut seen[v], true)
    })
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad entry {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_one_based(&values).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::Parse(m),
            other => other,
        })
    }
}

/// Largest `n` for which [`enumerate_pmf`] will list `S_n`.
pub const MAX_ENUMERATION_N: usize = 8;

/// The Mallows measure `mu_{n,q}(pi) = q^{inv(pi)} / Z_{n,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MallowsLaw {
    n: usize,
    q: f64,
    normalizer: f64,
}

impl MallowsLaw {
    /// Uses the product form `Z_{n,q} = prod_{i=1}^{n} (1 + q + ... + q^{i-1})`.
    pub fn new(n: usize, q: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(invalid(format!("q must be positive and finite, got {q}")));
        }
        let mut normalizer = 1.0;
        let mut partial = 0.0;
        let mut power = 1.0;
        for _ in 0..n {
            partial += power;
            power *= q;
            normalizer *= partial;
        }
        Ok(MallowsLaw { n, q, normalizer })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn weight(&self, p: &Permutation) -> f64 {
        libm::pow(self.q, p.inversion_count() as f64)
    }

    pub fn pmf(&self, p: &Permutation) -> f64 {
        if p.len() != self.n {
            return 0.0;
        }
        self.weight(p) / self.normalizer
    }
}

/// Rearranges `v` into the next permutation in lexicographic order; returns
/// `false` (leaving `v` sorted ascending) after the last one.
pub(crate) fn next_lexicographic(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All of `S_n` in lexicographic order.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    let mut cur: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation::from_zero_based_unchecked(cur.clone()));
        if !next_lexicographic(&mut cur) {
            break;
        }
    }
    Ok(out)
}

/// Exact `mu_{n,q}` over all of `S_n` (lexicographic order), normalized by
/// summing the weights rather than by the product formula.
pub fn enumerate_pmf(n: usize, q: f64) -> Result<Vec<(Permutation, f64)>> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid(format!("q must be positive and finite, got {q}")));
    }
    let perms = all_permutations(n)?;
    let weights: Vec<f64> = perms
        .iter()
        .map(|p| libm::pow(q, p.inversion_count() as f64))
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(perms
        .into_iter()
        .zip(weights)
        .map(|(p, w)| (p, w / total))
        .collect())
}
