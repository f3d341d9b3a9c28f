//! Longest increasing and longest common subsequences.
//!
//! For permutations the LCS is an LIS in disguise: value `k` sits at position
//! `p^{-1}(k)` in `p` and `t^{-1}(k)` in `t`, and a common subsequence is a
//! chain of such points increasing in both coordinates. Walking `p` left to
//! right turns this into the LIS of the sequence `t^{-1}(p(i))`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::perm::Permutation;

/// Points in the plane; chains are strictly increasing in both coordinates
/// with no constraint on their order in `points`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    pub points: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        PointSet { points }
    }

    /// `{(a_i, b_i)}` for two sequences of equal length.
    pub fn from_pairs(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(invalid("coordinate sequences differ in length"));
        }
        Ok(PointSet {
            points: a.iter().copied().zip(b.iter().copied()).collect(),
        })
    }
}

/// Length of the longest strictly increasing subsequence (patience sorting).
pub fn lis_length<T: PartialOrd + Copy>(seq: &[T]) -> usize {
    let mut tops: Vec<T> = Vec::new();
    for &x in seq {
        let k = tops.partition_point(|t| *t < x);
        if k == tops.len() {
            tops.push(x);
        } else {
            tops[k] = x;
        }
    }
    tops.len()
}

/// Positions of one longest strictly increasing subsequence.
pub fn lis_witness<T: PartialOrd + Copy>(seq: &[T]) -> Vec<usize> {
    // tops[k] = index of the smallest tail of an increasing run of length k+1
    let mut tops: Vec<usize> = Vec::new();
    let mut prev = vec![usize::MAX; seq.len()];
    for (i, &x) in seq.iter().enumerate() {
        let k = tops.partition_point(|&t| seq[t] < x);
        if k > 0 {
            prev[i] = tops[k - 1];
        }
        if k == tops.len() {
            tops.push(i);
        } else {
            tops[k] = i;
        }
    }
    let mut out = Vec::with_capacity(tops.len());
    let mut cur = tops.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = (prev[i] != usize::MAX).then(|| prev[i]);
    }
    out.reverse();
    out
}

pub fn lis(p: &Permutation) -> usize {
    lis_length(p.as_zero_based())
}

fn check_distinct(mut coords: Vec<f64>, axis: &str) -> Result<()> {
    if coords.iter().any(|c| c.is_nan()) {
        return Err(invalid(format!("{axis} coordinate is NaN")));
    }
    coords.sort_unstable_by(f64::total_cmp);
    if coords.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid(format!("duplicate {axis} coordinate")));
    }
    Ok(())
}

/// Longest chain of `ps` under the strict coordinatewise order.
pub fn lis_points(ps: &PointSet) -> Result<usize> {
    check_distinct(ps.points.iter().map(|p| p.0).collect(), "x")?;
    check_distinct(ps.points.iter().map(|p| p.1).collect(), "y")?;
    let mut sorted = ps.points.clone();
    sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let ys: Vec<f64> = sorted.into_iter().map(|p| p.1).collect();
    Ok(lis_length(&ys))
}

fn same_size(p: &Permutation, t: &Permutation) -> Result<()> {
    if p.len() == t.len() {
        Ok(())
    } else {
        Err(invalid(format!(
            "permutations have different sizes {} and {}",
            p.len(),
            t.len()
        )))
    }
}

/// The sequence `t^{-1}(p(i))`, `i = 1..=n`; its LIS is `LCS(p, t)`.
fn matched_positions(p: &Permutation, t: &Permutation) -> Vec<u32> {
    let t_inv = t.inverse();
    let t_inv = t_inv.as_zero_based();
    p.as_zero_based()
        .iter()
        .map(|&v| t_inv[v as usize])
        .collect()
}

/// Longest increasing subsequence between two sequences read as the point
/// set `{(p(i), t(i))}`.
pub fn lis_pair(p: &Permutation, t: &Permutation) -> Result<usize> {
    same_size(p, t)?;
    // sort by the p-coordinate: x = p(i) in increasing order is i = p^{-1}(x)
    let p_inv = p.inverse();
    let t_vals = t.as_zero_based();
    let ys: Vec<u32> = p_inv
        .as_zero_based()
        .iter()
        .map(|&i| t_vals[i as usize])
        .collect();
    Ok(lis_length(&ys))
}

/// `LCS(p, t)` in `O(n log n)`.
pub fn lcs(p: &Permutation, t: &Permutation) -> Result<usize> {
    same_size(p, t)?;
    Ok(lis_length(&matched_positions(p, t)))
}

/// `LCS(p, t)` together with one longest common subsequence (1-based values).
pub fn lcs_with_witness(p: &Permutation, t: &Permutation) -> Result<(usize, Vec<usize>)> {
    same_size(p, t)?;
    let seq = matched_positions(p, t);
    let idx = lis_witness(&seq);
    let values = idx.iter().map(|&i| p.get(i + 1)).collect();
    Ok((idx.len(), values))
}

/// Size guard for [`lcs_dp_oracle`].
pub const DP_ORACLE_MAX_N: usize = 4096;

/// Textbook quadratic LCS table, kept as an independent check.
pub fn lcs_dp_oracle(p: &Permutation, t: &Permutation) -> Result<usize> {
    same_size(p, t)?;
    let n = p.len();
    if n > DP_ORACLE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: DP_ORACLE_MAX_N,
        });
    }
    let a = p.as_zero_based();
    let b = t.as_zero_based();
    let mut prev = vec![0u32; n + 1];
    let mut cur = vec![0u32; n + 1];
    for &x in a {
        for j in 1..=n {
            cur[j] = if x == b[j - 1] {
                prev[j - 1] + 1
            } else {
                prev[j].max(cur[j - 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[n] as usize)
}
