#![allow(dead_code)]

use mallows_core::Permutation;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson p-value after merging the smallest cells until each group
/// expects at least 5.
pub fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
    let mut groups = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for i in order {
        o += observed[i] as f64;
        e += probs[i] * n as f64;
        if e >= 5.0 {
            groups.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        let last = groups.last_mut().unwrap();
        last.0 += o;
        last.1 += e;
    }
    let stat: f64 = groups.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = (groups.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

/// Position of `p` in lexicographic order.
pub fn lex_rank(p: &Permutation) -> usize {
    let v = p.to_one_based();
    let mut rank = 0;
    for i in 0..v.len() {
        let smaller_after = v[i + 1..].iter().filter(|&&x| x < v[i]).count();
        rank = rank * (v.len() - i) + smaller_after;
    }
    rank
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let mut p = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
    }
    (d, (2.0 * p).clamp(0.0, 1.0))
}
