//! Acceptance gate. Each test prints one `criterion N: PASS|FAIL` line and
//! then asserts the same verdict.

use std::io::Write;
use std::time::{Duration, Instant};

use mallows_core::limits::{j_bar, j_bar_integrand, weak_law_constant};
use mallows_core::perm::all_permutations;
use mallows_core::regeneration::{
    coupled_prefix, hitting_time, renewal_index, simulate_return_time, BlockSampler, ChainParams,
    ProductChainState, StationaryLaw, DEFAULT_CAP,
};
use mallows_core::sampling::{insertion_process_prefix, qmallows_process, sample_mallows};
use mallows_core::subsequence::{lcs, lcs_dp_oracle};
use mallows_core::{enumerate_pmf, euler_z, Permutation, RngStream};
use mallows_sim::output::emit;
use mallows_sim::stats::{chi_square_gof, mean_and_se};
use mallows_sim::{run_experiment, ExperimentConfig, ExperimentKind, OutputFormat};

const SEED: u64 = 2026;

/// Writes to the process stdout directly so the line survives output capture.
fn verdict(criterion: u32, pass: bool, detail: &str) {
    let line = format!(
        "criterion {criterion}: {} ({detail})\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes())
        .and_then(|_| out.flush())
        .ok();
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Chi-square p-value of `draws` samples of `sample` against the exact law.
fn gof_p_value(n: usize, q: f64, draws: u64, mut sample: impl FnMut() -> Permutation) -> f64 {
    let pmf = enumerate_pmf(n, q).unwrap();
    let perms = all_permutations(n).unwrap();
    assert_eq!(pmf.len(), perms.len());
    let index = |p: &Permutation| -> usize {
        // lexicographic rank
        let v = p.to_one_based();
        let mut rank = 0;
        for i in 0..v.len() {
            let smaller_after = v[i + 1..].iter().filter(|&&x| x < v[i]).count();
            rank = rank * (v.len() - i) + smaller_after;
        }
        rank
    };
    for (k, (p, _)) in pmf.iter().enumerate() {
        assert_eq!(index(p), k, "enumeration order is lexicographic");
    }
    let mut counts = vec![0u64; pmf.len()];
    for _ in 0..draws {
        counts[index(&sample())] += 1;
    }
    let probs: Vec<f64> = pmf.iter().map(|(_, w)| *w).collect();
    chi_square_gof(&counts, &probs, 5.0).unwrap().p_value
}

#[test]
fn criterion_01_sampler_exactness() {
    let start = Instant::now();
    let mut worst = (1.0f64, String::new());
    let mut stream = 0;
    for n in [3usize, 4, 5] {
        for q in [0.3, 0.5, 0.8, 2.0] {
            stream += 1;
            let mut rng = RngStream::new(SEED, stream);
            let p_process = gof_p_value(n, q, 1_000_000, || {
                qmallows_process(n, q, &mut rng).unwrap().0.reverse()
            });
            stream += 1;
            let mut rng = RngStream::new(SEED, stream);
            let p_insertion = gof_p_value(n, q, 1_000_000, || {
                if q < 1.0 {
                    insertion_process_prefix(n, q, &mut rng).unwrap().0
                } else {
                    insertion_process_prefix(n, 1.0 / q, &mut rng)
                        .unwrap()
                        .0
                        .reverse()
                }
            });
            for (route, p) in [("process", p_process), ("insertion", p_insertion)] {
                if p < worst.0 {
                    worst = (p, format!("{route} n={n} q={q}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst.0 >= 1e-3 && elapsed < Duration::from_secs(120);
    verdict(
        1,
        pass,
        &format!(
            "24 chi-square tests, min p = {:.4} at {}, {:.1}s",
            worst.0,
            worst.1,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_02_reduction_soundness() {
    let start = Instant::now();
    let mut mismatches = 0;
    for i in 0..1000u64 {
        let mut rng = RngStream::new(SEED, i);
        let n = 1 + (i as usize % 128);
        let q = [0.3, 1.0, 2.0][i as usize % 3];
        let p = sample_mallows(n, q, &mut rng).unwrap();
        let t = sample_mallows(n, q, &mut rng).unwrap();
        if lcs(&p, &t).unwrap() != lcs_dp_oracle(&p, &t).unwrap() {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        mismatches == 0 && elapsed < Duration::from_secs(30),
        &format!(
            "{mismatches} mismatches in 1000 pairs, {:.1}s",
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_03_process_identities() {
    let n = 200usize;
    let mut failures = [0u32; 3];
    for r in 0..10_000u64 {
        let mut rng = RngStream::new(SEED, r);
        let q = [0.5, 1.0, 1.7][r as usize % 3];
        let (p, trace) = qmallows_process(n, q, &mut rng).unwrap();
        let v = p.to_one_based();
        let d = &trace.draws;
        let mut ok_rank_before = true;
        let mut ok_final_value = true;
        for i in 0..n {
            let above_before = v[..=i].iter().filter(|&&x| x > v[i]).count();
            let above_after = v[i + 1..].iter().filter(|&&x| x > v[i]).count();
            let i1 = i + 1;
            ok_rank_before &= i1 as u64 - d[i] == above_before as u64;
            ok_final_value &= v[i] as u64 + above_after as u64 == d[i] + (n - i1) as u64;
        }
        let sum: u64 = d.iter().sum();
        let ok_inv = p.inversion_count() == (n * (n + 1) / 2) as u64 - sum;
        for (k, ok) in [ok_rank_before, ok_final_value, ok_inv]
            .into_iter()
            .enumerate()
        {
            if !ok {
                failures[k] += 1;
            }
        }
    }
    verdict(
        3,
        failures == [0, 0, 0],
        &format!(
            "10^4 runs at n=200: failures rank-before={} final-value={} inversions={}",
            failures[0], failures[1], failures[2]
        ),
    );
}

#[test]
fn criterion_04_kac_mean() {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, (q, qp)) in [(0.5, 0.5), (0.3, 0.7)].into_iter().enumerate() {
        let mut rng = RngStream::new(SEED, k as u64);
        let times: Vec<f64> = (0..100_000)
            .map(|_| simulate_return_time(q, qp, &mut rng, DEFAULT_CAP).unwrap() as f64)
            .collect();
        let (mean, se) = mean_and_se(&times);
        let target = euler_z(q).unwrap() * euler_z(qp).unwrap();
        let z = (mean - target) / se;
        pass &= z.abs() <= 3.0;
        parts.push(format!("({q},{qp}): {mean:.4} vs {target:.4}, z={z:.2}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    verdict(
        4,
        pass,
        &format!("{}; {:.1}s", parts.join("; "), secs(elapsed)),
    );
}

#[test]
fn criterion_05_kac_second_moment() {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (k, (q, qp)) in [(0.5, 0.5), (0.3, 0.7)].into_iter().enumerate() {
        let law = StationaryLaw::new(q, qp).unwrap();
        let params = ChainParams::new(q, qp).unwrap();
        let samples = 1_000_000;

        let mut rng = RngStream::new(SEED, 2 * k as u64);
        let squares: Vec<f64> = (0..samples)
            .map(|_| {
                let r = simulate_return_time(q, qp, &mut rng, DEFAULT_CAP).unwrap() as f64;
                r * r
            })
            .collect();
        let (m2, se_m2) = mean_and_se(&squares);

        let mut rng = RngStream::new(SEED, 2 * k as u64 + 1);
        let hits: Vec<f64> = (0..samples)
            .map(|_| {
                let s = law.sample(&mut rng);
                hitting_time(&params, s, 0, &mut rng, DEFAULT_CAP).unwrap() as f64
            })
            .collect();
        let (e_nu, se_nu) = mean_and_se(&hits);
        let nu00 = law.nu00();
        let rhs = (2.0 * e_nu + 1.0) / nu00;
        let se_rhs = 2.0 * se_nu / nu00;
        let joint = (se_m2 * se_m2 + se_rhs * se_rhs).sqrt();
        let z = (m2 - rhs) / joint;
        pass &= z.abs() <= 3.0;
        parts.push(format!(
            "({q},{qp}): E R^2 = {m2:.3}, rhs = {rhs:.3}, z={z:.2}"
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    verdict(
        5,
        pass,
        &format!("{}; {:.1}s", parts.join("; "), secs(elapsed)),
    );
}

#[test]
fn criterion_06_stationary_law() {
    let cfg = ExperimentConfig {
        n: 10_000_000,
        q: Some(0.5),
        ..ExperimentConfig::new(ExperimentKind::Stationary, SEED)
    };
    let report = run_experiment(&cfg).unwrap();
    let tv = report.summary_f64("tv_distance").unwrap();
    verdict(
        6,
        tv < 0.01,
        &format!("TV distance {tv:.5} over 10^7 steps"),
    );
}

#[test]
fn criterion_07_renewal_coupling() {
    let (q, qp) = (0.5, 0.5);
    let mut rng = RngStream::new(SEED, 0);
    let mut chain_rng = RngStream::new(SEED, 0);
    let params = ChainParams::new(q, qp).unwrap();
    let mut sampler = BlockSampler::new(q, qp).unwrap();
    let mut chain = ProductChainState::ORIGIN;
    let (mut blocks, mut steps, mut mismatches) = (0u64, 0u64, 0u64);
    while blocks < 10_000 {
        let step = sampler.step(&mut rng);
        chain = params.step(chain, &mut chain_rng);
        steps += 1;
        let deficits = ProductChainState::new(step.deficits.0, step.deficits.1);
        if step.complete != chain.is_origin() || deficits != chain || step.chain != chain {
            mismatches += 1;
        }
        if step.complete {
            sampler.next_block(&mut rng, 0).ok();
            blocks += 1;
        }
    }
    verdict(
        7,
        mismatches == 0,
        &format!("{mismatches} mismatches over {blocks} blocks ({steps} steps)"),
    );
}

#[test]
fn criterion_08_sandwich_bounds() {
    let (n, q) = (2000usize, 0.4);
    let (mut lower_v, mut upper_v, mut tail_v) = (0, 0, 0);
    for r in 0..1000u64 {
        let mut rng = RngStream::new(SEED, r);
        let prefix = coupled_prefix(n, q, q, &mut rng, DEFAULT_CAP).unwrap();
        let l = lcs(&prefix.pi, &prefix.tau).unwrap() as u64;
        let (lo, hi) = prefix.sandwich_bounds();
        let (tlo, thi) = prefix.tail_length_bounds();
        lower_v += (l <= lo) as u32;
        upper_v += (l > hi) as u32;
        tail_v += (l <= tlo || l > thi) as u32;
    }
    verdict(
        8,
        lower_v == 0 && upper_v == 0,
        &format!(
            "1000 runs: {lower_v} lower and {upper_v} upper violations; \
             bound with the tail length instead of Y_(S_n): {tail_v} violations"
        ),
    );
}

#[test]
fn criterion_09_renewal_index() {
    let (q, n) = (0.5, 1_000_000u64);
    let params = ChainParams::new(q, q).unwrap();
    let nu00 = StationaryLaw::new(q, q).unwrap().nu00();
    let mut worst: f64 = 0.0;
    let mut within = 0;
    for r in 0..20 {
        let mut rng = RngStream::new(SEED, r);
        let s = renewal_index(&params, n, &mut rng).unwrap();
        let dev = (s as f64 / n as f64 - nu00).abs();
        worst = worst.max(dev);
        within += (dev < 0.005) as u32;
    }
    verdict(
        9,
        within == 20,
        &format!("{within}/20 runs within 0.005 of nu00 = {nu00:.5}; max deviation {worst:.5}"),
    );
}

fn weak_law_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        n: 1_000_000,
        q: Some(1.0 - 1e-4),
        replicas: 20,
        workers,
        ..ExperimentConfig::new(ExperimentKind::WeakLaw, SEED)
    }
}

fn finite_beta_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        n: 10_000,
        beta: Some(2.0),
        replicas: 200,
        workers,
        ..ExperimentConfig::new(ExperimentKind::FiniteBeta, SEED)
    }
}

fn clt_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        n: 4000,
        q: Some(0.3),
        replicas: 2000,
        workers,
        ..ExperimentConfig::new(ExperimentKind::Clt, SEED)
    }
}

#[test]
fn criterion_10_weak_law() {
    let start = Instant::now();
    let report = run_experiment(&weak_law_config(4)).unwrap();
    let elapsed = start.elapsed();
    let s = report.stats.unwrap();
    let dev = report.relative_deviation.unwrap();
    verdict(
        10,
        dev < 0.10 && elapsed < Duration::from_secs(600),
        &format!(
            "mean {:.5} (SE {:.5}) vs {:.5}, relative deviation {:.2}%, {:.1}s",
            s.mean,
            s.std_error,
            weak_law_constant(),
            100.0 * dev,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_11_finite_beta() {
    let start = Instant::now();
    let report = run_experiment(&finite_beta_config(4)).unwrap();
    let elapsed = start.elapsed();
    let s = report.stats.unwrap();
    let dev = report.relative_deviation.unwrap();
    verdict(
        11,
        dev < 0.05 && elapsed < Duration::from_secs(120),
        &format!(
            "mean {:.5} (SE {:.5}) vs 2J(2) = {:.5}, relative deviation {:.2}%, {:.1}s",
            s.mean,
            s.std_error,
            report.target.unwrap(),
            100.0 * dev,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_12_clt() {
    let start = Instant::now();
    let report = run_experiment(&clt_config(4)).unwrap();
    let elapsed = start.elapsed();
    let s = report.stats.unwrap();
    let pass = s.skewness.abs() < 0.15
        && s.excess_kurtosis.abs() < 0.3
        && s.ks_statistic_vs_normal < 0.04
        && elapsed < Duration::from_secs(600);
    verdict(
        12,
        pass,
        &format!(
            "mean {:.4} (SE {:.4}), skewness {:.4}, excess kurtosis {:.4}, KS {:.4}, {:.1}s",
            s.mean,
            s.std_error,
            s.skewness,
            s.excess_kurtosis,
            s.ks_statistic_vs_normal,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_13_j_bar_asymptotics() {
    let small = j_bar(1e-6, 1e-10).unwrap().value;
    let large = j_bar(400.0, 1e-10).unwrap().value;
    let inv_sqrt6 = 1.0 / 6f64.sqrt();
    let rel = (large / 20.0 - inv_sqrt6).abs() / inv_sqrt6;
    let mut max_integrand: f64 = 0.0;
    for beta in [
        1e-6, 0.01, 0.1, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 400.0, 1e4,
    ] {
        for k in 0..10_000 {
            let x = k as f64 / 9_999.0;
            max_integrand = max_integrand.max(j_bar_integrand(beta, x));
        }
    }
    let pass = (small - 1.0).abs() <= 1e-4 && rel < 0.01 && max_integrand < 5f64.sqrt();
    verdict(
        13,
        pass,
        &format!(
            "J(1e-6) = {small:.8}, J(400)/20 off 1/sqrt6 by {:.3}%, max integrand {max_integrand:.6} < sqrt5",
            100.0 * rel
        ),
    );
}

#[test]
fn criterion_14_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut detail = Vec::new();
    type MakeConfig = fn(usize) -> ExperimentConfig;
    let configs: [(&str, MakeConfig); 3] = [
        ("weak_law", weak_law_config),
        ("finite_beta", finite_beta_config),
        ("clt", clt_config),
    ];
    for (name, make) in configs {
        let mut files: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
        for workers in [1, 4, 16] {
            let report = run_experiment(&make(workers)).unwrap();
            let json = dir.path().join(format!("{name}_{workers}.json"));
            let csv = dir.path().join(format!("{name}_{workers}.csv"));
            emit(&report, &json, OutputFormat::Json).unwrap();
            emit(&report, &csv, OutputFormat::Csv).unwrap();
            files.push((std::fs::read(&json).unwrap(), std::fs::read(&csv).unwrap()));
        }
        let same = files.windows(2).all(|w| w[0] == w[1]);
        identical &= same;
        detail.push(format!(
            "{name}: {}",
            if same { "identical" } else { "DIFFER" }
        ));
    }
    verdict(
        14,
        identical,
        &format!("workers 1/4/16, JSON and CSV: {}", detail.join(", ")),
    );
}
