//! The Monte Carlo experiments.

use std::collections::BTreeMap;

use mallows_core::limits::{j_bar, weak_law_constant, DEFAULT_TOLERANCE};
use mallows_core::regeneration::{
    coupled_prefix, BlockMoments, BlockSampler, ChainParams, CltEstimate, ProductChainState,
    StationaryLaw, DEFAULT_CAP,
};
use mallows_core::sampling::sample_mallows;
use mallows_core::subsequence::lcs;
use mallows_core::RngStream;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{config_err, SimResult};
use crate::runner::map_indexed;
use crate::stats::{mean_and_se, SummaryStats};

/// Stream offset for the CLT block estimates, far above any replica index.
pub const CLT_BLOCK_STREAM_BASE: u64 = 1 << 40;
/// Blocks per stream in the CLT estimation phase.
pub const CLT_BLOCK_CHUNK: u64 = 1 << 16;
/// Occupation frequencies are compared on `{i + j <= STATIONARY_LEVEL}`.
pub const STATIONARY_LEVEL: u64 = 10;

/// Row-level data behind a report, written by CSV output.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportRows {
    /// `replica,value`.
    Values(Vec<f64>),
    /// `j,x,y` per renewal block.
    Blocks(Vec<(u64, u64)>),
    /// `i,j,empirical,stationary` per chain state.
    Occupation(Vec<(u64, u64, f64, f64)>),
}

impl ReportRows {
    pub fn len(&self) -> usize {
        match self {
            ReportRows::Values(v) => v.len(),
            ReportRows::Blocks(v) => v.len(),
            ReportRows::Occupation(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SummaryStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// `|mean - target| / target`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_deviation: Option<f64>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip)]
    pub rows: ReportRows,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, rows: ReportRows) -> Self {
        let versions = BTreeMap::from([
            (
                "mallows-core".to_string(),
                mallows_core::VERSION.to_string(),
            ),
            (
                "mallows-sim".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
        ]);
        ExperimentReport {
            config: config.clone(),
            seed: config.seed,
            versions,
            stats: None,
            target: None,
            relative_deviation: None,
            summary: BTreeMap::new(),
            rows,
        }
    }

    fn with_target(mut self, target: f64) -> Self {
        if let Some(s) = &self.stats {
            self.relative_deviation = Some((s.mean - target).abs() / target);
        }
        self.target = Some(target);
        self
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn values(&self) -> &[f64] {
        match &self.rows {
            ReportRows::Values(v) => v,
            _ => &[],
        }
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> SimResult<()> {
    if cfg.kind != kind {
        return Err(config_err(format!(
            "expected a {kind} config, got {}",
            cfg.kind
        )));
    }
    cfg.validate()
}

fn sampled_lcs(n: usize, q: f64, rng: &mut RngStream) -> SimResult<usize> {
    let p = sample_mallows(n, q, rng)?;
    let t = sample_mallows(n, q, rng)?;
    Ok(lcs(&p, &t)?)
}

/// `LCS(pi, tau) / (n sqrt(1 - q))` over independent Mallows pairs.
pub fn run_weak_law(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    expect_kind(cfg, ExperimentKind::WeakLaw)?;
    let q = cfg.effective_q()?;
    let n = cfg.n as usize;
    let scale = n as f64 * (1.0 - q).sqrt();
    let values = map_indexed(cfg.workers, cfg.replicas, |r| {
        let mut rng = RngStream::new(cfg.seed, r);
        Ok(sampled_lcs(n, q, &mut rng)? as f64 / scale)
    })?;
    let mut report = ExperimentReport::new(cfg, ReportRows::Values(values));
    report.stats = Some(SummaryStats::from_sample(report.values())?);
    report.put("q", q);
    Ok(report.with_target(weak_law_constant()))
}

/// `LCS(pi, tau) / sqrt(n)` with `q = 1 - beta / n`.
pub fn run_finite_beta(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    expect_kind(cfg, ExperimentKind::FiniteBeta)?;
    let q = cfg.effective_q()?;
    let beta = cfg.beta.expect("validated");
    let n = cfg.n as usize;
    let jb = j_bar(beta, DEFAULT_TOLERANCE)?;
    let values = map_indexed(cfg.workers, cfg.replicas, |r| {
        let mut rng = RngStream::new(cfg.seed, r);
        Ok(sampled_lcs(n, q, &mut rng)? as f64 / (n as f64).sqrt())
    })?;
    let mut report = ExperimentReport::new(cfg, ReportRows::Values(values));
    report.stats = Some(SummaryStats::from_sample(report.values())?);
    report.put("q", q);
    report.put("j_bar", jb.value);
    report.put("j_bar_abs_error", jb.abs_error_estimate);
    Ok(report.with_target(2.0 * jb.value))
}

/// Moments of `blocks` renewal blocks, generated on streams
/// `CLT_BLOCK_STREAM_BASE + c`, `CLT_BLOCK_CHUNK` blocks per stream.
pub fn block_moments(
    q: f64,
    q_prime: f64,
    blocks: u64,
    seed: u64,
    workers: usize,
) -> SimResult<BlockMoments> {
    let chunks = blocks.div_ceil(CLT_BLOCK_CHUNK);
    let parts = map_indexed(workers, chunks, |c| {
        let mut rng = RngStream::new(seed, CLT_BLOCK_STREAM_BASE + c);
        let mut sampler = BlockSampler::new(q, q_prime)?;
        let count = CLT_BLOCK_CHUNK.min(blocks - c * CLT_BLOCK_CHUNK);
        let mut m = BlockMoments::default();
        for _ in 0..count {
            let (x, y) = sampler.next_xy(&mut rng, DEFAULT_CAP)?;
            m.push(x, y);
        }
        Ok(m)
    })?;
    let mut total = BlockMoments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// Standardized LCS of coupled Mallows prefixes.
///
/// The constants are estimated from renewal blocks first. Values are
/// `(LCS - a n) / (sigma sqrt n)` with the renewal-reward ratio estimate of
/// `a`; the plain `nu00 * mean(Y)` estimate is reported alongside. Every
/// replica is also checked against the block sandwich bounds.
pub fn run_clt(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    expect_kind(cfg, ExperimentKind::Clt)?;
    let q = cfg.effective_q()?;
    let q_prime = cfg.effective_q_prime()?;
    let law = StationaryLaw::new(q, q_prime)?;
    let moments = block_moments(q, q_prime, cfg.effective_blocks(), cfg.seed, cfg.workers)?;
    let est = CltEstimate::from_moments(&moments, &law)?;

    let n = cfg.n as usize;
    let raw = map_indexed(cfg.workers, cfg.replicas, |r| {
        let mut rng = RngStream::new(cfg.seed, r);
        let prefix = coupled_prefix(n, q, q_prime, &mut rng, DEFAULT_CAP)?;
        let l = lcs(&prefix.pi, &prefix.tau)? as u64;
        Ok((l, prefix.sandwich_bounds(), prefix.tail_length_bounds()))
    })?;

    let center = est.a_ratio_hat * n as f64;
    let scale = est.sigma_ratio_hat * (n as f64).sqrt();
    let values: Vec<f64> = raw
        .iter()
        .map(|&(l, _, _)| (l as f64 - center) / scale)
        .collect();
    let lower_violations = raw.iter().filter(|(l, (lo, _), _)| l <= lo).count();
    let upper_violations = raw.iter().filter(|(l, (_, hi), _)| l > hi).count();
    let tail_violations = raw
        .iter()
        .filter(|(l, _, (lo, hi))| l <= lo || l > hi)
        .count();
    let lcs_values: Vec<f64> = raw.iter().map(|&(l, _, _)| l as f64).collect();
    let (lcs_mean, lcs_se) = mean_and_se(&lcs_values);

    let mut report = ExperimentReport::new(cfg, ReportRows::Values(values));
    report.stats = Some(SummaryStats::from_standardized(report.values())?);
    report.put("a_hat", est.a_hat);
    report.put("delta2_hat", est.delta2_hat);
    report.put("sigma_hat", est.sigma_hat);
    report.put("se_a", est.se_a);
    report.put("a_ratio_hat", est.a_ratio_hat);
    report.put("delta2_ratio_hat", est.delta2_ratio_hat);
    report.put("sigma_ratio_hat", est.sigma_ratio_hat);
    report.put("se_a_ratio", est.se_a_ratio);
    report.put("nu00", est.nu00);
    report.put("n_blocks", est.n_blocks);
    report.put("mean_block_length", moments.mean_x());
    report.put("lcs_mean", lcs_mean);
    report.put("lcs_std_error", lcs_se);
    report.put("sandwich_lower_violations", lower_violations as u64);
    report.put("sandwich_upper_violations", upper_violations as u64);
    report.put("tail_bound_violations", tail_violations as u64);
    Ok(report)
}

/// `(X_j, Y_j)` of consecutive renewal blocks of a single coupled run.
pub fn run_renewal(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    expect_kind(cfg, ExperimentKind::Renewal)?;
    let q = cfg.effective_q()?;
    let q_prime = cfg.effective_q_prime()?;
    let law = StationaryLaw::new(q, q_prime)?;
    let count = cfg.blocks.expect("validated");
    let mut rng = RngStream::new(cfg.seed, 0);
    let mut sampler = BlockSampler::new(q, q_prime)?;
    let mut rows = Vec::with_capacity(count as usize);
    let mut moments = BlockMoments::default();
    for _ in 0..count {
        let (x, y) = sampler.next_xy(&mut rng, DEFAULT_CAP)?;
        moments.push(x, y);
        rows.push((x, y));
    }
    let est = CltEstimate::from_moments(&moments, &law)?;
    let mut report = ExperimentReport::new(cfg, ReportRows::Blocks(rows));
    report.put("a_hat", est.a_hat);
    report.put("delta2_hat", est.delta2_hat);
    report.put("sigma_hat", est.sigma_hat);
    report.put("nu00", est.nu00);
    report.put("se_a", est.se_a);
    report.put("mean_block_length", moments.mean_x());
    report.put("mean_return_time", law.mean_return_time());
    Ok(report)
}

/// The five keys printed by the `renewal` command.
pub fn renewal_summary(report: &ExperimentReport) -> Value {
    let get = |k: &str| report.summary.get(k).cloned().unwrap_or(Value::Null);
    json!({
        "a_hat": get("a_hat"),
        "delta2_hat": get("delta2_hat"),
        "sigma_hat": get("sigma_hat"),
        "nu00": get("nu00"),
        "se_a": get("se_a"),
    })
}

/// Visit counts of `{i + j <= level}` (row-major by `i`) and of the rest,
/// over `steps` steps of the chain started at the origin.
pub fn occupation_counts(
    params: &ChainParams,
    steps: u64,
    level: u64,
    rng: &mut RngStream,
) -> (Vec<u64>, u64) {
    let l = level as usize;
    let offsets: Vec<usize> = (0..=l).map(|i| i * (2 * l + 3 - i) / 2).collect();
    let index = |s: ProductChainState| offsets[s.m as usize] + s.m_prime as usize;
    let cells = (l + 1) * (l + 2) / 2;
    let mut counts = vec![0u64; cells];
    let mut rest = 0u64;
    let mut s = ProductChainState::ORIGIN;
    for _ in 0..steps {
        s = params.step(s, rng);
        if s.level() <= level {
            counts[index(s)] += 1;
        } else {
            rest += 1;
        }
    }
    (counts, rest)
}

/// Occupation frequencies of the product chain against its stationary law.
pub fn run_stationary(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    expect_kind(cfg, ExperimentKind::Stationary)?;
    let q = cfg.effective_q()?;
    let q_prime = cfg.effective_q_prime()?;
    let law = StationaryLaw::new(q, q_prime)?;
    let params = ChainParams::new(q, q_prime)?;
    let steps = cfg.n;
    let mut rng = RngStream::new(cfg.seed, 0);
    let (counts, rest) = occupation_counts(&params, steps, STATIONARY_LEVEL, &mut rng);

    let mut rows = Vec::with_capacity(counts.len());
    let mut k = 0;
    for i in 0..=STATIONARY_LEVEL {
        for j in 0..=(STATIONARY_LEVEL - i) {
            rows.push((i, j, counts[k] as f64 / steps as f64, law.pmf(i, j)));
            k += 1;
        }
    }
    let inside: f64 = rows.iter().map(|r| (r.2 - r.3).abs()).sum();
    let rest_emp = rest as f64 / steps as f64;
    let rest_law = (1.0 - law.mass_up_to_level(STATIONARY_LEVEL)).max(0.0);
    let tv = 0.5 * (inside + (rest_emp - rest_law).abs());

    let mut report = ExperimentReport::new(cfg, ReportRows::Occupation(rows));
    report.put("tv_distance", tv);
    report.put("level", STATIONARY_LEVEL);
    report.put("steps", steps);
    report.put("outside_empirical", rest_emp);
    report.put("outside_stationary", rest_law);
    report.put("nu00", law.nu00());
    Ok(report)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> SimResult<ExperimentReport> {
    match cfg.kind {
        ExperimentKind::WeakLaw => run_weak_law(cfg),
        ExperimentKind::FiniteBeta => run_finite_beta(cfg),
        ExperimentKind::Clt => run_clt(cfg),
        ExperimentKind::Renewal => run_renewal(cfg),
        ExperimentKind::Stationary => run_stationary(cfg),
    }
}
