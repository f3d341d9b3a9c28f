use alloc::format;

use crate::error::{invalid, Result};

use super::{RenewalBlock, StationaryLaw};

/// Exact integer moments of a stream of `(X_j, Y_j)` pairs.
///
/// Addition is exact and commutative, so partial accumulators from parallel
/// workers merge to the same totals in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BlockMoments {
    pub count: u64,
    pub sum_x: u128,
    pub sum_y: u128,
    pub sum_xx: u128,
    pub sum_yy: u128,
    pub sum_xy: u128,
}

impl BlockMoments {
    pub fn push(&mut self, x: u64, y: u64) {
        let (x, y) = (u128::from(x), u128::from(y));
        self.count += 1;
        self.sum_x += x;
        self.sum_y += y;
        self.sum_xx += x * x;
        self.sum_yy += y * y;
        self.sum_xy += x * y;
    }

    pub fn merge(&mut self, other: &BlockMoments) {
        self.count += other.count;
        self.sum_x += other.sum_x;
        self.sum_y += other.sum_y;
        self.sum_xx += other.sum_xx;
        self.sum_yy += other.sum_yy;
        self.sum_xy += other.sum_xy;
    }

    pub fn from_blocks<'a>(blocks: impl IntoIterator<Item = &'a RenewalBlock>) -> Self {
        let mut m = BlockMoments::default();
        for b in blocks {
            m.push(b.length, b.y);
        }
        m
    }

    pub fn mean_x(&self) -> f64 {
        self.sum_x as f64 / self.count as f64
    }

    pub fn mean_y(&self) -> f64 {
        self.sum_y as f64 / self.count as f64
    }

    fn centered(&self, sum_sq: u128, sum: u128) -> f64 {
        // N * sum_sq - sum^2, exact while it fits
        let n = u128::from(self.count);
        match n.checked_mul(sum_sq).zip(sum.checked_mul(sum)) {
            Some((a, b)) => (a - b) as f64 / n as f64,
            None => sum_sq as f64 - (sum as f64) * (sum as f64) / n as f64,
        }
    }

    /// Sample variance of `Y`.
    pub fn var_y(&self) -> f64 {
        self.centered(self.sum_yy, self.sum_y) / (self.count - 1) as f64
    }

    /// Sample variance of `X`.
    pub fn var_x(&self) -> f64 {
        self.centered(self.sum_xx, self.sum_x) / (self.count - 1) as f64
    }

    /// Sample covariance of `X` and `Y`.
    pub fn cov_xy(&self) -> f64 {
        let n = u128::from(self.count);
        let cross = match n
            .checked_mul(self.sum_xy)
            .zip(self.sum_x.checked_mul(self.sum_y))
        {
            Some((a, b)) => (a as f64 - b as f64) / n as f64,
            None => self.sum_xy as f64 - self.mean_x() * self.sum_y as f64,
        };
        cross / (self.count - 1) as f64
    }

    /// Sample variance of `Y - a X`.
    pub fn var_residual(&self, a: f64) -> f64 {
        (self.var_y() - 2.0 * a * self.cov_xy() + a * a * self.var_x()).max(0.0)
    }
}

/// Plug-in estimates of the CLT constants `a` and `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltEstimate {
    /// `nu00 * mean(Y)`.
    pub a_hat: f64,
    /// Sample variance of `Y - a_hat X`.
    pub delta2_hat: f64,
    /// `sqrt(delta2_hat * nu00)`.
    pub sigma_hat: f64,
    pub nu00: f64,
    pub n_blocks: u64,
    /// `nu00 * sd(Y) / sqrt(N)`.
    pub se_a: f64,
    /// Renewal-reward ratio `mean(Y) / mean(X)`, another estimator of `a`.
    pub a_ratio_hat: f64,
    /// Delta-method standard error of `a_ratio_hat`.
    pub se_a_ratio: f64,
    /// Sample variance of `Y - a_ratio_hat X`.
    pub delta2_ratio_hat: f64,
    /// `sqrt(delta2_ratio_hat * nu00)`.
    pub sigma_ratio_hat: f64,
}

impl CltEstimate {
    pub fn from_moments(m: &BlockMoments, law: &StationaryLaw) -> Result<Self> {
        if m.count < 2 {
            return Err(invalid(format!("need at least 2 blocks, got {}", m.count)));
        }
        let nu00 = law.nu00();
        let n = m.count as f64;
        let a_hat = nu00 * m.mean_y();
        let delta2_hat = m.var_residual(a_hat);
        let se_a = nu00 * libm::sqrt(m.var_y() / n);
        let a_ratio_hat = m.mean_y() / m.mean_x();
        let delta2_ratio_hat = m.var_residual(a_ratio_hat);
        let se_a_ratio = libm::sqrt(delta2_ratio_hat / n) / m.mean_x();
        Ok(CltEstimate {
            a_hat,
            delta2_hat,
            sigma_hat: libm::sqrt(delta2_hat * nu00),
            nu00,
            n_blocks: m.count,
            se_a,
            a_ratio_hat,
            se_a_ratio,
            delta2_ratio_hat,
            sigma_ratio_hat: libm::sqrt(delta2_ratio_hat * nu00),
        })
    }
}

pub fn estimate_clt_params(blocks: &[RenewalBlock], law: &StationaryLaw) -> Result<CltEstimate> {
    CltEstimate::from_moments(&BlockMoments::from_blocks(blocks), law)
}
