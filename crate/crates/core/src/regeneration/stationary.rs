use alloc::format;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::limits::euler_z;

use super::ProductChainState;

/// Stationary law of the product chain:
/// `nu_{i,j} = mu_i mu'_j` with `mu_i = q^i / (Z(q) prod_{k<=i} (1 - q^k))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryLaw {
    pub q: f64,
    pub q_prime: f64,
    pub z_q: f64,
    pub z_qprime: f64,
}

impl StationaryLaw {
    pub fn new(q: f64, q_prime: f64) -> Result<Self> {
        let z_q = euler_z(q).map_err(|e| invalid(format!("q: {e}")))?;
        let z_qprime = euler_z(q_prime).map_err(|e| invalid(format!("q': {e}")))?;
        Ok(StationaryLaw {
            q,
            q_prime,
            z_q,
            z_qprime,
        })
    }

    /// `nu_{0,0} = 1 / (Z(q) Z(q'))`.
    pub fn nu00(&self) -> f64 {
        1.0 / (self.z_q * self.z_qprime)
    }

    /// Mean return time to the origin, `Z(q) Z(q')`.
    pub fn mean_return_time(&self) -> f64 {
        self.z_q * self.z_qprime
    }

    fn marginal(q: f64, z: f64, i: u64) -> f64 {
        let mut mu = 1.0 / z;
        let mut power = 1.0;
        for _ in 0..i {
            power *= q;
            mu *= q / (1.0 - power);
            if mu == 0.0 {
                break;
            }
        }
        mu
    }

    /// `mu_i`, the law of `M` alone.
    pub fn marginal_pmf(&self, i: u64) -> f64 {
        Self::marginal(self.q, self.z_q, i)
    }

    /// `mu'_j`, the law of `M'` alone.
    pub fn marginal_prime_pmf(&self, j: u64) -> f64 {
        Self::marginal(self.q_prime, self.z_qprime, j)
    }

    pub fn pmf(&self, i: u64, j: u64) -> f64 {
        self.marginal_pmf(i) * self.marginal_prime_pmf(j)
    }

    /// `sum_{i + j <= level} nu_{i,j}`.
    pub fn mass_up_to_level(&self, level: u64) -> f64 {
        let mut total = 0.0;
        let mut mu = 1.0 / self.z_q;
        let mut power = 1.0;
        for i in 0..=level {
            if i > 0 {
                power *= self.q;
                mu *= self.q / (1.0 - power);
            }
            let mut inner = 0.0;
            let mut nu = 1.0 / self.z_qprime;
            let mut pp = 1.0;
            for j in 0..=(level - i) {
                if j > 0 {
                    pp *= self.q_prime;
                    nu *= self.q_prime / (1.0 - pp);
                }
                inner += nu;
            }
            total += mu * inner;
        }
        total
    }

    fn sample_marginal<R: Rng + ?Sized>(q: f64, z: f64, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let mut mu = 1.0 / z;
        let mut cdf = mu;
        let mut power = 1.0;
        let mut i = 0u64;
        while u >= cdf {
            i += 1;
            power *= q;
            mu *= q / (1.0 - power);
            if mu == 0.0 {
                // rounding left u above the representable total mass
                break;
            }
            cdf += mu;
        }
        i
    }

    /// A draw from `nu` by inverse CDF on each (independent) coordinate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ProductChainState {
        let m = Self::sample_marginal(self.q, self.z_q, rng);
        let m_prime = Self::sample_marginal(self.q_prime, self.z_qprime, rng);
        ProductChainState { m, m_prime }
    }
}

pub fn stationary_pmf(law: &StationaryLaw, i: u64, j: u64) -> f64 {
    law.pmf(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RngStream;

    fn closed_form(q: f64, i: u64) -> f64 {
        let z = euler_z(q).unwrap();
        let mut denom = z;
        for k in 1..=i {
            denom *= 1.0 - q.powi(k as i32);
        }
        q.powi(i as i32) / denom
    }

    #[test]
    fn nu00_at_one_half() {
        let law = StationaryLaw::new(0.5, 0.5).unwrap();
        assert!((law.nu00() - 1.0 / 3.462_746_619f64.powi(2)).abs() < 1e-9);
        assert!((law.nu00() - 0.08340).abs() < 1e-5);
        assert!((law.mean_return_time() - 11.9906).abs() < 1e-4);
        assert_eq!(stationary_pmf(&law, 0, 0), law.nu00());
    }

    #[test]
    fn product_form_and_closed_form() {
        let law = StationaryLaw::new(0.3, 0.7).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let nu = law.pmf(i, j);
                assert!(nu >= 0.0);
                assert_eq!(nu, law.marginal_pmf(i) * law.marginal_prime_pmf(j));
                let cf = closed_form(0.3, i) * closed_form(0.7, j);
                assert!((nu - cf).abs() <= 1e-13 * cf);
            }
        }
    }

    #[test]
    fn mass_is_nearly_one() {
        let law = StationaryLaw::new(0.5, 0.5).unwrap();
        assert!(law.mass_up_to_level(60) >= 1.0 - 1e-10);
        assert!(law.mass_up_to_level(60) <= 1.0 + 1e-12);
        let brute: f64 = (0..=5u64)
            .flat_map(|i| (0..=5 - i).map(move |j| (i, j)))
            .map(|(i, j)| law.pmf(i, j))
            .sum();
        assert!((brute - law.mass_up_to_level(5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StationaryLaw::new(0.0, 0.5).is_err());
        assert!(StationaryLaw::new(0.5, 1.0).is_err());
    }

    #[test]
    fn sampler_matches_marginal() {
        let law = StationaryLaw::new(0.5, 0.2).unwrap();
        let mut rng = RngStream::new(9, 0);
        let n = 200_000;
        let mut zero = 0;
        for _ in 0..n {
            if law.sample(&mut rng).is_origin() {
                zero += 1;
            }
        }
        let p = law.nu00();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((zero as f64 / n as f64) - p).abs() < 4.0 * se);
    }
}
