//! Analytic constants of the LCS limit laws.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// `sqrt(6) / 3`, the limit of `LCS / (n sqrt(1 - q))` when `n (1 - q) -> inf`.
pub fn weak_law_constant() -> f64 {
    // sqrt(6)/3 = 2/sqrt(6)
    0.816_496_580_927_726_f64
}

/// `J(0+)`. The defining formula is `0/0` at `beta = 0`; this is its limit,
/// giving the classical `2 sqrt(n)` for uniform permutations.
pub const J_BAR_AT_ZERO: f64 = 1.0;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

const MIN_DEPTH: u32 = 4;
const MAX_DEPTH: u32 = 60;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// Adaptive Simpson on `[a, b]` with an absolute tolerance.
///
/// A panel is accepted once `|S_left + S_right - S_whole| <= 15 tol`; its
/// Richardson-extrapolated value is added and `|difference| / 15`, plus a
/// rounding floor of `EPSILON` times the panel value, is added to the error
/// estimate. Children split the parent tolerance in half.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("integration bounds must be finite with a < b"));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut evaluations = 3usize;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut stack: Vec<Panel> = Vec::new();
    stack.push(Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        depth: 0,
    });
    while let Some(p) = stack.pop() {
        if evaluations + 2 > budget {
            return Err(Error::BudgetExceeded {
                budget,
                estimate: err,
            });
        }
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        evaluations += 2;
        let h = (p.b - p.a) / 12.0;
        let left = h * (p.fa + 4.0 * flm + p.fm);
        let right = h * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        if (p.depth >= MIN_DEPTH && delta.abs() <= 15.0 * p.tol) || p.depth >= MAX_DEPTH {
            value += left + right + delta / 15.0;
            err += delta.abs() / 15.0 + f64::EPSILON * (left + right).abs();
        } else {
            let tol = 0.5 * p.tol;
            let depth = p.depth + 1;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol,
                depth,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol,
                depth,
            });
        }
    }
    if err > tol {
        return Err(Error::BudgetExceeded {
            budget,
            estimate: err,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: err,
        evaluations,
    })
}

/// `sqrt(1 + 2 cosh(beta (2x - 1) / 2) / cosh(beta / 2))`, written with
/// decaying exponentials only so it stays finite for any `beta > 0`.
pub fn j_bar_integrand(beta: f64, x: f64) -> f64 {
    let num = libm::exp(beta * (x - 1.0)) + libm::exp(-beta * x);
    libm::sqrt(1.0 + 2.0 * num / (1.0 + libm::exp(-beta)))
}

/// `sqrt(beta cosh(beta/2) / (6 sinh(beta/2)))`.
pub fn j_bar_prefactor(beta: f64) -> f64 {
    libm::sqrt(beta / (6.0 * libm::tanh(0.5 * beta)))
}

/// `J(beta)`, the constant with `LCS / sqrt(n) -> 2 J(beta)` when
/// `n (1 - q) -> beta`.
pub fn j_bar(beta: f64, tol: f64) -> Result<QuadratureResult> {
    j_bar_with_budget(beta, tol, DEFAULT_BUDGET)
}

pub fn j_bar_with_budget(beta: f64, tol: f64, budget: usize) -> Result<QuadratureResult> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let scale = j_bar_prefactor(beta);
    let inner = adaptive_simpson(|x| j_bar_integrand(beta, x), 0.0, 1.0, tol / scale, budget)?;
    Ok(QuadratureResult {
        value: scale * inner.value,
        abs_error_estimate: scale * inner.abs_error_estimate,
        evaluations: inner.evaluations,
    })
}

/// `prod_{k >= 1} (1 - q^k)`.
///
/// Factors are multiplied until `q^K < 1e-17`; the remaining tail
/// `prod_{k >= K} (1 - q^k) = 1 - q^K / (1 - q) + O(q^{2K})` is applied as a
/// single correction factor.
pub fn euler_product(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q must lie in (0, 1), got {q}")));
    }
    let mut prod = 1.0f64;
    let mut power = q;
    while power >= 1e-17 {
        prod *= 1.0 - power;
        power *= q;
        if prod == 0.0 {
            return Err(invalid(format!("Euler product underflows at q = {q}")));
        }
    }
    prod *= 1.0 - power / (1.0 - q);
    Ok(prod)
}

/// `Z(q) = 1 / prod_{k >= 1} (1 - q^k)`.
pub fn euler_z(q: f64) -> Result<f64> {
    let z = 1.0 / euler_product(q)?;
    if z.is_finite() {
        Ok(z)
    } else {
        Err(invalid(format!("Z(q) overflows at q = {q}")))
    }
}
