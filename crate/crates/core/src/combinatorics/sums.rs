//! The generating sums `s1(theta, p)`, `s2(theta, p)` and `s(p, M)`.
//!
//! - `s1 = sum_{s >= 1, s <= l <= p - s/2} binom(2p-2l-1, s-1) theta^(2p-2l) P(l, s)`,
//!   with `P(l, s)` the positive convolution power of Catalan numbers.
//! - `s2 = sum binom(t, q+1) binom(2p-2l-1, q) b_{l,t} theta^(2p-2l)` over
//!   `1 <= l <= p-1`, `1 <= t <= l+1`, `0 <= q <= t-1`.
//! - `s(p, M) = M^(2p) + sum_{1 <= l <= p-1} M^(2l) sum_{t, l0}
//!   binom(l-l0+t-1, l-l0) binom(t, 2 l0) b_{p-l,t}` over `1 <= t <= p-l+1`,
//!   `0 <= l0 <= min(t/2, l)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{binomial, positive_conv_table, BTables};
use crate::error::{Error, Result};

/// `ln k!` for `k = 0..=kmax`.
#[derive(Clone, Debug)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(kmax: usize) -> Self {
        let mut table = Vec::with_capacity(kmax + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 1..=kmax {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }
}

pub fn ln_binomial(lf: &LnFactorials, n: usize, k: usize) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        lf.get(n) - lf.get(k) - lf.get(n - k)
    }
}

/// `ln P(l, s)` from the closed form `P(l, s) = (s / l) binom(2l, l - s)`
/// (the `2s`-fold Catalan convolution at `l - s`); needs `l >= s >= 1` and a
/// factorial table reaching `2l`.
pub fn positive_conv_ln(lf: &LnFactorials, l: usize, s: usize) -> f64 {
    if s == 0 || l < s {
        return f64::NEG_INFINITY;
    }
    (s as f64 / l as f64).ln() + ln_binomial(lf, 2 * l, l - s)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn q_int(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn even_powers(x: &BigRational, kmax: usize) -> Vec<BigRational> {
    let sq = x * x;
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(BigRational::one());
    for k in 1..=kmax {
        out.push(&out[k - 1] * &sq);
    }
    out
}

/// Exact `s1(theta, p)`.
pub fn s1_exact(theta: &BigRational, p: usize) -> BigRational {
    if p < 2 {
        return BigRational::zero();
    }
    let smax = 2 * p / 3;
    let table = positive_conv_table(smax, p);
    let pow = even_powers(theta, p);
    let mut total = BigRational::zero();
    for s in 1..=smax {
        let mut l = s;
        while 2 * l + s <= 2 * p {
            let conv = &table[s][l];
            if !conv.is_zero() {
                let coeff = binomial((2 * p - 2 * l - 1) as u64, (s - 1) as u64) * conv;
                total += q_int(coeff) * &pow[p - l];
            }
            l += 1;
        }
    }
    total
}

/// `ln s1(theta, p)` for `theta >= 0`; `-inf` when the sum vanishes.
pub fn s1_ln(theta: f64, p: usize, lf: &LnFactorials) -> f64 {
    if p < 2 || theta == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_theta = theta.ln();
    let mut terms = Vec::new();
    for s in 1..=2 * p / 3 {
        let mut l = s;
        while 2 * l + s <= 2 * p {
            terms.push(
                ln_binomial(lf, 2 * p - 2 * l - 1, s - 1)
                    + (2 * (p - l)) as f64 * ln_theta
                    + positive_conv_ln(lf, l, s),
            );
            l += 1;
        }
    }
    log_sum_exp(&terms)
}

fn require_tables(tables: &BTables, l: usize) -> Result<()> {
    if l > tables.max_l() {
        Err(Error::EnumerationCap { l, cap: tables.max_l() })
    } else {
        Ok(())
    }
}

/// Exact `s2(theta, p)`; needs cycle tables up to `l = p - 1`.
pub fn s2_exact(theta: &BigRational, p: usize, tables: &BTables) -> Result<BigRational> {
    if p < 2 {
        return Ok(BigRational::zero());
    }
    require_tables(tables, p - 1)?;
    let pow = even_powers(theta, p);
    let mut total = BigRational::zero();
    for l in 1..p {
        let mut inner = BigUint::zero();
        for t in 1..=l + 1 {
            let b = BigUint::from(tables.b(l, t));
            for q in 0..t {
                inner += binomial(t as u64, q as u64 + 1) * binomial((2 * p - 2 * l - 1) as u64, q as u64) * &b;
            }
        }
        total += q_int(inner) * &pow[p - l];
    }
    Ok(total)
}

/// Proxy for `b_{l,t}` beyond the enumerated range: the binomial
/// `binom(2l+1-t, l)` that brackets it up to polynomial factors in `l`.
fn ln_b_proxy(lf: &LnFactorials, l: usize, t: usize) -> f64 {
    ln_binomial(lf, 2 * l + 1 - t, l)
}

/// `ln s2(theta, p)` with every `b_{l,t}` replaced by its binomial proxy.
/// The result is an estimate, correct up to factors polynomial in `p`.
pub fn s2_estimate_ln(theta: f64, p: usize, lf: &LnFactorials) -> f64 {
    if p < 2 || theta == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_theta = theta.ln();
    let mut terms = Vec::new();
    for l in 1..p {
        for t in 1..=l + 1 {
            let b = ln_b_proxy(lf, l, t);
            for q in 0..t {
                terms.push(
                    (2 * (p - l)) as f64 * ln_theta
                        + ln_binomial(lf, t, q + 1)
                        + ln_binomial(lf, 2 * p - 2 * l - 1, q)
                        + b,
                );
            }
        }
    }
    log_sum_exp(&terms)
}

/// Exact `s(p, M)`; needs cycle tables up to `l = p - 1`.
pub fn s_of_m_exact(p: usize, m: &BigRational, tables: &BTables) -> Result<BigRational> {
    if p == 0 {
        return Ok(BigRational::one());
    }
    if p >= 2 {
        require_tables(tables, p - 1)?;
    }
    let pow = even_powers(m, p);
    let mut total = pow[p].clone();
    for l in 1..p {
        let mut inner = BigUint::zero();
        for t in 1..=p - l + 1 {
            let b = BigUint::from(tables.b(p - l, t));
            for l0 in 0..=(t / 2).min(l) {
                inner += binomial((l - l0 + t - 1) as u64, (l - l0) as u64) * binomial(t as u64, 2 * l0 as u64) * &b;
            }
        }
        total += q_int(inner) * &pow[l];
    }
    Ok(total)
}

/// `ln s(p, M)` with binomial proxies for `b`, as in [`s2_estimate_ln`].
pub fn s_of_m_estimate_ln(p: usize, m: f64, lf: &LnFactorials) -> f64 {
    if m == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_m = m.ln();
    let mut terms = vec![(2 * p) as f64 * ln_m];
    for l in 1..p {
        for t in 1..=p - l + 1 {
            let b = ln_b_proxy(lf, p - l, t);
            for l0 in 0..=(t / 2).min(l) {
                terms.push(
                    (2 * l) as f64 * ln_m
                        + ln_binomial(lf, l - l0 + t - 1, l - l0)
                        + ln_binomial(lf, t, 2 * l0)
                        + b,
                );
            }
        }
    }
    log_sum_exp(&terms)
}
