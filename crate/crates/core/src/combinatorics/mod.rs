//! Exact Catalan combinatorics.
//!
//! Catalan numbers, their convolution powers, the tail sums
//! `r(l) = sum_{i >= l} C_i / 4^i`, cycle-class multiplicity tables and the
//! generating sums `s1`, `s2` and `s(p, M)`. Integers are `BigUint` and
//! rationals `BigRational` throughout; log-space variants cover ranges where
//! exact values get unwieldy.

mod cycles;
mod sums;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub use cycles::{
    enumerate_cycle_classes, enumerate_cycle_classes_capped, verify_bsizes, BTables, BsizesReport, BsizesRow,
    CycleClassTable, DEFAULT_CYCLE_CAP, MAX_CYCLE_CAP,
};
pub use sums::{
    ln_binomial, positive_conv_ln, s1_exact, s1_ln, s2_estimate_ln, s2_exact, s_of_m_estimate_ln, s_of_m_exact,
    LnFactorials,
};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C_l = binom(2l, l) / (l + 1)`.
pub fn catalan(l: usize) -> BigUint {
    binomial(2 * l as u64, l as u64) / BigUint::from(l as u64 + 1)
}

/// `C_0 .. C_lmax`.
#[derive(Clone, Debug)]
pub struct CatalanTable {
    values: Vec<BigUint>,
}

impl CatalanTable {
    pub fn new(lmax: usize) -> Self {
        Self { values: (0..=lmax).map(catalan).collect() }
    }

    pub fn get(&self, l: usize) -> &BigUint {
        &self.values[l]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

/// Truncated product of two power series.
fn convolve(a: &[BigUint], b: &[BigUint], len: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Coefficients `0..=l` of `g(x)^s` for the series `g`.
fn series_power(g: &[BigUint], s: usize, l: usize) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero(); l + 1];
    acc[0] = BigUint::one();
    for _ in 0..s {
        acc = convolve(&acc, g, l + 1);
    }
    acc
}

/// `sigma(l, s)`: sum of `C_{l_1} ... C_{l_s}` over `l_i >= 0` with `l_1 + ... + l_s = l`.
pub fn sigma_conv(l: usize, s: usize) -> Result<BigUint> {
    if s == 0 {
        return Err(invalid("sigma_conv needs s >= 1"));
    }
    let c: Vec<BigUint> = (0..=l).map(catalan).collect();
    Ok(series_power(&c, s, l).swap_remove(l))
}

/// Sum of `C_{l_1} ... C_{l_s}` over `l_i >= 1` with `l_1 + ... + l_s = l`; zero when `l < s`.
pub fn positive_conv(l: usize, s: usize) -> Result<BigUint> {
    if s == 0 {
        return Err(invalid("positive_conv needs s >= 1"));
    }
    if l < s {
        return Ok(BigUint::zero());
    }
    let mut c: Vec<BigUint> = (0..=l).map(catalan).collect();
    c[0] = BigUint::zero();
    Ok(series_power(&c, s, l).swap_remove(l))
}

/// Positive convolutions `P[s][l]` for `1 <= s <= smax`, `0 <= l <= lmax`
/// (row 0 is unused).
pub fn positive_conv_table(smax: usize, lmax: usize) -> Vec<Vec<BigUint>> {
    let mut c: Vec<BigUint> = (0..=lmax).map(catalan).collect();
    c[0] = BigUint::zero();
    let mut rows = vec![vec![BigUint::zero(); lmax + 1]];
    let mut acc = vec![BigUint::zero(); lmax + 1];
    acc[0] = BigUint::one();
    for _ in 1..=smax {
        acc = convolve(&acc, &c, lmax + 1);
        rows.push(acc.clone());
    }
    rows
}

/// Checks `positive_conv(l, s) = sigma_conv(l - s, 2s)` exactly.
pub fn verify_lemma4(l: usize, s: usize) -> Result<bool> {
    if s == 0 || l < s {
        return Err(invalid(format!("verify_lemma4 needs l >= s >= 1, got l = {l}, s = {s}")));
    }
    Ok(positive_conv(l, s)? == sigma_conv(l - s, 2 * s)?)
}

/// Value of `r(l) = sum_{i >= l} C_i / 4^i` with an error bound.
#[derive(Clone, Debug)]
pub struct RTail {
    pub l: usize,
    /// Partial sum over `l <= i <= l + 200`.
    pub partial: f64,
    /// The neglected terms lie in `[0, remainder_bound]`.
    pub remainder_bound: f64,
    /// The value used inside products, where `r(0)` is taken to be 0.
    pub convention_value: f64,
}

/// Number of explicit terms in [`r_tail`].
pub const R_TAIL_TERMS: usize = 200;

/// `r(l)` from a partial sum plus the remainder bound
/// `C_i / 4^i <= i^(-3/2) / sqrt(pi)`, i.e. a tail of at most `2 / sqrt(pi N)`
/// past index `N`.
pub fn r_tail(l: usize) -> RTail {
    let last = l + R_TAIL_TERMS;
    // t_i = C_i / 4^i via t_{i+1} = t_i (2i + 1) / (2i + 4).
    let mut t = 1.0f64;
    let mut partial = 0.0;
    for i in 0..=last {
        if i >= l {
            partial += t;
        }
        t *= (2 * i + 1) as f64 / (2 * i + 4) as f64;
    }
    let remainder_bound = 2.0 / (std::f64::consts::PI * last as f64).sqrt();
    RTail { l, partial, remainder_bound, convention_value: if l == 0 { 0.0 } else { partial } }
}

/// `C_i / 4^i` as an exact rational.
fn catalan_over_4pow(i: usize) -> BigRational {
    BigRational::new(BigInt::from(catalan(i)), BigInt::from(BigUint::one() << (2 * i)))
}

/// Exact `r(l)` through `sum_{i >= 0} C_i / 4^i = c(1/4) = 2`, so the tail is
/// `2 - sum_{i < l} C_i / 4^i`. With `with_convention`, `r(0)` is returned as 0.
pub fn r_tail_exact(l: usize, with_convention: bool) -> BigRational {
    if l == 0 && with_convention {
        return BigRational::zero();
    }
    let head = (0..l).fold(BigRational::zero(), |acc, i| acc + catalan_over_4pow(i));
    BigRational::from_integer(BigInt::from(2)) - head
}

/// Outcome of the two-sided convolution bound at one `(l, s)`.
#[derive(Clone, Debug)]
pub struct Lemma78Report {
    pub l: usize,
    pub s: usize,
    pub sigma: BigUint,
    /// `2^-s C_{l+s} prod_{i < s} (1 + r(i)/2)`, with `r(0) = 0`.
    pub upper_bound: BigRational,
    pub upper_holds: bool,
    /// `C_l / 4 * ((5/4)^s - 1)`, checked only when `l > s`.
    pub lower_bound: Option<BigRational>,
    pub lower_holds: Option<bool>,
}

impl Lemma78Report {
    pub fn holds(&self) -> bool {
        self.upper_holds && self.lower_holds.unwrap_or(true)
    }
}

/// Checks both convolution bounds exactly; `r` is exact so no rounding is involved.
pub fn verify_lemma78(l: usize, s: usize) -> Result<Lemma78Report> {
    if l == 0 || s == 0 {
        return Err(invalid(format!("verify_lemma78 needs l, s >= 1, got l = {l}, s = {s}")));
    }
    let sigma = sigma_conv(l, s)?;
    let sigma_q = BigRational::from_integer(BigInt::from(sigma.clone()));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut upper = BigRational::new(BigInt::from(catalan(l + s)), BigInt::from(BigUint::one() << s));
    for i in 0..s {
        upper *= BigRational::one() + r_tail_exact(i, true) * &half;
    }
    let upper_holds = sigma_q <= upper;
    let (lower_bound, lower_holds) = if l > s {
        let five_fourths = BigRational::new(BigInt::from(5), BigInt::from(4));
        let pow = (0..s).fold(BigRational::one(), |acc, _| acc * &five_fourths);
        let lower = BigRational::new(BigInt::from(catalan(l)), BigInt::from(4)) * (pow - BigRational::one());
        let ok = sigma_q >= lower;
        (Some(lower), Some(ok))
    } else {
        (None, None)
    };
    Ok(Lemma78Report { l, s, sigma, upper_bound: upper, upper_holds, lower_bound, lower_holds })
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(x: &BigRational) -> f64 {
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}
