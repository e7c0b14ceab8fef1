//! The bracketing functions `G1`, `G2` and finite-`p` estimates of `F`.
//!
//! `G1(theta) = theta (2 - 2x) / (2 - 3x)` where `x` in `(0, 2/3)` solves
//! `(2 - 3x)^3 / (x (1 - x)^2) = theta^2`.
//!
//! `G2(theta) = theta (2 - 2x) / (2 - 7x/3)` where `x` in `(0, 6/7)` solves
//! `(6 - 7x)^(7/3) / (x^(1/3) (1 - x)^2) = 36 theta^2 / 5^(2/3)`.
//!
//! Both left-hand sides decrease strictly on their intervals, so bisection on
//! the log form followed by Newton polishing finds the root.

use serde::Serialize;

use crate::combinatorics::{s1_ln, LnFactorials};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GFunctionResult {
    pub value: f64,
    pub inner_root: f64,
    /// `|lhs / rhs - 1|` at the returned root.
    pub residual: f64,
}

const BRACKET_WIDTH: f64 = 1e-12;
const MAX_RESIDUAL: f64 = 1e-10;

/// Root of a strictly decreasing `g` on `(0, upper)` that tends to `+inf` at 0
/// and `-inf` at `upper`.
fn decreasing_root(g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, upper: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, upper);
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish. Near theta = 100 the root of G2 is ~1e-8, so a 1e-12
    // bracket alone leaves a relative residual around 1e-5 and a single
    // step is not always enough.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let gx = g(x);
        if gx.abs() < 1e-15 {
            break;
        }
        let next = x - gx / dg(x);
        if !(next > 0.0 && next < upper) {
            break;
        }
        x = next;
    }
    x
}

fn check_theta(theta: f64, function: &'static str) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Bracket { function, theta })
    }
}

pub fn g1(theta: f64) -> Result<GFunctionResult> {
    check_theta(theta, "G1")?;
    let target = 2.0 * theta.ln();
    let g = |x: f64| 3.0 * (2.0 - 3.0 * x).ln() - x.ln() - 2.0 * (1.0 - x).ln() - target;
    let dg = |x: f64| -9.0 / (2.0 - 3.0 * x) - 1.0 / x + 2.0 / (1.0 - x);
    let x = decreasing_root(g, dg, 2.0 / 3.0);
    let residual = g(x).exp_m1().abs();
    if !(x > 0.0 && x < 2.0 / 3.0) || !(residual < MAX_RESIDUAL) {
        return Err(Error::Bracket { function: "G1", theta });
    }
    Ok(GFunctionResult { value: theta * (2.0 - 2.0 * x) / (2.0 - 3.0 * x), inner_root: x, residual })
}

pub fn g2(theta: f64) -> Result<GFunctionResult> {
    check_theta(theta, "G2")?;
    let target = (36.0 * theta * theta).ln() - (2.0 / 3.0) * 5f64.ln();
    let g = |x: f64| (7.0 / 3.0) * (6.0 - 7.0 * x).ln() - x.ln() / 3.0 - 2.0 * (1.0 - x).ln() - target;
    let dg = |x: f64| -(49.0 / 3.0) / (6.0 - 7.0 * x) - 1.0 / (3.0 * x) + 2.0 / (1.0 - x);
    let x = decreasing_root(g, dg, 6.0 / 7.0);
    let residual = g(x).exp_m1().abs();
    if !(x > 0.0 && x < 6.0 / 7.0) || !(residual < MAX_RESIDUAL) {
        return Err(Error::Bracket { function: "G2", theta });
    }
    Ok(GFunctionResult { value: theta * (2.0 - 2.0 * x) / (2.0 - 7.0 * x / 3.0), inner_root: x, residual })
}

/// `s1(theta, p)^(1 / (2p))` in log space.
pub fn s1_root(theta: f64, p: usize, lf: &LnFactorials) -> f64 {
    (s1_ln(theta, p, lf) / (2 * p) as f64).exp()
}

/// Largest `p` accepted by [`estimate_f`].
pub const F_ESTIMATE_MAX_P: usize = 1000;
/// The `p` used when a single number is needed for the delocalized limit law.
pub const F_ESTIMATE_P: usize = 300;

/// Finite-`p` evidence for `F(theta)`: the sequence `s1(theta, p)^(1/(2p))`
/// for `2 <= p <= p_max` and the bracket `[max(2, G2), max(2, G1)]`.
#[derive(Clone, Debug, Serialize)]
pub struct FEstimate {
    pub theta: f64,
    pub sequence: Vec<(usize, f64)>,
    pub bracket: [f64; 2],
    pub g1: GFunctionResult,
    pub g2: GFunctionResult,
}

impl FEstimate {
    pub fn last(&self) -> Option<f64> {
        self.sequence.last().map(|&(_, v)| v)
    }
}

pub fn estimate_f(theta: f64, p_max: usize) -> Result<FEstimate> {
    if p_max < 2 || p_max > F_ESTIMATE_MAX_P {
        return Err(invalid(format!("p_max must lie in 2..={F_ESTIMATE_MAX_P}, got {p_max}")));
    }
    let g1 = g1(theta)?;
    let g2 = g2(theta)?;
    let lf = LnFactorials::new(2 * p_max + 2);
    let sequence = (2..=p_max).map(|p| (p, s1_root(theta, p, &lf))).collect();
    Ok(FEstimate { theta, sequence, bracket: [g2.value.max(2.0), g1.value.max(2.0)], g1, g2 })
}

/// Value used for `F(theta)` in the delocalized limit law: exactly 2 for
/// `theta <= 1`, otherwise `max(2, s1(theta, 300)^(1/600))`.
pub fn f_for_delocalized(theta: f64) -> f64 {
    if theta <= 1.0 {
        return 2.0;
    }
    let lf = LnFactorials::new(2 * F_ESTIMATE_P + 2);
    s1_root(theta, F_ESTIMATE_P, &lf).max(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_laws::f_bbp;

    #[test]
    fn g1_at_one() {
        let r = g1(1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
        assert!((r.inner_root - 0.5).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn g2_threshold() {
        let r = g2(128.0 / 89.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
        assert!((r.inner_root - 150.0 / 239.0).abs() < 1e-9);
    }

    #[test]
    fn wide_theta_range() {
        for k in 0..=400 {
            let theta = 0.01 * 10f64.powf(k as f64 / 100.0);
            let a = g1(theta).unwrap();
            let b = g2(theta).unwrap();
            assert!(a.residual < 1e-10 && b.residual < 1e-10);
            assert!(a.inner_root > 0.0 && a.inner_root < 2.0 / 3.0);
            assert!(b.inner_root > 0.0 && b.inner_root < 6.0 / 7.0);
        }
        assert!(g1(0.0).is_err());
        assert!(g2(f64::NAN).is_err());
    }

    #[test]
    fn g1_above_f_at_two() {
        assert!(g1(2.0).unwrap().value > f_bbp(2.0));
    }

    #[test]
    fn estimate_sequence_positive() {
        let est = estimate_f(1.5, 60).unwrap();
        assert_eq!(est.sequence.len(), 59);
        assert!(est.sequence.iter().all(|&(_, v)| v.is_finite() && v > 0.0));
        assert!(estimate_f(1.5, 1001).is_err());
    }
}
