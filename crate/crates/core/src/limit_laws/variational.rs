//! Suprema of the entropy-type functions `h`, `h1`, `h2`.
//!
//! With `0^0 = 1`:
//! - `h1(x, y) = theta^(2-2x) (2-2x)^(2-2x) / (y^y (2-2x-y)^(2-2x-y)) 4^x`
//!   on `D1 = {y <= x, y <= 2 - 2x}`,
//! - `h2(x, y) = theta^(2-2x) (2-2x)^(2-2x) / (y^y (2-2x-y)^(2-2x-y)) 4^(x-y) (5/4)^(2y)`
//!   on `D2 = {y <= x/3, y <= 2 - 2x}`,
//! - `h(x, y, z) = theta^(2-2x) z^z / (y^y (z-y)^(z-y)) (2-2x)^(2-2x) / (y^y (2-2x-y)^(2-2x-y))
//!   (2x-z)^(2x-z) / (x^x (x-z)^(x-z))` on `D = {y <= z <= x, y <= 2 - 2x}`,
//!
//! all inside `[0, 1]^k`. The suprema are `max(4, G1^2)`, `max(4, G2^2)` and `f(theta)^2`.

use serde::Serialize;

use super::{f_bbp, g1, g2, maximize_unit_box};
use crate::error::{Error, Result};

/// Allowed gap between grid and analytic suprema.
pub const SUP_TOLERANCE: f64 = 1e-4;

const GRID_2D: usize = 400;
const GRID_3D: usize = 60;
const STARTS: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct SupResult {
    pub grid_value: f64,
    pub analytic_value: f64,
    /// Maximizer in the function's own coordinates.
    pub argmax: Vec<f64>,
}

/// `t ln t` with `0 ln 0 = 0`; tiny negative arguments from rounding count as 0.
fn xlx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

fn ln_common(theta: f64, x: f64, y: f64) -> f64 {
    let w = 2.0 - 2.0 * x;
    w * theta.ln() + xlx(w) - xlx(y) - xlx(w - y)
}

pub fn h1(theta: f64, x: f64, y: f64) -> f64 {
    (ln_common(theta, x, y) + x * 4f64.ln()).exp()
}

pub fn h2(theta: f64, x: f64, y: f64) -> f64 {
    (ln_common(theta, x, y) + (x - y) * 4f64.ln() + 2.0 * y * 1.25f64.ln()).exp()
}

pub fn h(theta: f64, x: f64, y: f64, z: f64) -> f64 {
    let first = xlx(z) - xlx(y) - xlx(z - y);
    let last = xlx(2.0 * x - z) - xlx(x) - xlx(x - z);
    (ln_common(theta, x, y) + first + last).exp()
}

/// The one-variable reduction `q(x) = theta^(2-2x) 4 / (x^x (2-x)^(2-x))`.
pub fn q_reduction(theta: f64, x: f64) -> f64 {
    ((2.0 - 2.0 * x) * theta.ln() + 4f64.ln() - xlx(x) - xlx(2.0 - x)).exp()
}

fn check(grid_value: f64, analytic_value: f64, argmax: Vec<f64>) -> Result<SupResult> {
    if (grid_value - analytic_value).abs() > SUP_TOLERANCE {
        return Err(Error::SupremumMismatch { grid: grid_value, analytic: analytic_value, tolerance: SUP_TOLERANCE });
    }
    Ok(SupResult { grid_value, analytic_value, argmax })
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid(format!("theta must be positive, got {theta}")))
    }
}

/// `sup h1` over `D1` by grid search, compared with `max(4, G1^2)`.
pub fn sup_h1(theta: f64) -> Result<SupResult> {
    check_theta(theta)?;
    let map = |u: &[f64]| (u[0], u[1] * u[0].min(2.0 - 2.0 * u[0]));
    let (v, u) = maximize_unit_box(|u| { let (x, y) = map(u); h1(theta, x, y) }, 2, GRID_2D, STARTS);
    let (x, y) = map(&u);
    check(v, g1(theta)?.value.powi(2).max(4.0), vec![x, y])
}

/// `sup h2` over `D2` by grid search, compared with `max(4, G2^2)`.
pub fn sup_h2(theta: f64) -> Result<SupResult> {
    check_theta(theta)?;
    let map = |u: &[f64]| (u[0], u[1] * (u[0] / 3.0).min(2.0 - 2.0 * u[0]));
    let (v, u) = maximize_unit_box(|u| { let (x, y) = map(u); h2(theta, x, y) }, 2, GRID_2D, STARTS);
    let (x, y) = map(&u);
    check(v, g2(theta)?.value.powi(2).max(4.0), vec![x, y])
}

/// `sup h` over `D` by grid search, compared with the maximum of `q` over
/// its candidates `x = 0`, `x = 1` and, for `theta >= 1`, `x = 2 / (theta^2 + 1)`.
/// The result should equal `f(theta)^2`.
pub fn sup_h_lemma9(theta: f64) -> Result<SupResult> {
    check_theta(theta)?;
    let map = |u: &[f64]| {
        let x = u[0];
        let z = u[1] * x;
        let y = u[2] * z.min(2.0 - 2.0 * x);
        (x, y, z)
    };
    let (v, u) = maximize_unit_box(|u| { let (x, y, z) = map(u); h(theta, x, y, z) }, 3, GRID_3D, STARTS);
    let (x, y, z) = map(&u);
    let mut analytic = q_reduction(theta, 0.0).max(q_reduction(theta, 1.0));
    if theta >= 1.0 {
        analytic = analytic.max(q_reduction(theta, 2.0 / (theta * theta + 1.0)));
    }
    let result = check(v, analytic, vec![x, y, z])?;
    debug_assert!((analytic - f_bbp(theta).powi(2)).abs() < 1e-9);
    Ok(result)
}
