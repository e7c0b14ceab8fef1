//! Limiting distributions of the largest eigenvalue and the functions that
//! parametrize them.

mod gfun;
mod optimize;
mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use gfun::{estimate_f, f_for_delocalized, g1, g2, s1_root, FEstimate, GFunctionResult, F_ESTIMATE_P};
pub use optimize::maximize_unit_box;
pub use variational::{h, h1, h2, q_reduction, sup_h1, sup_h2, sup_h_lemma9, SupResult, SUP_TOLERANCE};

/// `f(x) = 2` for `x < 1` and `x + 1/x` for `x >= 1`.
pub fn f_bbp(x: f64) -> f64 {
    if x < 1.0 {
        2.0
    } else {
        x + 1.0 / x
    }
}

/// The root `x >= 1` of `x + 1/x = y`, for `y >= 2`.
pub fn f_inverse_upper(y: f64) -> Result<f64> {
    if !(y >= 2.0) {
        return Err(invalid(format!("f is at least 2, cannot invert y = {y}")));
    }
    Ok(0.5 * (y + (y * y - 4.0).max(0.0).sqrt()))
}

/// `P(E_alpha <= x) = exp(-x^-alpha)`.
pub fn frechet_e_cdf(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-x.powf(-alpha)).exp()
    }
}

/// `P(zeta_c <= x) = exp(-c x^-4 / 2)`.
pub fn zeta_cdf(c: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-c * x.powi(-4) / 2.0).exp()
    }
}

/// CDF of `f(zeta_c)`: zero below 2, with an atom of mass `exp(-c/2)` at 2.
pub fn f_zeta_cdf(c: f64, y: f64) -> f64 {
    if y < 2.0 {
        0.0
    } else {
        zeta_cdf(c, 0.5 * (y + (y * y - 4.0).sqrt()))
    }
}

/// CDF of `max(theta, E_alpha)`.
pub fn thm1_cdf(theta: f64, alpha: f64, y: f64) -> f64 {
    if y < theta {
        0.0
    } else {
        frechet_e_cdf(alpha, y)
    }
}

/// CDF of `max(F, f(zeta_c))` for a given value of `F(theta)`.
pub fn thm2_cdf(f_value: f64, c: f64, y: f64) -> f64 {
    if y < f_value {
        0.0
    } else {
        f_zeta_cdf(c, y)
    }
}

/// CDF of `max(f(theta), f(zeta_c))`.
pub fn thm3_cdf(theta: f64, c: f64, y: f64) -> f64 {
    thm2_cdf(f_bbp(theta), c, y)
}

/// A limiting law that can be evaluated as a CDF.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LimitLawSpec {
    FrechetE { alpha: f64 },
    Zeta { c: f64 },
    FOfZeta { c: f64 },
    /// `max(theta, E_alpha)`, heavy tails with `alpha < 4`.
    Thm1 { theta: f64, alpha: f64 },
    /// `max(f(zeta_c), F(theta))`, `alpha = 4` with a delocalized spike.
    Thm2 { theta: f64, c: f64, f_estimate: f64 },
    /// `max(f(theta), f(zeta_c))`, `alpha = 4` with a localized spike.
    Thm3 { theta: f64, c: f64 },
}

impl LimitLawSpec {
    pub fn validate(&self) -> Result<()> {
        let ok_alpha = |a: f64| a > 0.0 && a <= 4.0;
        let ok = match *self {
            LimitLawSpec::FrechetE { alpha } => ok_alpha(alpha),
            LimitLawSpec::Zeta { c } | LimitLawSpec::FOfZeta { c } => c > 0.0,
            LimitLawSpec::Thm1 { theta, alpha } => theta >= 0.0 && ok_alpha(alpha),
            LimitLawSpec::Thm2 { theta, c, f_estimate } => theta >= 0.0 && c > 0.0 && f_estimate >= 2.0,
            LimitLawSpec::Thm3 { theta, c } => theta >= 0.0 && c > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid limit law parameters: {self:?}")))
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            LimitLawSpec::FrechetE { alpha } => frechet_e_cdf(alpha, y),
            LimitLawSpec::Zeta { c } => zeta_cdf(c, y),
            LimitLawSpec::FOfZeta { c } => f_zeta_cdf(c, y),
            LimitLawSpec::Thm1 { theta, alpha } => thm1_cdf(theta, alpha, y),
            LimitLawSpec::Thm2 { c, f_estimate, .. } => thm2_cdf(f_estimate, c, y),
            LimitLawSpec::Thm3 { theta, c } => thm3_cdf(theta, c, y),
        }
    }
}
