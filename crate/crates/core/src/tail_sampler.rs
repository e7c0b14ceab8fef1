//! Symmetric regularly varying entry laws.
//!
//! Every law is described by the survival function of `|a|`,
//! `S(x) = P(|a| >= x)`, and sampled by inverting it. The sign is an
//! independent fair bit, so all laws are symmetric.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

type SurvivalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user supplied survival function with optional tail data.
#[derive(Clone)]
pub struct ExplicitSurvival {
    survival: SurvivalFn,
    c_tail: Option<f64>,
    second_moment: Option<f64>,
}

impl fmt::Debug for ExplicitSurvival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExplicitSurvival")
            .field("c_tail", &self.c_tail)
            .field("second_moment", &self.second_moment)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum TailFamily {
    /// `S(x) = min(1, (x / scale)^-alpha)`.
    SymmetricPareto,
    /// Pareto with `alpha = 4` rescaled to unit variance: `|a| = X / sqrt(2)`, `X ~ Pareto(1, 4)`.
    NormalizedSymmetricPareto4,
    ExplicitSurvival(ExplicitSurvival),
}

/// A symmetric entry law with tail index `alpha` in `(0, 4]`.
#[derive(Clone, Debug)]
pub struct TailLaw {
    family: TailFamily,
    alpha: f64,
    scale: f64,
}

const BISECTION_STEPS: usize = 200;

impl TailLaw {
    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { family: TailFamily::SymmetricPareto, alpha, scale })
    }

    /// The `alpha = 4` Pareto law normalized to `E[a^2] = 1`; its tail constant is `1/4`.
    pub fn pareto4_unit_variance() -> Self {
        Self {
            family: TailFamily::NormalizedSymmetricPareto4,
            alpha: 4.0,
            scale: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// A law given by its survival function `x -> P(|a| >= x)`.
    ///
    /// `c_tail` is `lim x^4 P(|a| > x)` and is only accepted for `alpha = 4`.
    /// `second_moment` is needed when the law is used with `1/sqrt(n)` scaling.
    pub fn explicit<F>(
        alpha: f64,
        survival: F,
        c_tail: Option<f64>,
        second_moment: Option<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_alpha(alpha)?;
        if c_tail.is_some() && alpha != 4.0 {
            return Err(invalid("c_tail is only meaningful for alpha = 4"));
        }
        let family = TailFamily::ExplicitSurvival(ExplicitSurvival {
            survival: Arc::new(survival),
            c_tail,
            second_moment,
        });
        Ok(Self { family, alpha, scale: 1.0 })
    }

    pub fn family(&self) -> &TailFamily {
        &self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `P(|a| >= x)` for `x >= 0`.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.family {
            TailFamily::SymmetricPareto | TailFamily::NormalizedSymmetricPareto4 => {
                if x <= self.scale {
                    1.0
                } else {
                    (x / self.scale).powf(-self.alpha)
                }
            }
            TailFamily::ExplicitSurvival(e) => {
                if x <= 0.0 {
                    1.0
                } else {
                    (e.survival)(x).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Smallest `x >= 0` with `S(x) <= u`, for `u` in `(0, 1]`.
    pub fn inverse_survival(&self, u: f64) -> f64 {
        match &self.family {
            TailFamily::SymmetricPareto | TailFamily::NormalizedSymmetricPareto4 => {
                self.scale * u.powf(-1.0 / self.alpha)
            }
            TailFamily::ExplicitSurvival(_) => {
                generic_inverse(|x| self.survival(x), u).unwrap_or(f64::INFINITY)
            }
        }
    }

    /// One signed draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 - U[0, 1) lies in (0, 1], so the inverse is always finite.
        let u = 1.0 - rng.random::<f64>();
        let magnitude = self.inverse_survival(u);
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }

    /// `b(y) = inf { x > 0 : P(|a| >= x) <= 2 / y^2 }`, defined for `y >= 2`.
    pub fn b_of(&self, y: f64) -> Result<f64> {
        if !(y >= 2.0) || !y.is_finite() {
            return Err(invalid(format!("b(y) needs y >= 2, got {y}")));
        }
        let target = 2.0 / (y * y);
        match &self.family {
            TailFamily::SymmetricPareto | TailFamily::NormalizedSymmetricPareto4 => {
                Ok(self.scale * (y * y / 2.0).powf(1.0 / self.alpha))
            }
            TailFamily::ExplicitSurvival(_) => generic_inverse(|x| self.survival(x), target),
        }
    }

    /// `lim x^4 P(|a| > x)`; only defined for `alpha = 4`.
    pub fn tail_constant(&self) -> Result<f64> {
        if self.alpha != 4.0 {
            return Err(Error::TailConstantUndefined(self.alpha));
        }
        match &self.family {
            TailFamily::SymmetricPareto => Ok(self.scale.powi(4)),
            TailFamily::NormalizedSymmetricPareto4 => Ok(0.25),
            TailFamily::ExplicitSurvival(e) => e
                .c_tail
                .ok_or_else(|| invalid("explicit law was built without a tail constant")),
        }
    }

    /// `E[a^2]` when it is finite and known.
    pub fn second_moment(&self) -> Option<f64> {
        match &self.family {
            TailFamily::SymmetricPareto => {
                (self.alpha > 2.0).then(|| self.scale * self.scale * self.alpha / (self.alpha - 2.0))
            }
            TailFamily::NormalizedSymmetricPareto4 => Some(1.0),
            TailFamily::ExplicitSurvival(e) => e.second_moment,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 4.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 4], got {alpha}")))
    }
}

/// `inf { x >= 0 : s(x) <= target }` for a nonincreasing `s`, by doubling then bisection.
fn generic_inverse(s: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    if s(0.0) <= target {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while s(hi) > target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::QuantileSearch { target, upper: hi });
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if s(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Serializable law description used in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LawConfig {
    Pareto {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    #[serde(rename = "pareto4_unitvar")]
    Pareto4UnitVar,
}

fn one() -> f64 {
    1.0
}

impl LawConfig {
    pub fn build(&self) -> Result<TailLaw> {
        match *self {
            LawConfig::Pareto { alpha, scale } => TailLaw::pareto(alpha, scale),
            LawConfig::Pareto4UnitVar => Ok(TailLaw::pareto4_unit_variance()),
        }
    }
}
