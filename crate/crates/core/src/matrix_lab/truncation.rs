//! Splitting a spiked matrix by the size of the underlying entries.

use serde::{Deserialize, Serialize};

use super::{realize_spike, SpikedModel, SymMatrix};
use crate::error::{invalid, Result};

/// Cutoffs for the four bands of `|a_ij|`.
///
/// For `alpha < 4` the bands are `|a| <= n^x`, `n^x < |a| <= n^(3/(2 alpha) + delta)`,
/// then up to `kappa * b_n`, and `|a| >= kappa * b_n`. For `alpha = 4` they are
/// `n^(1/4 - delta1)`, `n^(3/8 + delta2)` and `kappa * sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum TruncationParams {
    Light { x: f64, delta: f64, kappa: f64 },
    Critical { delta1: f64, delta2: f64, kappa: f64 },
}

/// Open interval of admissible small-entry exponents `x` for `alpha < 4`.
pub fn admissible_x(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 4.0) {
        return Err(invalid(format!("the x-exponent is defined for 0 < alpha < 4, got {alpha}")));
    }
    if alpha <= 2.0 {
        Ok((1.0 / alpha - 1.0 / (2.0 * alpha * alpha), 1.0 / alpha))
    } else {
        let a = (alpha - 2.0) / (alpha * (alpha - 1.0));
        let b = (3.0 * alpha - 8.0) / (2.0 * alpha * (alpha - 2.0));
        Ok((a.max(b), 0.25))
    }
}

impl TruncationParams {
    /// Midpoint `x`, `delta = 0.01`, `kappa = 0.5` for `alpha < 4`;
    /// `delta1 = delta2 = 0.01`, `kappa = 0.5` for `alpha = 4`.
    pub fn default_for(alpha: f64) -> Result<Self> {
        if alpha == 4.0 {
            return Ok(TruncationParams::Critical { delta1: 0.01, delta2: 0.01, kappa: 0.5 });
        }
        let (lo, hi) = admissible_x(alpha)?;
        Ok(TruncationParams::Light { x: 0.5 * (lo + hi), delta: 0.01, kappa: 0.5 })
    }

    fn validate(&self, alpha: f64) -> Result<()> {
        match *self {
            TruncationParams::Light { x, delta, kappa } => {
                let (lo, hi) = admissible_x(alpha)?;
                if !(x > lo && x < hi) {
                    return Err(invalid(format!("x = {x} outside the admissible interval ({lo}, {hi})")));
                }
                if !(delta > 0.0 && delta < 1.0 / (2.0 * alpha)) {
                    return Err(invalid(format!("delta = {delta} outside (0, 1/(2 alpha))")));
                }
                check_kappa(kappa)
            }
            TruncationParams::Critical { delta1, delta2, kappa } => {
                if alpha != 4.0 {
                    return Err(invalid("delta1/delta2 truncation applies to alpha = 4 only"));
                }
                for d in [delta1, delta2] {
                    if !(d > 0.0 && d < 1.0 / 64.0) {
                        return Err(invalid(format!("delta = {d} outside (0, 1/64)")));
                    }
                }
                check_kappa(kappa)
            }
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("kappa must be positive, got {kappa}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Band {
    Small,
    Medium,
    Big,
    Huge,
}

/// The four band matrices; each carries `scale * a_ij + theta * v_i v_j` on
/// its own band and zero elsewhere.
#[derive(Clone, Debug)]
pub struct TruncationSplit {
    pub small: SymMatrix,
    pub medium: SymMatrix,
    pub big: SymMatrix,
    pub huge: SymMatrix,
    /// Cutoffs on `|a_ij|` between consecutive bands, after monotone clamping.
    pub thresholds: [f64; 3],
    pub params: TruncationParams,
}

impl TruncationSplit {
    pub fn parts(&self) -> [&SymMatrix; 4] {
        [&self.small, &self.medium, &self.big, &self.huge]
    }

    pub fn band_of(thresholds: &[f64; 3], a: f64) -> Band {
        let x = a.abs();
        if x <= thresholds[0] {
            Band::Small
        } else if x <= thresholds[1] {
            Band::Medium
        } else if x < thresholds[2] {
            Band::Big
        } else {
            Band::Huge
        }
    }
}

pub fn truncation_split(a: &SymMatrix, model: &SpikedModel, params: &TruncationParams) -> Result<TruncationSplit> {
    model.validate()?;
    let alpha = model.law.alpha();
    params.validate(alpha)?;
    let n = model.n;
    if a.n() != n {
        return Err(invalid("matrix dimension does not match the model"));
    }
    let nf = n as f64;
    let raw = match *params {
        TruncationParams::Light { x, delta, kappa } => {
            [nf.powf(x), nf.powf(1.5 / alpha + delta), kappa * model.law.b_of(nf)?]
        }
        TruncationParams::Critical { delta1, delta2, kappa } => {
            [nf.powf(0.25 - delta1), nf.powf(0.375 + delta2), kappa * nf.sqrt()]
        }
    };
    // At small n the asymptotic ordering of the cutoffs can fail; clamp so the
    // bands still partition the real line.
    let t1 = raw[0];
    let t2 = raw[1].max(t1);
    let t3 = raw[2].max(t2);
    let thresholds = [t1, t2, t3];

    let scale = model.scale()?;
    let v = realize_spike(&model.spike, n)?;
    let mut parts = [SymMatrix::zeros(n), SymMatrix::zeros(n), SymMatrix::zeros(n), SymMatrix::zeros(n)];
    for i in 0..n {
        for j in i..n {
            let aij = a.get(i, j);
            let value = scale * aij + model.theta * v[i] * v[j];
            let slot = match TruncationSplit::band_of(&thresholds, aij) {
                Band::Small => 0,
                Band::Medium => 1,
                Band::Big => 2,
                Band::Huge => 3,
            };
            parts[slot].set(i, j, value);
        }
    }
    let [small, medium, big, huge] = parts;
    Ok(TruncationSplit { small, medium, big, huge, thresholds, params: *params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_lab::{perturbed_matrix, Scaling, SpikeVectorSpec};
    use crate::tail_sampler::TailLaw;

    fn model(n: usize, law: TailLaw, scaling: Scaling) -> SpikedModel {
        SpikedModel { n, scaling, theta: 1.5, spike: SpikeVectorSpec::UniformDelocalized, law }
    }

    #[test]
    fn intervals() {
        let (lo, hi) = admissible_x(2.0).unwrap();
        assert!((lo - 0.375).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        let (lo, hi) = admissible_x(3.0).unwrap();
        assert!((lo - 1.0 / 6.0).abs() < 1e-15 && hi == 0.25);
        assert!(admissible_x(4.0).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        let law = TailLaw::pareto(2.0, 1.0).unwrap();
        let m = model(20, law, Scaling::InvBn);
        let a = SymMatrix::identity(20);
        let bad = TruncationParams::Light { x: 0.6, delta: 0.01, kappa: 0.5 };
        assert!(truncation_split(&a, &m, &bad).is_err());
        let wrong_regime = TruncationParams::Critical { delta1: 0.01, delta2: 0.01, kappa: 0.5 };
        assert!(truncation_split(&a, &m, &wrong_regime).is_err());
    }

    #[test]
    fn small_entries_stay_in_first_band() {
        let law = TailLaw::pareto4_unit_variance();
        let m = model(30, law, Scaling::InvSqrtN);
        let a = SymMatrix::from_upper_fn(30, |i, j| if (i + j) % 2 == 0 { 0.5 } else { -0.5 });
        let split = truncation_split(&a, &m, &TruncationParams::default_for(4.0).unwrap()).unwrap();
        let full = perturbed_matrix(&a, &m).unwrap();
        assert_eq!(split.small, full);
        for part in &split.parts()[1..] {
            assert!(part.as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn huge_entry_is_isolated() {
        let law = TailLaw::pareto4_unit_variance();
        let m = model(30, law, Scaling::InvSqrtN);
        let mut a = SymMatrix::from_upper_fn(30, |_, _| 0.1);
        a.set(3, 7, 100.0);
        let split = truncation_split(&a, &m, &TruncationParams::default_for(4.0).unwrap()).unwrap();
        let nonzero: Vec<(usize, usize)> = (0..30)
            .flat_map(|i| (0..30).map(move |j| (i, j)))
            .filter(|&(i, j)| split.huge.get(i, j) != 0.0)
            .collect();
        assert_eq!(nonzero, vec![(3, 7), (7, 3)]);
    }
}
