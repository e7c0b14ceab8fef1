//! Empirical distributions, quantiles and Kolmogorov-Smirnov distances.

use crate::error::{invalid, Result};

/// Sorted sample with the right-continuous step CDF (jumps of `1/N`).
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("empirical distribution needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(invalid("samples contain NaN"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// `F_N(x) = #{x_i <= x} / N`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        quantile(self, q)
    }

    pub fn median(&self) -> f64 {
        quantile(self, 0.5).expect("0.5 is a valid level")
    }
}

/// Order statistic with 1-based index `ceil(qN)`; `q = 0` gives the minimum.
///
/// `qN` within `1e-9` of an integer is treated as that integer so that decimal
/// levels such as `0.34 * 100` do not round up past the intended index.
pub fn quantile(samples: &EmpiricalDistribution, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("quantile level must lie in [0, 1], got {q}")));
    }
    let n = samples.len();
    let raw = q * n as f64;
    let k = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    let k = (k as usize).clamp(1, n);
    Ok(samples.sorted[k - 1])
}

/// `sup_x |F_N(x) - F(x)|`, evaluated at every jump from both sides:
/// `max_i max(i/N - F(x_i), F(x_i) - (i-1)/N)`.
pub fn ks_distance(samples: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len() as f64;
    samples
        .sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn ks_examples() {
        let e = EmpiricalDistribution::new(vec![0.75, 0.25]).unwrap();
        assert!((ks_distance(&e, uniform) - 0.25).abs() < 1e-15);
        let e = EmpiricalDistribution::new(vec![0.5]).unwrap();
        assert!((ks_distance(&e, uniform) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_examples() {
        let e = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(e.quantile(0.5).unwrap(), 2.0);
        assert_eq!(e.quantile(1.0).unwrap(), 3.0);
        assert_eq!(e.quantile(0.0).unwrap(), 1.0);
        let e = EmpiricalDistribution::new((1..=100).map(f64::from).collect()).unwrap();
        assert_eq!(e.quantile(0.34).unwrap(), 34.0);
        assert!(e.quantile(1.5).is_err());
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn empirical_cdf_is_right_continuous() {
        let e = EmpiricalDistribution::new(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.cdf(0.9), 0.0);
        assert_eq!(e.cdf(2.0), 0.75);
        assert_eq!(e.cdf(3.0), 1.0);
    }
}
