//! Seeded Monte Carlo experiments on spiked Wigner matrices.
//!
//! Every trial draws its matrix from a stream seeded by
//! [`derive_seed`]`(master_seed, n, trial_index)`, so results do not depend on
//! how trials are scheduled across threads.

mod report;
mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limit_laws::{f_for_delocalized, LimitLawSpec};
use crate::matrix_lab::{
    build_wigner, max_entry_stat, realize_spike, scale_for, spiked_extremes, Scaling, SpikeVectorSpec, SpikedModel,
};
use crate::tail_sampler::LawConfig;

pub use report::{run_id, write_csv, CSV_HEADER};
pub use stats::{ks_distance, quantile, EmpiricalDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Lambda1,
    #[serde(rename = "maxA")]
    MaxA,
    Opnorm,
}

fn default_statistics() -> Vec<Statistic> {
    vec![Statistic::Lambda1, Statistic::MaxA]
}

fn yes() -> bool {
    true
}

/// Everything that determines the output of an experiment. Thread count is
/// deliberately not part of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub law: LawConfig,
    pub scaling: Scaling,
    pub theta: f64,
    pub spike: SpikeVectorSpec,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// `lambda1` and `maxA` are always recorded; `opnorm` adds `max(lambda_1, -lambda_n)`.
    #[serde(default = "default_statistics")]
    pub statistics: Vec<Statistic>,
    /// Overrides the limit law inferred from the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_law: Option<LimitLawSpec>,
    /// Also computes `lambda_1(scale * A)` and fails if the spike lowered the top eigenvalue.
    #[serde(default = "yes")]
    pub check_monotonicity: bool,
    /// Fills `wall_time_ms`; off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n_list.is_empty() {
            return Err(invalid("n_list must not be empty"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_list must be strictly ascending"));
        }
        for &n in &self.n_list {
            self.model(n)?.validate()?;
            realize_spike(&self.spike, n)?;
            if self.scaling == Scaling::InvBn && n < 2 {
                return Err(invalid("1/b_n scaling needs n >= 2"));
            }
        }
        if let Some(t) = &self.target_law {
            t.validate()?;
        }
        Ok(())
    }

    pub fn model(&self, n: usize) -> Result<SpikedModel> {
        Ok(SpikedModel { n, scaling: self.scaling, theta: self.theta, spike: self.spike.clone(), law: self.law.build()? })
    }

    /// The law the largest eigenvalue should approach: `max(theta, E_alpha)`
    /// under `1/b_n` scaling; at `alpha = 4` `max(f(theta), f(zeta_c))` for a
    /// localized spike and `max(f(zeta_c), F(theta))` for a delocalized one.
    pub fn target_law(&self) -> Result<LimitLawSpec> {
        if let Some(t) = &self.target_law {
            return Ok(t.clone());
        }
        let law = self.law.build()?;
        let theta = self.theta;
        match self.scaling {
            Scaling::InvBn => Ok(LimitLawSpec::Thm1 { theta, alpha: law.alpha() }),
            Scaling::InvSqrtN => {
                let c = law.tail_constant()?;
                let n = *self.n_list.last().ok_or_else(|| invalid("n_list must not be empty"))?;
                if self.spike.is_localized(n) {
                    Ok(LimitLawSpec::Thm3 { theta, c })
                } else {
                    Ok(LimitLawSpec::Thm2 { theta, c, f_estimate: f_for_delocalized(theta) })
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub lambda1: f64,
    #[serde(rename = "maxA")]
    pub max_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opnorm: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: a chained splitmix64 hash of the three inputs.
pub fn derive_seed(master_seed: u64, n: usize, trial_index: usize) -> u64 {
    let h = splitmix(master_seed);
    let h = splitmix(h ^ splitmix(n as u64 ^ 0x6e5f_6469_6d00_0000));
    splitmix(h ^ splitmix(trial_index as u64 ^ 0x7472_6961_6c00_0000))
}

struct PerN {
    scale: f64,
    v: Vec<f64>,
}

fn run_trial(config: &ExperimentConfig, model: &SpikedModel, per_n: &PerN, trial_index: usize) -> Result<TrialRecord> {
    let n = model.n;
    let seed = derive_seed(config.master_seed, n, trial_index);
    let start = Instant::now();
    let wrap = |e: Error| Error::Trial { n, trial_index, seed, source: Box::new(e) };
    let a = build_wigner(n, &model.law, seed).map_err(wrap)?;
    let want_opnorm = config.statistics.contains(&Statistic::Opnorm);
    let check = config.check_monotonicity && config.theta > 0.0;
    let ext = spiked_extremes(&a, per_n.scale, config.theta, &per_n.v, want_opnorm, check).map_err(wrap)?;
    if let Some(bare) = ext.lambda1_unperturbed {
        let tol = 1e-9 * bare.abs().max(ext.lambda1.abs()).max(1.0);
        if ext.lambda1 < bare - tol {
            return Err(wrap(Error::Monotonicity { perturbed: ext.lambda1, unperturbed: bare }));
        }
    }
    let max_a = max_entry_stat(&a, per_n.scale);
    let opnorm = ext.lambda_min.map(|lo| ext.lambda1.max(-lo));
    let wall_time_ms = config.record_timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(TrialRecord { n, trial_index, seed, lambda1: ext.lambda1, max_a, opnorm, wall_time_ms })
}

/// Runs every `(n, trial)` pair; records come back sorted by `(n, trial_index)`.
///
/// `threads = None` uses the rayon default. Output does not depend on it.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let mut tasks = Vec::new();
    let mut contexts = Vec::new();
    for &n in &config.n_list {
        let model = config.model(n)?;
        let per_n = PerN { scale: scale_for(config.scaling, &model.law, n)?, v: realize_spike(&config.spike, n)? };
        contexts.push((model, per_n));
        for t in 0..config.trials {
            tasks.push((contexts.len() - 1, t));
        }
    }
    let work = || -> Result<Vec<TrialRecord>> {
        tasks.par_iter().map(|&(c, t)| run_trial(config, &contexts[c].0, &contexts[c].1, t)).collect()
    };
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| invalid(format!("cannot build thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Per-`n` comparison with the target law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub run_id: String,
    pub n: usize,
    pub trials: usize,
    pub ks: f64,
    pub median_lambda1: f64,
    pub target_law: LimitLawSpec,
    pub params: serde_json::Value,
}

fn params_of(config: &ExperimentConfig) -> serde_json::Value {
    serde_json::json!({
        "law": config.law,
        "scaling": config.scaling,
        "theta": config.theta,
        "spike": config.spike,
        "master_seed": config.master_seed,
    })
}

/// Groups records by `n` and compares each group with the target law.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<Vec<Summary>> {
    let target = config.target_law()?;
    let id = run_id(config)?;
    let params = params_of(config);
    config
        .n_list
        .iter()
        .map(|&n| {
            let values: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.lambda1).collect();
            let emp = EmpiricalDistribution::new(values)?;
            Ok(Summary {
                run_id: id.clone(),
                n,
                trials: emp.len(),
                ks: ks_distance(&emp, |y| target.cdf(y)),
                median_lambda1: emp.median(),
                target_law: target.clone(),
                params: params.clone(),
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<Summary>,
}

/// KS distance to the target law for each `n` in the list (at least two).
pub fn convergence_sweep(config: &ExperimentConfig, threads: Option<usize>) -> Result<SweepResult> {
    if config.n_list.len() < 2 {
        return Err(invalid("a sweep needs at least two dimensions"));
    }
    let records = run_experiment(config, threads)?;
    let summaries = summarize(config, &records)?;
    Ok(SweepResult { records, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            law: LawConfig::Pareto { alpha: 2.0, scale: 1.0 },
            scaling: Scaling::InvBn,
            theta: 1.0,
            spike: SpikeVectorSpec::UniformDelocalized,
            n_list: vec![10, 20],
            trials: 3,
            master_seed: 42,
            statistics: default_statistics(),
            target_law: None,
            check_monotonicity: true,
            record_timing: false,
        }
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = HashSet::new();
        for master in 0..4u64 {
            for n in [1usize, 2, 500, 1000, 2000] {
                for t in 0..500 {
                    assert!(seen.insert(derive_seed(master, n, t)));
                }
            }
        }
    }

    #[test]
    fn records_are_sorted() {
        let recs = run_experiment(&config(), Some(2)).unwrap();
        let keys: Vec<(usize, usize)> = recs.iter().map(|r| (r.n, r.trial_index)).collect();
        assert_eq!(keys, vec![(10, 0), (10, 1), (10, 2), (20, 0), (20, 1), (20, 2)]);
        assert!(recs.iter().all(|r| r.wall_time_ms.is_none()));
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = config();
        c.trials = 0;
        assert!(run_experiment(&c, None).is_err());
        let mut c = config();
        c.n_list = vec![20, 10];
        assert!(run_experiment(&c, None).is_err());
        let mut c = config();
        c.scaling = Scaling::InvSqrtN;
        assert!(run_experiment(&c, None).is_err());
    }

    #[test]
    fn target_inference() {
        assert_eq!(config().target_law().unwrap(), LimitLawSpec::Thm1 { theta: 1.0, alpha: 2.0 });
        let mut c = config();
        c.law = LawConfig::Pareto4UnitVar;
        c.scaling = Scaling::InvSqrtN;
        c.spike = SpikeVectorSpec::Basis { index: 1 };
        assert_eq!(c.target_law().unwrap(), LimitLawSpec::Thm3 { theta: 1.0, c: 0.25 });
        c.spike = SpikeVectorSpec::UniformDelocalized;
        c.theta = 0.8;
        assert_eq!(c.target_law().unwrap(), LimitLawSpec::Thm2 { theta: 0.8, c: 0.25, f_estimate: 2.0 });
    }
}
