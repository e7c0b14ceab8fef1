use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spikelab::matrix_lab::{HeadWeights, Scaling, SpikeVectorSpec};
use spikelab::monte_carlo::{run_experiment, run_id, summarize, write_csv, ExperimentConfig, Statistic, Summary};
use spikelab::tail_sampler::LawConfig;

use crate::{print_json, CliError, CliResult, Global};

pub const CSV_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SWEEP_FILE: &str = "sweep.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Copy, Clone, Debug, ValueEnum)]
enum LawArg {
    Pareto,
    #[value(name = "pareto4_unitvar")]
    Pareto4UnitVar,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScalingArg {
    #[value(name = "inv_bn")]
    InvBn,
    #[value(name = "inv_sqrt_n")]
    InvSqrtN,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SpikeArg {
    Uniform,
    Basis,
    Head,
}

/// Model flags. With --config they override the file; without it they build
/// the whole config.
#[derive(Args, Debug)]
pub struct SimArgs {
    /// Dimensions, comma separated and ascending.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    law: Option<LawArg>,
    /// Tail index of the Pareto law.
    #[arg(long)]
    alpha: Option<f64>,
    /// Scale of the Pareto law.
    #[arg(long)]
    scale: Option<f64>,
    /// Defaults to inv_sqrt_n for pareto4_unitvar and inv_bn otherwise.
    #[arg(long, value_enum)]
    scaling: Option<ScalingArg>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, value_enum)]
    spike: Option<SpikeArg>,
    /// 1-based coordinate for --spike basis.
    #[arg(long = "spike-index", default_value_t = 1)]
    spike_index: usize,
    /// Number of equally weighted head coordinates for --spike head.
    #[arg(long = "spike-k", default_value_t = 1)]
    spike_k: usize,
    /// Also record max(lambda_1, -lambda_n).
    #[arg(long)]
    opnorm: bool,
    /// Fill wall_time_ms. Makes the CSV differ between reruns.
    #[arg(long)]
    timing: bool,
    /// Skip the check that the spike does not lower the top eigenvalue.
    #[arg(long = "no-monotonicity-check")]
    no_monotonicity_check: bool,
}

/// Everything needed to reproduce the data files of a run.
#[derive(Serialize)]
struct RunManifest<'a> {
    manifest_id: &'a str,
    command: &'a str,
    argv: Vec<String>,
    config: &'a ExperimentConfig,
    code_version: String,
    master_seed: u64,
    threads: Option<usize>,
    started_unix_ms: u128,
    finished_unix_ms: u128,
    files: Vec<&'a str>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Reads either a bare config or a manifest carrying one under `config`.
fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let inner = match value.get("manifest_id") {
        Some(_) => value.get("config").cloned().ok_or_else(|| usage("manifest has no config"))?,
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn law_from_flags(a: &SimArgs, current: Option<&LawConfig>) -> CliResult<LawConfig> {
    let kind = match (a.law, current) {
        (Some(k), _) => k,
        (None, Some(LawConfig::Pareto4UnitVar)) => LawArg::Pareto4UnitVar,
        (None, _) => LawArg::Pareto,
    };
    match kind {
        LawArg::Pareto4UnitVar => {
            if a.alpha.is_some() || a.scale.is_some() {
                return Err(usage("--alpha and --scale do not apply to pareto4_unitvar"));
            }
            Ok(LawConfig::Pareto4UnitVar)
        }
        LawArg::Pareto => {
            let (alpha0, scale0) = match current {
                Some(LawConfig::Pareto { alpha, scale }) => (*alpha, *scale),
                _ => (2.0, 1.0),
            };
            Ok(LawConfig::Pareto { alpha: a.alpha.unwrap_or(alpha0), scale: a.scale.unwrap_or(scale0) })
        }
    }
}

fn build_config(a: &SimArgs, g: &Global) -> CliResult<ExperimentConfig> {
    let base = g.config.as_deref().map(load_config).transpose()?;
    let law = if a.law.is_some() || a.alpha.is_some() || a.scale.is_some() || base.is_none() {
        law_from_flags(a, base.as_ref().map(|c| &c.law))?
    } else {
        base.as_ref().map(|c| c.law.clone()).expect("checked above")
    };
    let scaling = match (a.scaling, &base) {
        (Some(ScalingArg::InvBn), _) => Scaling::InvBn,
        (Some(ScalingArg::InvSqrtN), _) => Scaling::InvSqrtN,
        (None, Some(c)) if a.law.is_none() => c.scaling,
        (None, _) => match law {
            LawConfig::Pareto4UnitVar => Scaling::InvSqrtN,
            LawConfig::Pareto { .. } => Scaling::InvBn,
        },
    };
    let spike = match (a.spike, &base) {
        (Some(SpikeArg::Uniform), _) => SpikeVectorSpec::UniformDelocalized,
        (Some(SpikeArg::Basis), _) => SpikeVectorSpec::Basis { index: a.spike_index },
        (Some(SpikeArg::Head), _) => SpikeVectorSpec::HeadLocalized { k: a.spike_k, weights: HeadWeights::Equal },
        (None, Some(c)) => c.spike.clone(),
        (None, None) => SpikeVectorSpec::UniformDelocalized,
    };
    let n_list = match (&a.n, &base) {
        (Some(n), _) => n.clone(),
        (None, Some(c)) => c.n_list.clone(),
        (None, None) => return Err(usage("give --n or --config")),
    };
    let mut statistics = base.as_ref().map(|c| c.statistics.clone()).unwrap_or_else(|| vec![Statistic::Lambda1, Statistic::MaxA]);
    if a.opnorm && !statistics.contains(&Statistic::Opnorm) {
        statistics.push(Statistic::Opnorm);
    }
    let config = ExperimentConfig {
        law,
        scaling,
        theta: a.theta.or(base.as_ref().map(|c| c.theta)).unwrap_or(0.0),
        spike,
        n_list,
        trials: a.trials.or(base.as_ref().map(|c| c.trials)).unwrap_or(100),
        master_seed: g.seed.or(base.as_ref().map(|c| c.master_seed)).unwrap_or(0),
        statistics,
        target_law: base.as_ref().and_then(|c| c.target_law.clone()),
        check_monotonicity: !a.no_monotonicity_check && base.as_ref().map_or(true, |c| c.check_monotonicity),
        record_timing: a.timing || base.as_ref().is_some_and(|c| c.record_timing),
    };
    config.validate()?;
    Ok(config)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn sweep_table(id: &str, summaries: &[Summary]) -> Value {
    json!({
        "run_id": id,
        "rows": summaries.iter().map(|s| json!({"n": s.n, "ks": s.ks, "median_lambda1": s.median_lambda1})).collect::<Vec<_>>(),
    })
}

pub fn run(args: SimArgs, global: &Global, sweep: bool) -> CliResult<()> {
    let started = now_ms();
    let config = build_config(&args, global)?;
    if sweep && config.n_list.len() < 2 {
        return Err(usage("sweep needs at least two values of n"));
    }
    let out: PathBuf = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let id = run_id(&config)?;

    let records = run_experiment(&config, global.threads)?;
    let summaries = summarize(&config, &records)?;

    let mut csv = Vec::new();
    write_csv(&mut csv, &id, &records)?;
    fs::write(out.join(CSV_FILE), csv)?;
    write_json(&out.join(SUMMARY_FILE), &summaries)?;
    let mut files = vec![CSV_FILE, SUMMARY_FILE];
    if sweep {
        write_json(&out.join(SWEEP_FILE), &sweep_table(&id, &summaries))?;
        files.push(SWEEP_FILE);
    }
    let manifest = RunManifest {
        manifest_id: &id,
        command: if sweep { "sweep" } else { "simulate" },
        argv: std::env::args().collect(),
        config: &config,
        code_version: format!("spikelab {}", env!("CARGO_PKG_VERSION")),
        master_seed: config.master_seed,
        threads: global.threads,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        files: files.clone(),
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    files.push(MANIFEST_FILE);
    print_json(&json!({
        "run_id": id,
        "out": out.display().to_string(),
        "files": files,
        "rows": records.len(),
        "summaries": summaries,
    }))
}
