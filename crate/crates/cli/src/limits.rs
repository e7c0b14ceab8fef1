use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use spikelab::limit_laws::{
    estimate_f, f_bbp, f_for_delocalized, f_inverse_upper, f_zeta_cdf, frechet_e_cdf, g1, g2, sup_h1, sup_h2,
    sup_h_lemma9, thm1_cdf, thm2_cdf, thm3_cdf, zeta_cdf, SupResult,
};

use crate::{print_json, CliError, CliResult};

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[command(subcommand)]
    command: LimitsCommand,
}

#[derive(Subcommand, Debug)]
enum LimitsCommand {
    /// Evaluates one function at one point.
    Eval(EvalArgs),
    /// Finite-p sequence s1(theta, p)^(1/(2p)) with the G2/G1 bracket.
    #[command(name = "estimate-F")]
    EstimateF {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 300)]
        pmax: usize,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Function {
    #[value(name = "f")]
    F,
    #[value(name = "finv")]
    Finv,
    #[value(name = "E")]
    E,
    #[value(name = "zeta")]
    Zeta,
    #[value(name = "fzeta")]
    Fzeta,
    #[value(name = "thm1cdf")]
    Thm1Cdf,
    #[value(name = "thm2cdf")]
    Thm2Cdf,
    #[value(name = "thm3cdf")]
    Thm3Cdf,
    #[value(name = "G1")]
    G1,
    #[value(name = "G2")]
    G2,
    #[value(name = "suph")]
    SupH,
    #[value(name = "suph1")]
    SupH1,
    #[value(name = "suph2")]
    SupH2,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    function: Function,
    /// Argument of f, finv, E, zeta and fzeta.
    #[arg(long)]
    x: Option<f64>,
    /// Evaluation point of the theorem CDFs.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Tail constant; defaults to 1/4, the normalized alpha = 4 law.
    #[arg(long, default_value_t = 0.25)]
    c: f64,
}

fn need(v: Option<f64>, name: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Usage(format!("this function needs --{name}")))
}

fn sup_json(r: SupResult) -> serde_json::Value {
    json!({"value": r.grid_value, "analytic": r.analytic_value, "argmax": r.argmax})
}

fn eval(a: EvalArgs) -> CliResult<serde_json::Value> {
    let v = match a.function {
        Function::F => json!({"value": f_bbp(need(a.x, "x")?)}),
        Function::Finv => json!({"value": f_inverse_upper(need(a.x, "x")?)?}),
        Function::E => json!({"value": frechet_e_cdf(need(a.alpha, "alpha")?, need(a.x, "x")?)}),
        Function::Zeta => json!({"value": zeta_cdf(a.c, need(a.x, "x")?)}),
        Function::Fzeta => json!({"value": f_zeta_cdf(a.c, need(a.x, "x")?)}),
        Function::Thm1Cdf => json!({"value": thm1_cdf(need(a.theta, "theta")?, need(a.alpha, "alpha")?, need(a.y, "y")?)}),
        Function::Thm2Cdf => {
            let f = f_for_delocalized(need(a.theta, "theta")?);
            json!({"value": thm2_cdf(f, a.c, need(a.y, "y")?), "f_estimate": f})
        }
        Function::Thm3Cdf => json!({"value": thm3_cdf(need(a.theta, "theta")?, a.c, need(a.y, "y")?)}),
        Function::G1 | Function::G2 => {
            let theta = need(a.theta, "theta")?;
            let r = if matches!(a.function, Function::G1) { g1(theta)? } else { g2(theta)? };
            json!({"value": r.value, "inner_root": r.inner_root, "residual": r.residual})
        }
        Function::SupH => sup_json(sup_h_lemma9(need(a.theta, "theta")?)?),
        Function::SupH1 => sup_json(sup_h1(need(a.theta, "theta")?)?),
        Function::SupH2 => sup_json(sup_h2(need(a.theta, "theta")?)?),
    };
    Ok(v)
}

pub fn run(args: LimitsArgs) -> CliResult<()> {
    let out = match args.command {
        LimitsCommand::Eval(a) => eval(a)?,
        LimitsCommand::EstimateF { theta, pmax } => {
            let est = estimate_f(theta, pmax)?;
            json!({
                "theta": theta,
                "p_max": pmax,
                "value": est.last(),
                "bracket": est.bracket,
                "residual": est.g1.residual.max(est.g2.residual),
                "sequence": est.sequence.iter().map(|&(p, v)| json!({"p": p, "value": v})).collect::<Vec<_>>(),
            })
        }
    };
    print_json(&out)
}
