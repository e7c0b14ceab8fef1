use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use spikelab::combinatorics::{
    catalan, enumerate_cycle_classes, ln_rational, positive_conv, s1_exact, s1_ln, s2_estimate_ln, s2_exact,
    s_of_m_estimate_ln, s_of_m_exact, sigma_conv, verify_bsizes, verify_lemma4, verify_lemma78, BTables,
    LnFactorials, DEFAULT_CYCLE_CAP,
};

use crate::{print_json, CliError, CliResult};

#[derive(Args, Debug)]
pub struct CombArgs {
    #[command(subcommand)]
    command: CombCommand,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Exact,
    Log,
}

#[derive(Subcommand, Debug)]
enum CombCommand {
    /// Convolution identity, two-sided convolution bounds and cycle-table bounds up to --max-l.
    Verify {
        #[arg(long = "max-l", default_value_t = 12)]
        max_l: usize,
    },
    /// Multiplicity counts b_{l,t} keyed by t.
    Btable {
        #[arg(long)]
        l: usize,
    },
    Catalan {
        #[arg(long)]
        l: usize,
    },
    /// Sum of C_{l_1}...C_{l_s} over l_i >= 0 adding up to l.
    Sigma {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
    },
    /// Same with every l_i >= 1.
    Posconv {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
    },
    S1 {
        /// Rational: `3`, `1/2` or `1.5`.
        #[arg(long)]
        theta: String,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    S2 {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// s(p, M).
    Spm {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
}

/// Parses `a`, `a/b` or a finite decimal exactly.
fn parse_rational(s: &str) -> CliResult<BigRational> {
    let bad = || CliError::Usage(format!("not a rational number: {s}"));
    let t = s.trim();
    if let Some((int, frac)) = t.split_once('.') {
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    BigRational::from_str(t).map_err(|_| bad())
}

fn exact_json(x: &BigRational) -> Value {
    let value = x.to_f64().filter(|v| v.is_finite()).unwrap_or_else(|| ln_rational(x).exp());
    json!({"value": value, "exact": x.to_string()})
}

fn log_json(ln: f64) -> Value {
    json!({"value": ln.exp(), "ln_value": ln})
}

fn verify(max_l: usize) -> CliResult<Value> {
    if max_l == 0 {
        return Err(CliError::Usage("--max-l must be at least 1".into()));
    }
    let mut lemma4_bad = Vec::new();
    for l in 1..=max_l {
        for s in 1..=l {
            if !verify_lemma4(l, s)? {
                lemma4_bad.push(json!({"l": l, "s": s}));
            }
        }
    }
    let mut lemma78_bad = Vec::new();
    for s in 1..=max_l {
        for l in 1..=max_l {
            let r = verify_lemma78(l, s)?;
            if !r.upper_holds {
                lemma78_bad.push(json!({"l": l, "s": s, "bound": "upper"}));
            }
            if r.lower_holds == Some(false) {
                lemma78_bad.push(json!({"l": l, "s": s, "bound": "lower"}));
            }
        }
    }
    let bsizes_max_l = max_l.min(DEFAULT_CYCLE_CAP);
    let mut bsizes_bad = Vec::new();
    for l in 1..=bsizes_max_l {
        let table = enumerate_cycle_classes(l)?;
        for row in verify_bsizes(&table).rows {
            if !(row.lower_holds && row.upper_holds) {
                bsizes_bad.push(json!({"l": l, "t": row.t, "b": row.b}));
            }
        }
    }
    let verdict = |bad: &Vec<Value>| if bad.is_empty() { "pass" } else { "fail" };
    Ok(json!({
        "lemma4": verdict(&lemma4_bad),
        "lemma78": verdict(&lemma78_bad),
        "bsizes": verdict(&bsizes_bad),
        "max_l": max_l,
        "bsizes_max_l": bsizes_max_l,
        "violations": {"lemma4": lemma4_bad, "lemma78": lemma78_bad, "bsizes": bsizes_bad},
    }))
}

fn tables_for(p: usize) -> CliResult<BTables> {
    let need = p.saturating_sub(1).max(1);
    if need > DEFAULT_CYCLE_CAP {
        return Err(CliError::Usage(format!(
            "exact mode enumerates cycle classes up to l = {need}, above the cap {DEFAULT_CYCLE_CAP}; use --mode log"
        )));
    }
    Ok(BTables::build(need)?)
}

pub fn run(args: CombArgs) -> CliResult<()> {
    let out = match args.command {
        CombCommand::Verify { max_l } => {
            let report = verify(max_l)?;
            let all_pass = ["lemma4", "lemma78", "bsizes"].iter().all(|k| report[*k] == "pass");
            print_json(&report)?;
            if !all_pass {
                return Err(CliError::Runtime("verification failed; see violations".into()));
            }
            return Ok(());
        }
        CombCommand::Btable { l } => {
            let table = enumerate_cycle_classes(l)?;
            let map: Map<String, Value> = table.b.iter().enumerate().map(|(i, b)| ((i + 1).to_string(), json!(b))).collect();
            Value::Object(map)
        }
        CombCommand::Catalan { l } => json!({"value": catalan(l).to_string()}),
        CombCommand::Sigma { l, s } => json!({"value": sigma_conv(l, s)?.to_string()}),
        CombCommand::Posconv { l, s } => json!({"value": positive_conv(l, s)?.to_string()}),
        CombCommand::S1 { theta, p, mode } => {
            let theta = parse_rational(&theta)?;
            match mode {
                Mode::Exact => exact_json(&s1_exact(&theta, p)),
                Mode::Log => log_json(s1_ln(ln_rational(&theta).exp(), p, &LnFactorials::new(2 * p + 2))),
            }
        }
        CombCommand::S2 { theta, p, mode } => {
            let theta = parse_rational(&theta)?;
            match mode {
                Mode::Exact => exact_json(&s2_exact(&theta, p, &tables_for(p)?)?),
                Mode::Log => log_json(s2_estimate_ln(ln_rational(&theta).exp(), p, &LnFactorials::new(2 * p + 2))),
            }
        }
        CombCommand::Spm { p, m, mode } => {
            let m = parse_rational(&m)?;
            match mode {
                Mode::Exact => exact_json(&s_of_m_exact(p, &m, &tables_for(p)?)?),
                Mode::Log => log_json(s_of_m_estimate_ln(p, ln_rational(&m).exp(), &LnFactorials::new(2 * p + 2))),
            }
        }
    };
    print_json(&out)
}
