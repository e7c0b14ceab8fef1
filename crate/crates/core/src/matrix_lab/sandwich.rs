//! Deterministic trace inequalities for low-rank perturbations `S + Q`.
//!
//! Even powers:
//! `||S+Q||^(2p) - 7m ||S||^(2p) <= tr((S+Q)^(2p)) - tr(S^(2p)) <= 4m ||S+Q||^(2p)`,
//! for `rank(Q) <= 2m` and `m <= n/6 - 1`.
//!
//! Odd powers:
//! `tr((S+Q)^(2p+1)) - tr(S^(2p+1)) <= 2m lambda_1(S+Q)^(2p+1) + lambda_n(S+Q)^(2p+1) + 3m ||S||^(2p+1)`,
//! for `rank(Q) <= 2m` and `m <= n/4 - 1`.

use super::{sym_eigenvalues, SymMatrix};
use crate::error::{invalid, Error, Result};

/// Both sides of a sandwich inequality for one instance.
#[derive(Clone, Debug)]
pub struct SandwichReport {
    /// `tr((S+Q)^k) - tr(S^k)`.
    pub difference: f64,
    /// Lower bound; only the even inequality has one.
    pub lower: Option<f64>,
    pub upper: f64,
    /// `difference - lower` (even case) and `upper - difference`.
    pub lower_slack: Option<f64>,
    pub upper_slack: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub rank_q: usize,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Relative size below which eigenvalues count as zero.
const RANK_TOL: f64 = 1e-10;
/// Relative float tolerance on the comparisons; equality cases exist.
const COMPARE_TOL: f64 = 1e-10;

pub fn numerical_rank(q: &SymMatrix) -> Result<usize> {
    let ev = sym_eigenvalues(q)?;
    let top = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if top == 0.0 {
        return Ok(0);
    }
    Ok(ev.iter().filter(|x| x.abs() > RANK_TOL * top * q.n() as f64).count())
}

struct Spectra {
    sum: Vec<f64>,
    s: Vec<f64>,
    rank_q: usize,
}

fn prepare(s: &SymMatrix, q: &SymMatrix, m: usize, m_max: f64) -> Result<Spectra> {
    if s.n() != q.n() {
        return Err(invalid("S and Q must have the same dimension"));
    }
    if m == 0 || m as f64 > m_max {
        return Err(invalid(format!("m = {m} outside 1..={m_max}")));
    }
    let rank_q = numerical_rank(q)?;
    if rank_q > 2 * m {
        return Err(Error::RankTooLarge { rank: rank_q, limit: 2 * m });
    }
    Ok(Spectra { sum: sym_eigenvalues(&s.add(q))?, s: sym_eigenvalues(s)?, rank_q })
}

fn power_sum(ev: &[f64], k: i32) -> f64 {
    ev.iter().map(|x| x.powi(k)).sum()
}

fn norm(ev: &[f64]) -> f64 {
    ev.first().unwrap().abs().max(ev.last().unwrap().abs())
}

pub fn check_sandwich_even(s: &SymMatrix, q: &SymMatrix, m: usize, p: usize) -> Result<SandwichReport> {
    if p == 0 {
        return Err(invalid("p must be at least 1"));
    }
    let sp = prepare(s, q, m, s.n() as f64 / 6.0 - 1.0)?;
    let k = 2 * p as i32;
    let (tr_sum, tr_s) = (power_sum(&sp.sum, k), power_sum(&sp.s, k));
    let difference = tr_sum - tr_s;
    let norm_sum = norm(&sp.sum).powi(k);
    let norm_s = norm(&sp.s).powi(k);
    let mf = m as f64;
    let lower = norm_sum - 7.0 * mf * norm_s;
    let upper = 4.0 * mf * norm_sum;
    let tol = COMPARE_TOL * (tr_sum.abs() + tr_s.abs() + norm_sum + 7.0 * mf * norm_s);
    Ok(SandwichReport {
        difference,
        lower: Some(lower),
        upper,
        lower_slack: Some(difference - lower),
        upper_slack: upper - difference,
        lower_ok: difference - lower >= -tol,
        upper_ok: upper - difference >= -tol,
        rank_q: sp.rank_q,
    })
}

pub fn check_sandwich_odd(s: &SymMatrix, q: &SymMatrix, m: usize, p: usize) -> Result<SandwichReport> {
    let sp = prepare(s, q, m, s.n() as f64 / 4.0 - 1.0)?;
    let k = 2 * p as i32 + 1;
    let (tr_sum, tr_s) = (power_sum(&sp.sum, k), power_sum(&sp.s, k));
    let difference = tr_sum - tr_s;
    let mf = m as f64;
    let top = sp.sum.last().unwrap().powi(k);
    let bottom = sp.sum.first().unwrap().powi(k);
    let norm_s = norm(&sp.s).powi(k);
    let upper = 2.0 * mf * top + bottom + 3.0 * mf * norm_s;
    let tol = COMPARE_TOL * (tr_sum.abs() + tr_s.abs() + 2.0 * mf * top.abs() + bottom.abs() + 3.0 * mf * norm_s);
    Ok(SandwichReport {
        difference,
        lower: None,
        upper,
        lower_slack: None,
        upper_slack: upper - difference,
        lower_ok: true,
        upper_ok: upper - difference >= -tol,
        rank_q: sp.rank_q,
    })
}
