//! Lanczos iteration with full reorthogonalization for extreme eigenvalues.
//!
//! Several independent problems can advance in lockstep so that a caller can
//! serve all of their matrix-vector products from a single pass over memory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{tridiagonal_eigen_full, tridiagonal_eigen_last_row};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Stop once the residual bound of each wanted Ritz value is below
    /// `tol * max |ritz|`.
    pub tol: f64,
    pub max_iter: usize,
    pub check_every: usize,
    pub want_bottom: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 2000, check_every: 6, want_bottom: false }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOutcome {
    pub top: f64,
    pub bottom: Option<f64>,
    pub iterations: usize,
    /// Largest residual bound among the reported Ritz values.
    pub residual: f64,
    /// Ritz vector for `top`, when requested.
    pub top_vector: Option<Vec<f64>>,
}

struct State {
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Norm of the residual after the last step; zero means an invariant subspace.
    last_beta: f64,
    outcome: Option<LanczosOutcome>,
}

/// Deterministic start vector, identical for every call with the same `n`.
fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_05ee_d000 ^ n as u64);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

impl State {
    fn new(n: usize) -> Self {
        Self {
            basis: vec![start_vector(n)],
            alpha: vec![],
            beta: vec![],
            last_beta: f64::NAN,
            outcome: None,
        }
    }

    fn current(&self) -> &[f64] {
        self.basis.last().expect("basis is never empty")
    }

    /// Takes `w = Op * q_k` and extends the tridiagonal factorization by one step.
    fn absorb(&mut self, mut w: Vec<f64>) {
        let k = self.alpha.len();
        let a = dot(&w, &self.basis[k]);
        self.alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let b = normalize(&mut w);
        let scale = self.alpha.iter().chain(&self.beta).fold(0.0f64, |m, x| m.max(x.abs()));
        self.last_beta = b;
        if b <= 1e-13 * scale.max(f64::MIN_POSITIVE) || self.basis.len() == w.len() {
            self.last_beta = 0.0;
            return;
        }
        self.beta.push(b);
        self.basis.push(w);
    }

    fn exhausted(&self) -> bool {
        self.last_beta == 0.0
    }

    /// Checks convergence; on success stores the outcome.
    fn check(&mut self, opts: &LanczosOptions, want_vector: bool) -> Result<bool> {
        let k = self.alpha.len();
        let (ritz, last) = tridiagonal_eigen_last_row(&self.alpha, &self.beta[..k - 1])?;
        let spread = ritz[0].abs().max(ritz[k - 1].abs()).max(f64::MIN_POSITIVE);
        let beta = if self.exhausted() { 0.0 } else { self.last_beta };
        let res_top = beta * last[k - 1].abs();
        let res_bottom = beta * last[0].abs();
        let residual = if opts.want_bottom { res_top.max(res_bottom) } else { res_top };
        if residual > opts.tol * spread && !self.exhausted() {
            return Ok(false);
        }
        let top_vector = if want_vector {
            let (_, z) = tridiagonal_eigen_full(&self.alpha, &self.beta[..k - 1])?;
            let n = self.basis[0].len();
            let mut y = vec![0.0; n];
            for (j, q) in self.basis.iter().take(k).enumerate() {
                let c = z[j * k + (k - 1)];
                y.iter_mut().zip(q).for_each(|(yi, qi)| *yi += c * qi);
            }
            normalize(&mut y);
            Some(y)
        } else {
            None
        };
        self.outcome = Some(LanczosOutcome {
            top: ritz[k - 1],
            bottom: opts.want_bottom.then(|| ritz[0]),
            iterations: k,
            residual,
            top_vector,
        });
        Ok(true)
    }
}

/// Runs `count` Lanczos problems of dimension `n` in lockstep.
///
/// `apply(active, inputs, outputs)` must set `outputs[r] = Op_{active[r]} * inputs[r]`.
pub fn lanczos_lockstep<F>(
    n: usize,
    count: usize,
    opts: &LanczosOptions,
    want_vectors: bool,
    mut apply: F,
) -> Result<Vec<LanczosOutcome>>
where
    F: FnMut(&[usize], &[&[f64]], &mut [Vec<f64>]),
{
    let mut states: Vec<State> = (0..count).map(|_| State::new(n)).collect();
    let max_iter = opts.max_iter.min(n).max(1);
    for step in 1..=max_iter {
        let active: Vec<usize> = (0..count).filter(|&i| states[i].outcome.is_none()).collect();
        if active.is_empty() {
            break;
        }
        let mut outputs = vec![vec![0.0; n]; active.len()];
        {
            let inputs: Vec<&[f64]> = active.iter().map(|&i| states[i].current()).collect();
            apply(&active, &inputs, &mut outputs);
        }
        for (&i, w) in active.iter().zip(outputs) {
            let st = &mut states[i];
            st.absorb(w);
            if st.exhausted() || step % opts.check_every == 0 || step == max_iter {
                st.check(opts, want_vectors)?;
            }
        }
    }
    states
        .into_iter()
        .map(|st| {
            st.outcome.ok_or_else(|| Error::NoConvergence {
                iterations: st.alpha.len(),
                residual: st.last_beta,
            })
        })
        .collect()
}

/// Single-problem convenience wrapper.
pub fn lanczos<F>(n: usize, opts: &LanczosOptions, want_vector: bool, mut apply: F) -> Result<LanczosOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut out = lanczos_lockstep(n, 1, opts, want_vector, |_, xs, ys| apply(xs[0], &mut ys[0]))?;
    Ok(out.remove(0))
}
