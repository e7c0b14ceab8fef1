//! Wigner matrices, rank-one spikes and their spectra.

mod eigen;
mod lanczos;
mod sandwich;
mod truncation;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::tail_sampler::TailLaw;

pub use eigen::{sym_eigen, sym_eigenvalues, SymEigen};
pub use lanczos::{lanczos, lanczos_lockstep, LanczosOptions, LanczosOutcome};
pub use sandwich::{check_sandwich_even, check_sandwich_odd, numerical_rank, SandwichReport};
pub use truncation::{truncation_split, Band, TruncationParams, TruncationSplit};

/// Dense real symmetric matrix stored row-major in full.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * m.n + i] = x;
        }
        m
    }

    /// Builds from explicit rows; the input must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("matrix rows must form a square"));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        let m = Self { n, data };
        if !m.is_symmetric() {
            return Err(invalid("matrix is not symmetric"));
        }
        Ok(m)
    }

    /// Fills `i <= j` from `f(i, j)` in row order and mirrors to the lower triangle.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                m.data[i * n + j] = x;
                m.data[j * n + i] = x;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
        self.data[j * self.n + i] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| s * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// Adds `theta * v v^T` in place.
    pub fn add_rank_one(&mut self, theta: f64, v: &[f64]) {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let x = self.data[i * n + j] + theta * v[i] * v[j];
                self.data[i * n + j] = x;
                self.data[j * n + i] = x;
            }
        }
    }

    /// `y = M x`, reading only the upper triangle.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = &self.data[i * n + i..(i + 1) * n];
            let xi = x[i];
            let mut acc = [0.0; 4];
            let xs = &x[i + 1..];
            let ys = &mut y[i + 1..];
            let tail = &row[1..];
            let mut k = 0;
            while k + 4 <= tail.len() {
                for l in 0..4 {
                    let a = tail[k + l];
                    acc[l] += a * xs[k + l];
                    ys[k + l] += a * xi;
                }
                k += 4;
            }
            let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
            while k < tail.len() {
                s += tail[k] * xs[k];
                ys[k] += tail[k] * xi;
                k += 1;
            }
            y[i] += row[0] * xi + s;
        }
    }

    /// `y1 = M x1` and `y2 = M x2` in one pass over the upper triangle.
    pub fn matvec2(&self, x1: &[f64], x2: &[f64], y1: &mut [f64], y2: &mut [f64]) {
        let n = self.n;
        y1.iter_mut().for_each(|v| *v = 0.0);
        y2.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = &self.data[i * n + i..(i + 1) * n];
            let (p, q) = (x1[i], x2[i]);
            let mut acc1 = [0.0; 4];
            let mut acc2 = [0.0; 4];
            let tail = &row[1..];
            let (xa, xb) = (&x1[i + 1..], &x2[i + 1..]);
            let (ya, yb) = (&mut y1[i + 1..], &mut y2[i + 1..]);
            let mut k = 0;
            while k + 4 <= tail.len() {
                for l in 0..4 {
                    let a = tail[k + l];
                    acc1[l] += a * xa[k + l];
                    acc2[l] += a * xb[k + l];
                    ya[k + l] += a * p;
                    yb[k + l] += a * q;
                }
                k += 4;
            }
            let mut s1 = (acc1[0] + acc1[1]) + (acc1[2] + acc1[3]);
            let mut s2 = (acc2[0] + acc2[1]) + (acc2[2] + acc2[3]);
            while k < tail.len() {
                let a = tail[k];
                s1 += a * xa[k];
                s2 += a * xb[k];
                ya[k] += a * p;
                yb[k] += a * q;
                k += 1;
            }
            y1[i] += row[0] * p + s1;
            y2[i] += row[0] * q + s2;
        }
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec(v, &mut y);
        lanczos::dot(v, &y)
    }

    /// Spectral norm, from a full eigensolve.
    pub fn spectral_norm(&self) -> Result<f64> {
        let ev = sym_eigenvalues(self)?;
        Ok(ev.first().map_or(0.0, |a| a.abs()).max(ev.last().map_or(0.0, |b| b.abs())))
    }
}

/// Row-major product of two `n x n` matrices.
fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let ci = &mut c[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let bk = &b[k * n..(k + 1) * n];
            ci.iter_mut().zip(bk).for_each(|(x, y)| *x += aik * y);
        }
    }
    c
}

fn matrix_power(n: usize, m: &[f64], p: usize) -> Vec<f64> {
    let mut result: Option<Vec<f64>> = None;
    let mut base = m.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => matmul(n, &r, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = matmul(n, &base, &base);
        }
    }
    result.unwrap_or_else(|| SymMatrix::identity(n).data)
}

/// `tr(M^p)` for `p >= 1`, as the Frobenius pairing of `M^(p/2)` and `M^(p - p/2)`.
pub fn trace_power(m: &SymMatrix, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(invalid("trace_power needs p >= 1"));
    }
    let n = m.n;
    let h = p / 2;
    if h == 0 {
        return Ok((0..n).map(|i| m.get(i, i)).sum());
    }
    let low = matrix_power(n, &m.data, h);
    if p % 2 == 0 {
        return Ok(low.iter().map(|x| x * x).sum());
    }
    // M^(h+1) = M^h M; both factors are polynomials in M so tr(XY) = sum X_ij Y_ij.
    let high = matmul(n, &low, &m.data);
    Ok(low.iter().zip(&high).map(|(a, b)| a * b).sum())
}

/// `scale * max_{i <= j} |a_ij|`, diagonal included.
pub fn max_entry_stat(a: &SymMatrix, scale: f64) -> f64 {
    let n = a.n;
    let mut best = 0.0f64;
    for i in 0..n {
        for &x in &a.data[i * n + i..(i + 1) * n] {
            best = best.max(x.abs());
        }
    }
    scale * best
}

/// Wigner matrix whose upper triangle is drawn in row order from a
/// ChaCha8 stream seeded with `seed`.
pub fn build_wigner(n: usize, law: &TailLaw, seed: u64) -> Result<SymMatrix> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SymMatrix::from_upper_fn(n, |_, _| law.sample(&mut rng)))
}

/// Weights of a head-localized spike.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadWeights {
    Equal,
    Given(Vec<f64>),
}

/// Shape of the spike vector `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpikeVectorSpec {
    /// Standard basis vector `e_index`, 1-based.
    Basis { index: usize },
    /// `(1/sqrt(n), ..., 1/sqrt(n))`.
    UniformDelocalized,
    /// Mass on the first `k` coordinates only.
    HeadLocalized { k: usize, weights: HeadWeights },
    /// Given coordinates, normalized to unit length.
    Explicit { values: Vec<f64> },
}

impl SpikeVectorSpec {
    /// Whether the spike keeps a nonvanishing coordinate as `n` grows.
    pub fn is_localized(&self, n: usize) -> bool {
        match self {
            SpikeVectorSpec::Basis { .. } | SpikeVectorSpec::HeadLocalized { .. } => true,
            SpikeVectorSpec::UniformDelocalized => false,
            SpikeVectorSpec::Explicit { .. } => match realize_spike(self, n) {
                Ok(v) => v.iter().fold(0.0f64, |m, x| m.max(x.abs())) > (n as f64).powf(-0.25),
                Err(_) => false,
            },
        }
    }
}

pub fn realize_spike(spec: &SpikeVectorSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut v = vec![0.0; n];
    match spec {
        SpikeVectorSpec::Basis { index } => {
            if *index == 0 || *index > n {
                return Err(invalid(format!("basis index {index} outside 1..={n}")));
            }
            v[index - 1] = 1.0;
            return Ok(v);
        }
        SpikeVectorSpec::UniformDelocalized => {
            let x = 1.0 / (n as f64).sqrt();
            v.iter_mut().for_each(|c| *c = x);
            return Ok(v);
        }
        SpikeVectorSpec::HeadLocalized { k, weights } => {
            if *k == 0 || *k > n {
                return Err(invalid(format!("head size {k} outside 1..={n}")));
            }
            match weights {
                HeadWeights::Equal => v[..*k].iter_mut().for_each(|c| *c = 1.0),
                HeadWeights::Given(w) => {
                    if w.len() != *k || w.iter().any(|&x| x == 0.0 || !x.is_finite()) {
                        return Err(invalid("head weights must be k finite nonzero numbers"));
                    }
                    v[..*k].copy_from_slice(w);
                }
            }
        }
        SpikeVectorSpec::Explicit { values } => {
            if values.len() != n {
                return Err(invalid(format!("explicit spike has length {}, expected {n}", values.len())));
            }
            v.copy_from_slice(values);
        }
    }
    let norm = lanczos::dot(&v, &v).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(invalid("spike vector must be nonzero and finite"));
    }
    v.iter_mut().for_each(|c| *c /= norm);
    Ok(v)
}

/// Normalization applied to the Wigner matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `1/sqrt(n)`, for `alpha = 4` laws with unit variance.
    InvSqrtN,
    /// `1/b_n`, for `alpha < 4`.
    InvBn,
}

/// `scale * A + theta * v v^T`.
#[derive(Clone, Debug)]
pub struct SpikedModel {
    pub n: usize,
    pub scaling: Scaling,
    pub theta: f64,
    pub spike: SpikeVectorSpec,
    pub law: TailLaw,
}

impl SpikedModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(invalid(format!("theta must be finite and nonnegative, got {}", self.theta)));
        }
        match self.scaling {
            Scaling::InvBn if self.law.alpha() >= 4.0 => {
                Err(invalid("1/b_n scaling requires alpha < 4"))
            }
            Scaling::InvSqrtN => {
                if self.law.alpha() != 4.0 {
                    return Err(invalid("1/sqrt(n) scaling requires alpha = 4"));
                }
                match self.law.second_moment() {
                    Some(m2) if (m2 - 1.0).abs() <= 1e-12 => Ok(()),
                    _ => Err(invalid("1/sqrt(n) scaling requires a unit-variance law")),
                }
            }
            Scaling::InvBn => Ok(()),
        }
    }

    pub fn scale(&self) -> Result<f64> {
        scale_for(self.scaling, &self.law, self.n)
    }
}

pub(crate) fn scale_for(scaling: Scaling, law: &TailLaw, n: usize) -> Result<f64> {
    match scaling {
        Scaling::InvSqrtN => Ok(1.0 / (n as f64).sqrt()),
        Scaling::InvBn => Ok(1.0 / law.b_of(n as f64)?),
    }
}

/// `scale * A + theta * v v^T` as a dense matrix.
pub fn perturbed_matrix(a: &SymMatrix, model: &SpikedModel) -> Result<SymMatrix> {
    model.validate()?;
    if a.n() != model.n {
        return Err(invalid(format!("matrix is {}x{}, model has n = {}", a.n(), a.n(), model.n)));
    }
    let v = realize_spike(&model.spike, model.n)?;
    let mut p = a.scaled(model.scale()?);
    if model.theta != 0.0 {
        p.add_rank_one(model.theta, &v);
    }
    Ok(p)
}

/// Matrices up to this size are handled by the dense solver.
pub const DENSE_LIMIT: usize = 400;

/// The `k` largest eigenvalues in descending order.
///
/// `k = 1` on matrices above [`DENSE_LIMIT`] uses Lanczos; everything else
/// uses the dense solver, which also resolves repeated eigenvalues.
pub fn top_eigenvalues(m: &SymMatrix, k: usize) -> Result<Vec<f64>> {
    let n = m.n();
    if k == 0 || k > n {
        return Err(invalid(format!("k must lie in 1..={n}, got {k}")));
    }
    if k == 1 && n > DENSE_LIMIT {
        let out = lanczos(n, &LanczosOptions::default(), false, |x, y| m.matvec(x, y))?;
        return Ok(vec![out.top]);
    }
    let ev = sym_eigenvalues(m)?;
    Ok(ev.iter().rev().take(k).copied().collect())
}

/// Largest eigenvalue and a unit eigenvector.
pub fn top_eigenpair(m: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let n = m.n();
    if n == 0 {
        return Err(invalid("empty matrix"));
    }
    if n > DENSE_LIMIT {
        let out = lanczos(n, &LanczosOptions::default(), true, |x, y| m.matvec(x, y))?;
        return Ok((out.top, out.top_vector.expect("vector requested")));
    }
    let eig = sym_eigen(m, true)?;
    Ok((eig.values[n - 1], eig.vector(n - 1).expect("vectors requested")))
}

/// Extreme eigenvalues of `scale * A + theta * v v^T`, optionally together with
/// the largest eigenvalue of `scale * A` itself.
#[derive(Clone, Debug)]
pub struct SpikedExtremes {
    pub lambda1: f64,
    pub lambda_min: Option<f64>,
    pub lambda1_unperturbed: Option<f64>,
}

pub fn spiked_extremes(
    a: &SymMatrix,
    scale: f64,
    theta: f64,
    v: &[f64],
    with_bottom: bool,
    with_unperturbed: bool,
) -> Result<SpikedExtremes> {
    let n = a.n();
    if n <= DENSE_LIMIT {
        let mut p = a.scaled(scale);
        p.add_rank_one(theta, v);
        let ev = sym_eigenvalues(&p)?;
        let unperturbed = if with_unperturbed {
            Some(*sym_eigenvalues(&a.scaled(scale))?.last().expect("n >= 1"))
        } else {
            None
        };
        return Ok(SpikedExtremes {
            lambda1: ev[n - 1],
            lambda_min: with_bottom.then(|| ev[0]),
            lambda1_unperturbed: unperturbed,
        });
    }
    let opts = LanczosOptions { want_bottom: with_bottom, ..LanczosOptions::default() };
    let count = if with_unperturbed { 2 } else { 1 };
    // Problem 0 is the spiked operator, problem 1 the bare scaled matrix.
    let outcomes = lanczos_lockstep(n, count, &opts, false, |active, xs, ys| {
        if xs.len() == 2 {
            let (y0, y1) = ys.split_at_mut(1);
            a.matvec2(xs[0], xs[1], &mut y0[0], &mut y1[0]);
        } else {
            a.matvec(xs[0], &mut ys[0]);
        }
        for (r, &problem) in active.iter().enumerate() {
            ys[r].iter_mut().for_each(|y| *y *= scale);
            if problem == 0 && theta != 0.0 {
                let c = theta * lanczos::dot(v, xs[r]);
                ys[r].iter_mut().zip(v).for_each(|(y, vi)| *y += c * vi);
            }
        }
    })?;
    Ok(SpikedExtremes {
        lambda1: outcomes[0].top,
        lambda_min: outcomes[0].bottom,
        lambda1_unperturbed: outcomes.get(1).map(|o| o.top),
    })
}
