//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit QL, after the EISPACK tred2/tql2 pair.

use super::SymMatrix;
use crate::error::{Error, Result};

/// Eigen-decomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Option<Vec<f64>>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Option<Vec<f64>> {
        let n = self.values.len();
        self.vectors.as_ref().map(|v| (0..n).map(|i| v[i * n + k]).collect())
    }
}

const MAX_QL_SWEEPS: usize = 60;

pub fn sym_eigen(m: &SymMatrix, want_vectors: bool) -> Result<SymEigen> {
    let n = m.n();
    if n == 0 {
        return Ok(SymEigen { values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    if want_vectors {
        tql(&mut d, &mut e, |i, c, s| {
            for k in 0..n {
                let row = &mut v[k * n..(k + 1) * n];
                let h = row[i + 1];
                row[i + 1] = s * row[i] + c * h;
                row[i] = c * row[i] - s * h;
            }
        })?;
    } else {
        tql(&mut d, &mut e, |_, _, _| {})?;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = vec![0.0; n * n];
        for (col, &k) in order.iter().enumerate() {
            for i in 0..n {
                out[i * n + col] = v[i * n + k];
            }
        }
        out
    });
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(sym_eigen(m, false)?.values)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`), ascending, together with
/// the last component of each normalized eigenvector.
pub(crate) fn tridiagonal_eigen_last_row(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; k];
    e[1..].copy_from_slice(off);
    let mut last = vec![0.0; k];
    last[k - 1] = 1.0;
    tql(&mut d, &mut e, |i, c, s| {
        let h = last[i + 1];
        last[i + 1] = s * last[i] + c * h;
        last[i] = c * last[i] - s * h;
    })?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok((order.iter().map(|&i| d[i]).collect(), order.iter().map(|&i| last[i]).collect()))
}

/// Full eigenvectors of a symmetric tridiagonal matrix, row-major, ascending order.
pub(crate) fn tridiagonal_eigen_full(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; k];
    e[1..].copy_from_slice(off);
    let mut z = vec![0.0; k * k];
    for i in 0..k {
        z[i * k + i] = 1.0;
    }
    tql(&mut d, &mut e, |i, c, s| {
        for r in 0..k {
            let h = z[r * k + i + 1];
            z[r * k + i + 1] = s * z[r * k + i] + c * h;
            z[r * k + i] = c * z[r * k + i] - s * h;
        }
    })?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let mut out = vec![0.0; k * k];
    for (col, &j) in order.iter().enumerate() {
        for r in 0..k {
            out[r * k + col] = z[r * k + j];
        }
    }
    Ok((order.iter().map(|&i| d[i]).collect(), out))
}

/// Householder reduction to tridiagonal form. On exit `v` holds the
/// orthogonal transformation, `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]` the
/// entry at `(i, i - 1)`). Each Givens rotation acting on columns `i, i + 1`
/// is reported through `rotate(i, c, s)` so callers can accumulate whatever
/// part of the eigenvector matrix they need.
fn tql(d: &mut [f64], e: &mut [f64], mut rotate: impl FnMut(usize, f64, f64)) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence { iterations: iter, residual: e[l].abs() });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate(i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
