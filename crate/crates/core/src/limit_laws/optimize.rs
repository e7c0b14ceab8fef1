//! Grid search with compass-search refinement on the unit box.

/// Maximizes `f` over `[0, 1]^dim`.
///
/// Evaluates `f` on a grid with `grid + 1` points per axis (boundaries
/// included), then refines the `starts` best grid points by compass search
/// with step halving down to `1e-12`. Returns the best value and its point.
/// Ties are resolved towards the first point in grid order, so the result is
/// deterministic.
pub fn maximize_unit_box<F>(f: F, dim: usize, grid: usize, starts: usize) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    assert!(dim >= 1 && grid >= 1 && starts >= 1);
    let total = (grid + 1).pow(dim as u32);
    let mut point = vec![0.0; dim];
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(starts + 1);
    for idx in 0..total {
        decode(idx, grid, &mut point);
        let v = f(&point);
        if !v.is_finite() {
            continue;
        }
        if best.len() < starts || v > best.last().unwrap().0 {
            let pos = best.iter().position(|&(b, _)| v > b).unwrap_or(best.len());
            best.insert(pos, (v, idx));
            best.truncate(starts);
        }
    }
    let mut overall = (f64::NEG_INFINITY, vec![0.0; dim]);
    for &(v0, idx) in &best {
        let mut x = vec![0.0; dim];
        decode(idx, grid, &mut x);
        let (v, x) = compass(&f, x, v0, 1.0 / grid as f64);
        if v > overall.0 {
            overall = (v, x);
        }
    }
    overall
}

fn decode(mut idx: usize, grid: usize, out: &mut [f64]) {
    for c in out.iter_mut() {
        *c = (idx % (grid + 1)) as f64 / grid as f64;
        idx /= grid + 1;
    }
}

fn compass<F: Fn(&[f64]) -> f64>(f: &F, mut x: Vec<f64>, mut fx: f64, mut step: f64) -> (f64, Vec<f64>) {
    let dim = x.len();
    let mut trial = x.clone();
    while step > 1e-12 {
        let mut improved = false;
        for d in 0..dim {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[d] = (x[d] + sign * step).clamp(0.0, 1.0);
                if trial[d] == x[d] {
                    continue;
                }
                let v = f(&trial);
                if v > fx {
                    fx = v;
                    x.copy_from_slice(&trial);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (fx, x)
}
