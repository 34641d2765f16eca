//! Eigenvectors of the symmetrized tridiagonal matrix by inverse iteration.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::error::{Error, Result};

use super::sturm::Symmetrized;

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(S - mu I) x = y` by Gaussian elimination with partial pivoting,
/// replacing exact zero pivots by a tiny multiple of the matrix size.
fn shifted_solve(s: &Symmetrized, mu: f64, y: &[f64], tiny: f64) -> Vec<f64> {
    let n = s.diag.len();
    // rows carry three stored entries: (k, k+1, k+2) after pivoting
    let mut d: Vec<f64> = s.diag.iter().map(|a| a - mu).collect();
    let mut du: Vec<f64> = s.off.clone();
    du.push(0.0);
    let mut du2 = vec![0.0; n];
    let mut dl: Vec<f64> = s.off.clone();
    let mut x = y.to_vec();
    for k in 0..n.saturating_sub(1) {
        if fabs(d[k]) >= fabs(dl[k]) {
            if d[k] == 0.0 {
                d[k] = tiny;
            }
            let f = dl[k] / d[k];
            d[k + 1] -= f * du[k];
            x[k + 1] -= f * x[k];
            dl[k] = 0.0;
        } else {
            // swap rows k and k+1
            let f = d[k] / dl[k];
            d[k] = dl[k];
            let tmp = d[k + 1];
            d[k + 1] = du[k] - f * tmp;
            du2[k] = du[k + 1];
            du[k + 1] = -f * du2[k];
            du[k] = tmp;
            x.swap(k, k + 1);
            x[k + 1] -= f * x[k];
        }
    }
    if n > 0 && d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for k in (0..n).rev() {
        let mut v = x[k];
        if k + 1 < n {
            v -= du[k] * x[k + 1];
        }
        if k + 2 < n {
            v -= du2[k] * x[k + 2];
        }
        x[k] = v / d[k];
    }
    x
}

/// Orthonormal eigenvectors of `S`, one per eigenvalue in `values`.
pub fn symmetric_vectors(s: &Symmetrized, values: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = s.diag.len();
    let scale = s
        .diag
        .iter()
        .chain(&s.off)
        .fold(0.0f64, |m, a| m.max(fabs(*a)))
        .max(f64::MIN_POSITIVE);
    let tiny = scale * f64::EPSILON;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (idx, &lambda) in values.iter().enumerate() {
        // seed from the three-term recurrence, which is exact for an
        // exact eigenvalue and at least points the right way otherwise
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for i in 0..n.saturating_sub(1) {
            let prev = if i == 0 { 0.0 } else { s.off[i - 1] * v[i - 1] };
            v[i + 1] = ((lambda - s.diag[i]) * v[i] - prev) / s.off[i];
            let m = fabs(v[i + 1]);
            if m > 1e100 || !m.is_finite() {
                // restart with a flat vector rather than carry an overflow
                v.iter_mut().for_each(|x| *x = 1.0);
                break;
            }
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mu = lambda + tiny * 4.0;
        let mut residual = f64::INFINITY;
        for _ in 0..6 {
            let mut x = shifted_solve(s, mu, &v, tiny);
            for prev in &out {
                let p = dot(&x, prev);
                x.iter_mut().zip(prev).for_each(|(a, b)| *a -= p * b);
            }
            let nx = norm(&x);
            if !(nx > 0.0) || !nx.is_finite() {
                break;
            }
            x.iter_mut().for_each(|a| *a /= nx);
            v = x;
            residual = symmetric_residual(s, lambda, &v);
            if residual <= 1e-12 * scale {
                break;
            }
        }
        if !(residual <= 1e-9 * scale) {
            return Err(Error::IterationStall { index: idx, residual });
        }
        out.push(v);
    }
    Ok(out)
}

fn symmetric_residual(s: &Symmetrized, lambda: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut r = (s.diag[i] - lambda) * v[i];
        if i > 0 {
            r += s.off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += s.off[i] * v[i + 1];
        }
        worst = worst.max(fabs(r));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::super::sturm::{bisect_all, symmetrize};
    use super::*;
    use crate::matrix::Tridiagonal;

    #[test]
    fn vectors_are_orthonormal_eigenvectors() {
        let w = Tridiagonal {
            sub: alloc::vec![1.0, 2.0, 0.5, 1.5],
            diag: alloc::vec![-3.0, -3.5, -4.0, -2.5, -2.0],
            sup: alloc::vec![2.0, 1.0, 1.0, 0.5],
        };
        let s = symmetrize(&w).unwrap();
        let ev = bisect_all(&s);
        let vs = symmetric_vectors(&s, &ev).unwrap();
        for (i, a) in vs.iter().enumerate() {
            assert!(symmetric_residual(&s, ev[i], a) < 1e-13);
            for (j, b) in vs.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(a, b) - expect).abs() < 1e-12);
            }
        }
    }
}
