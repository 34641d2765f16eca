//! Eigenvalues of a tridiagonal matrix with positive off-diagonal products,
//! through a diagonal similarity to a symmetric matrix and Sturm bisection.

use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::error::{Error, Result};
use crate::matrix::Tridiagonal;

/// Symmetric tridiagonal `S = D^-1 W D` and the diagonal `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symmetrized {
    pub diag: Vec<f64>,
    /// `off[i] = S(i, i + 1) = sqrt(W(i, i + 1) W(i + 1, i))`
    pub off: Vec<f64>,
    /// `scale[i] = D(i, i)`, with `W = D S D^-1`
    pub scale: Vec<f64>,
}

pub fn symmetrize(w: &Tridiagonal) -> Result<Symmetrized> {
    let n = w.len();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut scale = Vec::with_capacity(n);
    scale.push(1.0);
    for i in 0..n.saturating_sub(1) {
        let (up, down) = (w.sup[i], w.sub[i]);
        if !(up * down > 0.0) {
            return Err(Error::BandProductNonpositive { index: i });
        }
        off.push(sqrt(up * down));
        // W(i,i+1) = S(i,i+1) d_i / d_{i+1}
        let d = scale[i] * sqrt(down / up);
        scale.push(d);
    }
    Ok(Symmetrized { diag: w.diag.clone(), off, scale })
}

/// Number of eigenvalues of `S` strictly below `x`.
fn count_below(s: &Symmetrized, x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..s.diag.len() {
        let coupling = if i == 0 { 0.0 } else { s.off[i - 1] * s.off[i - 1] };
        q = s.diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues in ascending order, each bisected to full precision.
pub fn bisect_all(s: &Symmetrized) -> Vec<f64> {
    let n = s.diag.len();
    if n == 1 {
        return s.diag.clone();
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { fabs(s.off[i - 1]) } else { 0.0 }
            + if i + 1 < n { fabs(s.off[i]) } else { 0.0 };
        lo = lo.min(s.diag[i] - r);
        hi = hi.max(s.diag[i] + r);
    }
    let pad = (hi - lo).max(fabs(lo)).max(fabs(hi)) * 1e-12 + f64::MIN_POSITIVE;
    lo -= pad;
    hi += pad;
    (0..n)
        .map(|k| {
            // the (k+1)-th smallest: count_below(x) <= k on the left, > k on the right
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(s, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}
