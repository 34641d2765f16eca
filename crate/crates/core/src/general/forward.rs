//! Literal forward evaluation: row 0 from the gamma recursion, then columns
//! from `B C = I` and rows from `C B = I`, alternating stage by stage.
//!
//! Every step divides by a rate, so rounding grows like the inverse of the
//! entries being computed. Useful as an independent check on small matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::StructuredMatrix;
use crate::oracle::DenseMatrix;

use super::gamma::{next_zero_up, GammaTable, Walk};

/// The whole inverse of a finite matrix, and the number of entries computed.
pub(crate) fn forward_inverse(b: &StructuredMatrix) -> Result<(DenseMatrix, u64)> {
    let n = b.size().ok_or(Error::InfiniteExtent)?;
    let last = n - 1;
    let c00 = -1.0 / b.exit_rate();
    let mut c = DenseMatrix::zeros(n);
    let mut ops = 0u64;
    for i in 0..n {
        c[(i, 0)] = c00;
    }
    let gamma = GammaTable::build(b)?;
    for j in 1..n {
        c[(0, j)] = gamma.gamma[j] * c00;
        ops += 1;
    }
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for s in 1..n {
        // column s, rows s..=last, from the row equations of B C = I
        let mut walk = Walk::with_capacity(n - s + 2);
        let start = s - 1;
        walk.push_known(if s >= 2 { c[(s - 2, s)] } else { 0.0 });
        walk.push_known(c[(s - 1, s)]);
        for i in start..last {
            let r = b.rates(i);
            let (p, q, f) = if i == 0 {
                (0.0, -r.down - r.up, 0.0)
            } else {
                (r.down, -r.weight(), delta(i, s) - r.tozero * c[(0, s)])
            };
            walk.step(p, q, r.up, f, (i + 1, s))?;
        }
        let r = b.rates(last);
        let end = walk.len() - 1;
        let terms = [(end - 1, if last == 0 { 0.0 } else { r.down }), (end, -r.weight_closed())];
        walk.constrain(&terms, delta(last, s) - r.tozero * c[(0, s)], (last, s))?;
        let col = walk.finish((last, s))?;
        for i in s..n {
            c[(i, s)] = col[i - s + 2];
            ops += 1;
        }

        // row s, columns s+1..=cut, from the column equations of C B = I;
        // beyond the first zero up rate the row vanishes
        let cut = next_zero_up(b, s);
        if cut > s {
            let mut walk = Walk::with_capacity(cut - s + 2);
            walk.push_known(c[(s, s - 1)]);
            walk.push_known(c[(s, s)]);
            for j in s..cut {
                let r = b.rates(j);
                walk.step(b.rates(j - 1).up, -r.weight(), b.rates(j + 1).down, delta(s, j), (s, j + 1))?;
            }
            let end = walk.len() - 1;
            let rc = b.rates(cut);
            let terms = [(end - 1, b.rates(cut - 1).up), (end, -rc.weight())];
            walk.constrain(&terms, delta(s, cut), (s, cut))?;
            let row = walk.finish((s, cut))?;
            for j in s + 1..=cut {
                c[(s, j)] = row[j - s + 1];
                ops += 1;
            }
        }
    }
    Ok((c, ops))
}

/// Indices of rows whose up rate vanishes; the inverse has a zero block to
/// their upper right.
pub fn zero_up_rows(b: &StructuredMatrix) -> Vec<usize> {
    match b.size() {
        Some(n) => (0..n.saturating_sub(1)).filter(|&i| b.rates(i).up == 0.0).collect(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::BandSpec;
    use crate::oracle::dense_invert;

    fn check(down: &[f64], up: &[f64], tozero: &[f64], tol: f64) {
        let b = StructuredMatrix::validate(BandSpec::from_arrays(down, up, tozero).unwrap()).unwrap();
        let n = down.len();
        let (c, _) = forward_inverse(&b).unwrap();
        let oracle = dense_invert(&b.to_dense(n)).unwrap();
        let err = c.max_abs_diff(&oracle);
        assert!(err <= tol, "error {err}\n{c:?}\n{oracle:?}");
    }

    #[test]
    fn worked_example() {
        check(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0], 1e-14);
    }

    #[test]
    fn one_by_one() {
        check(&[2.0], &[0.0], &[0.0], 0.0);
    }

    #[test]
    fn zero_down_rates() {
        check(&[1.0, 0.5, 0.0, 1.0, 0.0, 2.0], &[1.0, 1.0, 2.0, 1.0, 0.5, 0.0], &[
            0.0, 0.2, 1.0, 0.3, 1.0, 0.1,
        ], 1e-12);
        check(&[1.0, 0.0, 1.0, 1.0], &[1.0, 1.0, 1.0, 0.0], &[0.0, 0.5, 0.5, 0.5], 1e-12);
    }

    #[test]
    fn zero_up_rates() {
        check(&[1.0, 0.5, 1.0, 1.0, 2.0], &[1.0, 1.0, 0.0, 1.0, 0.0], &[0.0, 0.2, 1.0, 0.3, 1.0], 1e-12);
        check(&[1.0, 0.5, 1.0], &[1.0, 0.0, 0.0], &[0.0, 0.2, 1.0], 1e-12);
    }
}
