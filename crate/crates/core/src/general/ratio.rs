//! Ratio tables for the stable evaluation of the inverse.
//!
//! Along a row above the diagonal, `c(i,j) = c(i,j-1) r_j`, and down a column
//! below the diagonal, `c(i,j) - c(0,j) = (c(i-1,j) - c(0,j)) s_i`. The ratios
//! are the decaying solutions of the same three-term equations the forward
//! recursion uses, computed backwards from the last row:
//!
//! ```text
//! r_k = bu_{k-1} / (bw_k - bd_{k+1} r_{k+1})     r_{l+1} = 0
//! s_i = bd_i     / (bw_i - bu_i s_{i+1})         s_{l+1} = 0
//! ```
//!
//! Both denominators stay above `bz + bd` of their row, so the backward sweep
//! does not amplify rounding the way the forward recursion does.

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;

use crate::error::{Error, Result};
use crate::matrix::{Extent, StructuredMatrix};

use super::InvertOptions;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatioTables {
    /// `r[k]` for `k = 0..len`, `r[0]` unused.
    pub r: Vec<f64>,
    /// `s[i]` for `i = 0..len`, `s[0]`, `s[1]` unused by the fill.
    pub s: Vec<f64>,
    /// Truncation level (last row index) used, `None` if exact.
    pub level: Option<usize>,
    pub change: f64,
}

impl RatioTables {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self, k: usize) -> f64 {
        self.r.get(k).copied().unwrap_or(0.0)
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s.get(i).copied().unwrap_or(0.0)
    }
}

fn divide(num: f64, den: f64, what: &'static str, index: usize) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator { what, index });
    }
    Ok(num / den)
}

/// Tables for rows `0..=last` with row `last` closed off, keeping the first
/// `keep` entries.
pub(crate) fn sweep(b: &StructuredMatrix, last: usize, keep: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = vec![0.0; last + 2];
    let mut s = vec![0.0; last + 2];
    let mut next = b.checked_rates(last)?;
    next.up = 0.0;
    for k in (1..=last).rev() {
        let cur = next;
        let prev = b.checked_rates(k - 1)?;
        let below = if k < last { b.rates(k + 1).down } else { 0.0 };
        r[k] = divide(prev.up, cur.weight() - below * r[k + 1], "row ratio", k)?;
        s[k] = divide(cur.down, cur.weight() - cur.up * s[k + 1], "column ratio", k)?;
        next = prev;
    }
    r.truncate(keep);
    s.truncate(keep);
    Ok((r, s))
}

/// Ratio tables covering indices `0..keep` (clamped to the matrix size).
/// Infinite matrices are truncated at doubling levels until the tables agree
/// to `opts.tol` (relative) between successive levels.
pub(crate) fn ratio_tables(
    b: &StructuredMatrix,
    keep: usize,
    opts: &InvertOptions,
) -> Result<RatioTables> {
    match b.extent() {
        Extent::Finite(n) => {
            let keep = keep.min(n);
            let (r, s) = sweep(b, n - 1, keep)?;
            Ok(RatioTables { r, s, level: None, change: 0.0 })
        }
        Extent::Infinite => {
            let mut level = opts.initial_level.max(2 * keep).max(2);
            let (mut r, mut s) = sweep(b, level, keep)?;
            loop {
                let next_level = level * 2;
                if next_level > opts.max_level {
                    return Err(Error::NoConvergence { level, change: f64::NAN });
                }
                let (r2, s2) = sweep(b, next_level, keep)?;
                let change = max_rel_change(&r, &r2).max(max_rel_change(&s, &s2));
                level = next_level;
                r = r2;
                s = s2;
                if change < opts.tol {
                    return Ok(RatioTables { r, s, level: Some(level), change });
                }
                if !change.is_finite() {
                    return Err(Error::NoConvergence { level, change });
                }
            }
        }
    }
}

fn max_rel_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| {
        let d = fabs(x - y);
        let scale = fabs(*y);
        f64::max(m, if d == 0.0 { 0.0 } else { d / scale })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{BandSpec, HomogeneousSpec};

    #[test]
    fn worked_ratios() {
        let b = StructuredMatrix::validate(
            BandSpec::from_arrays(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let t = ratio_tables(&b, 3, &InvertOptions::default()).unwrap();
        assert!((t.r[1] - 6.0 / 7.0).abs() < 1e-15);
        assert!((t.r[1] * t.r[2] - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_limits() {
        let b = StructuredMatrix::from_homogeneous(&HomogeneousSpec::new(
            2.0,
            1.0,
            1.0,
            Extent::Infinite,
        ))
        .unwrap();
        let t = ratio_tables(&b, 10, &InvertOptions::default()).unwrap();
        let gamma = 1.0 - libm::sqrt(2.0) / 2.0;
        for k in 1..10 {
            assert!((t.r[k] - gamma).abs() < 1e-14);
        }
        for i in 2..10 {
            assert!((t.s[i] - 2.0 * gamma).abs() < 1e-14);
        }
    }
}
