//! One rank-one first-column update `A + alpha c_i d` of a matrix with
//! known eigenvalues: only `lambda_i` moves, to `lambda_i + alpha c_i(0)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues and eigenvector first components part way through the
/// sequence of updates. Stage `i` means the first `i` updates are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EigState {
    pub stage: usize,
    pub lambda: Vec<Complex64>,
    /// `first[j] = c_j(0)` for the current matrix.
    pub first: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
}

impl EigState {
    pub fn new(lambda: &[f64], first: &[f64]) -> Self {
        assert_eq!(lambda.len(), first.len());
        Self {
            stage: 0,
            lambda: lambda.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            first: first.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            alphas: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.lambda.iter().chain(&self.first).all(|z| z.im == 0.0)
    }
}

/// Adds `alpha c_i d` with `i = state.stage` and advances the stage.
///
/// The first components of the other eigenvectors become
/// `c_j(0) (lambda_j - lambda_i) / (lambda_j - lambda_i - alpha c_i(0))`.
pub fn rank_one_update(state: &EigState, alpha: Complex64) -> Result<EigState> {
    let i = state.stage;
    if i >= state.len() {
        return Err(Error::InvalidArgument { reason: "no eigenvector left to update" });
    }
    let mut next = state.clone();
    next.stage += 1;
    next.alphas.push(alpha);
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(next);
    }
    let li = state.lambda[i];
    let shift = alpha * state.first[i];
    for j in 0..state.len() {
        if j == i {
            continue;
        }
        let gap = state.lambda[j] - li;
        let den = gap - shift;
        if den.norm() <= 1e-14 * (gap.norm() + shift.norm()) {
            return Err(Error::ResonantAlpha { stage: i, other: j });
        }
        next.first[j] = state.first[j] * gap / den;
    }
    next.lambda[i] = li + shift;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_keeps_values() {
        let s = EigState::new(&[-3.0, -1.0], &[0.5, 0.25]);
        let t = rank_one_update(&s, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((t.lambda.clone(), t.first.clone()), (s.lambda.clone(), s.first.clone()));
        assert_eq!(t.stage, 1);
    }

    #[test]
    fn resonance_is_reported() {
        let s = EigState::new(&[-3.0, -1.0], &[1.0, 1.0]);
        let e = rank_one_update(&s, Complex64::new(2.0, 0.0)).unwrap_err();
        assert_eq!(e, Error::ResonantAlpha { stage: 0, other: 1 });
    }
}
