//! Closed forms when every row shares the same rates `(bd, bu, bz)`.
//!
//! Row 0 of the inverse is geometric with ratio `gamma`, the smaller root of
//! `bd x^2 - bw x + bu = 0`; below the diagonal each column approaches
//! `c(0,j)` geometrically with ratio `psi = gamma bd / bu`. The diagonal
//! follows a first-order recursion and tends to `-1 / sqrt(D)` with
//! `D = bw^2 - 4 bu bd`.

use alloc::vec::Vec;

use libm::{pow, sqrt};

use crate::error::{Error, Result};
use crate::general::{invert, Closed, Engine, InverseView, InvertOptions};
use crate::matrix::{Extent, HomogeneousSpec, Rates, StructuredMatrix, Truncation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomConstants {
    pub gamma: f64,
    pub psi: f64,
    /// `D = bw^2 - 4 bu bd`
    pub discriminant: f64,
    /// False when `bz = 0`, where `gamma` and `psi` may reach 1.
    pub strict: bool,
}

impl HomConstants {
    /// `-1 / sqrt(D)`, the limit of the diagonal of the inverse.
    pub fn diagonal_limit(&self) -> Result<f64> {
        if !(self.discriminant > 0.0) {
            return Err(Error::ZeroDiscriminant);
        }
        Ok(-1.0 / sqrt(self.discriminant))
    }
}

pub(crate) fn constants_of(r: &Rates) -> Result<HomConstants> {
    for (which, value) in [("bd", r.down), ("bu", r.up), ("bz", r.tozero)] {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeRate { which, index: 0, value });
        }
    }
    if r.down == 0.0 || r.up == 0.0 {
        return Err(Error::DegenerateRates);
    }
    let bw = r.weight();
    let d = r.tozero * r.tozero + 2.0 * r.tozero * (r.down + r.up) + (r.down - r.up) * (r.down - r.up);
    // 2 bu / (bw + sqrt D) is the small root without cancellation
    let gamma = 2.0 * r.up / (bw + sqrt(d));
    let psi = gamma * r.down / r.up;
    Ok(HomConstants { gamma, psi, discriminant: d, strict: r.tozero > 0.0 })
}

/// `gamma`, `psi` and `D` for a homogeneous spec.
pub fn hom_constants(spec: &HomogeneousSpec) -> Result<HomConstants> {
    constants_of(&spec.rates)
}

/// `-1 / sqrt(D)`.
pub fn diagonal_limit(consts: &HomConstants) -> Result<f64> {
    consts.diagonal_limit()
}

/// Entries of the inverse of a homogeneous matrix by the four-case formula.
/// `diag` caches the diagonal prefix `c(0,0), c(1,1), ...` and is extended
/// on demand.
pub fn hom_element(
    rates: &Rates,
    consts: &HomConstants,
    i: usize,
    j: usize,
    diag: &mut Vec<f64>,
) -> f64 {
    let c00 = -1.0 / rates.down;
    let row0 = |j: usize| c00 * pow(consts.gamma, j as f64);
    if diag.is_empty() {
        diag.push(c00);
    }
    while diag.len() <= i.max(j) {
        let k = diag.len();
        let prev = diag[k - 1];
        let num = -1.0 + rates.up * ((1.0 - consts.psi) * row0(k - 1) + consts.psi * prev);
        diag.push(num / (rates.weight() - rates.down * consts.gamma));
    }
    if j == 0 {
        c00
    } else if i == 0 {
        row0(j)
    } else if i == j {
        diag[i]
    } else if j > i {
        pow(consts.gamma, (j - i) as f64) * diag[i]
    } else {
        (diag[j] - row0(j)) * pow(consts.psi, (i - j) as f64) + row0(j)
    }
}

/// The diagonal again, from the equation of row `i - 1` against column `i`:
/// `c(i,i) = (-bz c(0,i) - bd gamma^2 c(i-2,i-2) + bw gamma c(i-1,i-1)) / bu`
/// for `i >= 2`. Agreement with [`hom_element`] is a consistency check.
pub fn alt_diagonal(rates: &Rates, consts: &HomConstants, diag: &[f64], i: usize) -> f64 {
    assert!(i >= 2 && i <= diag.len(), "needs c(i-1,i-1) and c(i-2,i-2)");
    let g = consts.gamma;
    let c0i = -pow(g, i as f64) / rates.down;
    (-rates.tozero * c0i - rates.down * g * g * diag[i - 2] + rates.weight() * g * diag[i - 1])
        / rates.up
}

/// `|c(n,n) + 1/sqrt(D)|`, the distance of the diagonal from its limit.
pub fn diagonal_gap(spec: &HomogeneousSpec, n: usize) -> Result<f64> {
    let consts = hom_constants(spec)?;
    let limit = consts.diagonal_limit()?;
    let mut diag = Vec::new();
    let c = hom_element(&spec.rates, &consts, n, n, &mut diag);
    Ok(libm::fabs(c - limit))
}

/// Leading `n x n` block of the inverse. Infinite and specially truncated
/// matrices use the closed forms; generic truncations go through
/// [`crate::general::invert`].
pub fn hom_invert(spec: &HomogeneousSpec, n: usize, opts: &InvertOptions) -> Result<InverseView> {
    let matrix = StructuredMatrix::from_homogeneous(spec)?;
    let closed_ok = match spec.extent {
        Extent::Infinite => true,
        Extent::Finite(_) => spec.truncation == Truncation::Special,
    };
    if !closed_ok || spec.rates.down == 0.0 || spec.rates.up == 0.0 {
        return invert(&matrix, n, opts);
    }
    let consts = hom_constants(spec)?;
    let closed = Closed {
        gamma: consts.gamma,
        psi: consts.psi,
        down: spec.rates.down,
        up: spec.rates.up,
        weight: spec.weight(),
        absorbing: None,
    };
    let mut view = InverseView::new(matrix, Engine::Closed(closed), *opts);
    view.materialize(n)?;
    Ok(view)
}

/// Finite `Special` truncation with `n` rows.
pub fn hom_finite_invert(spec: &HomogeneousSpec) -> Result<InverseView> {
    let n = spec.extent.len().ok_or(Error::InfiniteExtent)?;
    hom_invert(spec, n, &InvertOptions::default())
}
