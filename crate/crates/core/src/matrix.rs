//! The structured matrix `B`: rates, validation, entries and the split into a
//! tridiagonal part plus a first-column perturbation.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::oracle::DenseMatrix;

/// Transition rates of one row.
///
/// `down` moves to the previous index, `up` to the next and `tozero` jumps
/// back to index 0. For row 0, `down` is the exit rate and `tozero` is unused.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rates {
    pub down: f64,
    pub up: f64,
    pub tozero: f64,
}

impl Rates {
    pub const fn new(down: f64, up: f64, tozero: f64) -> Self {
        Self { down, up, tozero }
    }

    /// Total outflow `bw = bz + bd + bu`.
    pub fn weight(&self) -> f64 {
        self.tozero + self.down + self.up
    }
}

/// Number of rows of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    /// `n` rows, indexed `0..n`. The last index is `n - 1`.
    Finite(usize),
    Infinite,
}

impl Extent {
    pub fn len(&self) -> Option<usize> {
        match *self {
            Extent::Finite(n) => Some(n),
            Extent::Infinite => None,
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        match *self {
            Extent::Finite(n) => i < n,
            Extent::Infinite => true,
        }
    }
}

/// Rule producing the rates of row `i` of an infinite matrix.
pub type RateRule = Arc<dyn Fn(usize) -> Rates + Send + Sync>;

#[derive(Clone)]
enum Rows {
    Finite(Vec<Rates>),
    Infinite { rule: RateRule, tail_from: Option<usize> },
}

/// Raw band data of a matrix: the per-row rates, not yet validated.
#[derive(Clone)]
pub struct BandSpec {
    rows: Rows,
}

impl fmt::Debug for BandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rows {
            Rows::Finite(rows) => f.debug_struct("BandSpec").field("rows", rows).finish(),
            Rows::Infinite { tail_from, .. } => f
                .debug_struct("BandSpec")
                .field("extent", &"infinite")
                .field("tail_from", tail_from)
                .finish(),
        }
    }
}

impl BandSpec {
    pub fn finite(rows: Vec<Rates>) -> Self {
        Self { rows: Rows::Finite(rows) }
    }

    /// Builds a finite spec from three parallel arrays.
    pub fn from_arrays(down: &[f64], up: &[f64], tozero: &[f64]) -> Result<Self> {
        if down.len() != up.len() || down.len() != tozero.len() {
            return Err(Error::LengthMismatch {
                down: down.len(),
                up: up.len(),
                tozero: tozero.len(),
            });
        }
        let rows = down
            .iter()
            .zip(up)
            .zip(tozero)
            .map(|((&d, &u), &z)| Rates::new(d, u, z))
            .collect();
        Ok(Self::finite(rows))
    }

    pub fn infinite<F>(rule: F) -> Self
    where
        F: Fn(usize) -> Rates + Send + Sync + 'static,
    {
        Self { rows: Rows::Infinite { rule: Arc::new(rule), tail_from: None } }
    }

    /// Declares that rows `from..` of an infinite spec all share `rates(from)`.
    pub fn with_homogeneous_tail(mut self, from: usize) -> Self {
        if let Rows::Infinite { tail_from, .. } = &mut self.rows {
            *tail_from = Some(from);
        }
        self
    }

    pub fn extent(&self) -> Extent {
        match &self.rows {
            Rows::Finite(rows) => Extent::Finite(rows.len()),
            Rows::Infinite { .. } => Extent::Infinite,
        }
    }

    pub fn homogeneous_tail(&self) -> Option<usize> {
        match &self.rows {
            Rows::Finite(_) => None,
            Rows::Infinite { tail_from, .. } => *tail_from,
        }
    }

    /// Rates of row `i`. Panics if `i` is outside a finite extent.
    pub fn rates(&self, i: usize) -> Rates {
        match &self.rows {
            Rows::Finite(rows) => rows[i],
            Rows::Infinite { rule, tail_from } => match tail_from {
                Some(t) if i > *t => rule(*t),
                _ => rule(i),
            },
        }
    }

    /// Finite rows, if any.
    pub fn rows(&self) -> Option<&[Rates]> {
        match &self.rows {
            Rows::Finite(rows) => Some(rows),
            Rows::Infinite { .. } => None,
        }
    }

    /// Copy with row 0 replaced.
    pub fn with_row0(&self, row0: Rates) -> Self {
        match &self.rows {
            Rows::Finite(rows) => {
                let mut rows = rows.clone();
                if let Some(first) = rows.first_mut() {
                    *first = row0;
                }
                Self::finite(rows)
            }
            Rows::Infinite { rule, tail_from } => {
                let rule = Arc::clone(rule);
                let wrapped: RateRule = Arc::new(move |i| if i == 0 { row0 } else { rule(i) });
                // a tail declared from row 0 would also cover row 1
                let tail_from = tail_from.map(|t| t.max(1));
                Self { rows: Rows::Infinite { rule: wrapped, tail_from } }
            }
        }
    }

    /// Copy of rows `0..n` closed off so that row `n - 1` has zero row sum.
    pub fn truncated(&self, n: usize) -> Self {
        let mut rows: Vec<Rates> = (0..n).map(|i| self.rates(i)).collect();
        if let Some(last) = rows.last_mut() {
            last.up = 0.0;
        }
        Self::finite(rows)
    }
}

/// How a finite homogeneous matrix is closed off at its last row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Last row `(bu/gamma - bd, ..., bd, -bu/gamma)`, which keeps the
    /// homogeneous closed forms exact.
    Special,
    /// Last row `(bz, ..., bd, -(bd + bz))`.
    #[default]
    Generic,
}

/// Rows that all share the same rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousSpec {
    pub rates: Rates,
    pub extent: Extent,
    pub truncation: Truncation,
}

impl HomogeneousSpec {
    pub fn new(down: f64, up: f64, tozero: f64, extent: Extent) -> Self {
        Self { rates: Rates::new(down, up, tozero), extent, truncation: Truncation::Generic }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn weight(&self) -> f64 {
        self.rates.weight()
    }

    /// Expands into per-row band data.
    pub fn to_band(&self) -> Result<BandSpec> {
        let r = self.rates;
        match self.extent {
            Extent::Infinite => Ok(BandSpec::infinite(move |_| r).with_homogeneous_tail(0)),
            Extent::Finite(0) => Err(Error::Empty),
            Extent::Finite(n) => {
                let mut rows = alloc::vec![r; n];
                rows[0].tozero = 0.0;
                let last = &mut rows[n - 1];
                last.up = 0.0;
                if self.truncation == Truncation::Special && n > 1 {
                    let consts = crate::homogeneous::constants_of(&r)?;
                    last.tozero = r.up / consts.gamma - r.down;
                }
                Ok(BandSpec::finite(rows))
            }
        }
    }
}

/// Rows checked eagerly for an infinite spec without a declared tail.
pub const INFINITE_PROBE_ROWS: usize = 256;

/// A validated matrix of the tridiagonal-plus-first-column shape.
#[derive(Debug, Clone)]
pub struct StructuredMatrix {
    spec: BandSpec,
}

fn check_row(i: usize, r: Rates, last: bool) -> Result<()> {
    for (which, value) in [("bd", r.down), ("bu", r.up), ("bz", r.tozero)] {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeRate { which, index: i, value });
        }
    }
    if i == 0 {
        if !(r.down > 0.0) {
            return Err(Error::NonPositiveB0d { value: r.down });
        }
    } else if !(r.weight() > 0.0) {
        return Err(Error::ZeroRowWeight { index: i });
    }
    if last && r.up != 0.0 {
        return Err(Error::BadFinalRow { index: i, up: r.up });
    }
    Ok(())
}

impl StructuredMatrix {
    /// Checks the band conditions: `bd_0 > 0`, non-negative rates, positive
    /// row weight below row 0 and, for finite matrices, a zero-sum final row.
    pub fn validate(spec: BandSpec) -> Result<Self> {
        match spec.extent() {
            Extent::Finite(0) => return Err(Error::Empty),
            Extent::Finite(n) => {
                for i in 0..n {
                    check_row(i, spec.rates(i), i + 1 == n)?;
                }
            }
            Extent::Infinite => {
                let probe = spec
                    .homogeneous_tail()
                    .map_or(INFINITE_PROBE_ROWS, |t| t + 2);
                for i in 0..probe {
                    check_row(i, spec.rates(i), false)?;
                }
            }
        }
        Ok(Self { spec })
    }

    pub fn from_homogeneous(spec: &HomogeneousSpec) -> Result<Self> {
        Self::validate(spec.to_band()?)
    }

    pub fn spec(&self) -> &BandSpec {
        &self.spec
    }

    pub fn extent(&self) -> Extent {
        self.spec.extent()
    }

    pub fn size(&self) -> Option<usize> {
        self.extent().len()
    }

    pub fn rates(&self, i: usize) -> Rates {
        self.spec.rates(i)
    }

    /// Rates of row `i`, re-validated. Infinite specs are only probed up front,
    /// so algorithms walking deep into one go through here.
    pub fn checked_rates(&self, i: usize) -> Result<Rates> {
        let r = self.spec.rates(i);
        if self.spec.homogeneous_tail().is_none() && i >= INFINITE_PROBE_ROWS {
            check_row(i, r, false)?;
        }
        Ok(r)
    }

    pub fn exit_rate(&self) -> f64 {
        self.spec.rates(0).down
    }

    /// Entry `(i, j)` of `B`.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        if let Some(n) = self.size() {
            if i >= n || j >= n {
                return Err(Error::OutOfRange { i, j, size: n });
            }
        }
        Ok(self.entry_unchecked(i, j))
    }

    pub(crate) fn entry_unchecked(&self, i: usize, j: usize) -> f64 {
        let r = self.spec.rates(i);
        if i == 0 {
            return match j {
                0 => -r.down - r.up,
                1 => r.up,
                _ => 0.0,
            };
        }
        if j == 0 {
            return if i == 1 { r.tozero + r.down } else { r.tozero };
        }
        if j + 1 == i {
            r.down
        } else if j == i {
            -r.weight()
        } else if j == i + 1 {
            r.up
        } else {
            0.0
        }
    }

    /// Rows `0..n` as a dense matrix (the whole matrix when finite and
    /// `n` equals its size).
    pub fn to_dense(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, 0)] = self.entry_unchecked(i, 0);
            for j in i.saturating_sub(1).max(1)..(i + 2).min(n) {
                m[(i, j)] = self.entry_unchecked(i, j);
            }
        }
        m
    }

    /// Splits a finite `B` into `W + u d`, where `W` is tridiagonal and
    /// `u d` only touches the first column.
    pub fn decompose(&self) -> Result<Decomposition> {
        let n = self.size().ok_or(Error::InfiniteExtent)?;
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n.saturating_sub(1));
        let mut sup = Vec::with_capacity(n.saturating_sub(1));
        let mut perturbation = Vec::with_capacity(n);
        for i in 0..n {
            let r = self.rates(i);
            if i == 0 {
                diag.push(-r.down - r.up);
                perturbation.push(0.0);
            } else {
                sub.push(r.down);
                diag.push(-r.weight());
                perturbation.push(r.tozero);
            }
            if i + 1 < n {
                sup.push(r.up);
            }
        }
        Ok(Decomposition { tridiagonal: Tridiagonal { sub, diag, sup }, perturbation })
    }
}

/// A tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `sub[i] = W(i + 1, i)`
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// `sup[i] = W(i, i + 1)`
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.sub[j]
        } else if i + 1 == j {
            self.sup[i]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.len();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }
}

/// `B = W + u d` where `d` selects the first column.
///
/// `W` keeps every band entry of `B` (so its diagonal is negative and each row
/// sums to `-bz_i <= 0`); `u = (0, bz_1, bz_2, ...)` carries the whole
/// first-column jump.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub tridiagonal: Tridiagonal,
    pub perturbation: Vec<f64>,
}

impl Decomposition {
    /// Entry `(i, j)` of `W + u d`.
    pub fn recompose(&self, i: usize, j: usize) -> f64 {
        let w = self.tridiagonal.get(i, j);
        if j == 0 {
            w + self.perturbation[i]
        } else {
            w
        }
    }
}
