use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, pow};

use crate::error::{Error, Result};
use crate::matrix::{Extent, StructuredMatrix};
use crate::oracle::DenseMatrix;

use super::ratio::{ratio_tables, RatioTables};
use super::InvertOptions;

/// Closed-form constants for rows sharing the same rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Closed {
    pub gamma: f64,
    pub psi: f64,
    pub down: f64,
    pub up: f64,
    pub weight: f64,
    /// `Some(c(1,1))` for absorbing chains, whose row 0 vanishes past 0.
    pub absorbing: Option<f64>,
}

#[derive(Debug, Clone)]
pub(crate) enum Engine {
    Ratio(RatioTables),
    Closed(Closed),
    Table(DenseMatrix),
}

/// How an infinite matrix was truncated to produce a view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// Last row index of the deepest truncation, `None` if no truncation.
    pub level: Option<usize>,
    /// Largest relative change between the last two levels.
    pub change: f64,
    pub tol: f64,
}

/// Lazily grown leading block of `C = B^-1`.
///
/// Stage `k` adds row 0 entry `c(0,k)`, the column `c(1..k, k)` above the
/// diagonal, `c(k,k)` and the row `c(k, 1..k)` below it. Reads never change
/// an entry once it has been computed.
#[derive(Debug, Clone)]
pub struct InverseView {
    matrix: StructuredMatrix,
    engine: Engine,
    opts: InvertOptions,
    c00: f64,
    /// `gammas[j] = c(0,j) / c(0,0)`, with `row0[j] = c00 * gammas[j]`
    gammas: Vec<f64>,
    row0: Vec<f64>,
    /// `upper[i][k] = c(i, i + k)` for `i >= 1`
    upper: Vec<Vec<f64>>,
    /// `lower[j][k] = c(j + 1 + k, j)` for `j >= 1`
    lower: Vec<Vec<f64>>,
    ops: u64,
    report: TruncationReport,
}

impl InverseView {
    pub(crate) fn new(matrix: StructuredMatrix, engine: Engine, opts: InvertOptions) -> Self {
        let c00 = -1.0 / matrix.exit_rate();
        let report = match &engine {
            Engine::Ratio(t) => TruncationReport { level: t.level, change: t.change, tol: opts.tol },
            _ => TruncationReport { level: None, change: 0.0, tol: opts.tol },
        };
        Self {
            matrix,
            engine,
            opts,
            c00,
            gammas: vec![1.0],
            row0: vec![c00],
            upper: vec![Vec::new()],
            lower: vec![Vec::new()],
            ops: 1,
            report,
        }
    }

    pub fn matrix(&self) -> &StructuredMatrix {
        &self.matrix
    }

    /// Number of leading rows and columns computed so far.
    pub fn materialized(&self) -> usize {
        self.row0.len()
    }

    /// Entry computations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn report(&self) -> TruncationReport {
        self.report
    }

    /// `c(i,0) = -1 / bd_0` for every row.
    pub fn first_column(&self) -> f64 {
        self.c00
    }

    /// Row 0 of the computed block.
    pub fn row0(&self) -> &[f64] {
        &self.row0
    }

    /// `gamma_j = c(0,j) / c(0,0)` if computed.
    pub fn gamma(&self, j: usize) -> Option<f64> {
        self.gammas.get(j).copied()
    }

    /// Entry `(i, j)` if it has been computed.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if j == 0 {
            return Some(self.c00);
        }
        if i == 0 {
            return self.row0.get(j).copied();
        }
        if j >= i {
            self.upper.get(i)?.get(j - i).copied()
        } else {
            self.lower.get(j)?.get(i - j - 1).copied()
        }
    }

    /// Entry `(i, j)`, computing whole stages up to `max(i, j)` if needed.
    pub fn element(&mut self, i: usize, j: usize) -> Result<f64> {
        if let Some(n) = self.matrix.size() {
            if i >= n || j >= n {
                return Err(Error::OutOfRange { i, j, size: n });
            }
        }
        if j == 0 {
            return Ok(self.c00);
        }
        self.materialize(i.max(j) + 1)?;
        Ok(self.get(i, j).expect("materialized"))
    }

    /// Extends the computed block to at least `n` rows and columns.
    pub fn materialize(&mut self, n: usize) -> Result<()> {
        if let Some(size) = self.matrix.size() {
            if n > size {
                return Err(Error::OutOfRange { i: n - 1, j: n - 1, size });
            }
        }
        while self.materialized() < n {
            self.stage(n)?;
        }
        Ok(())
    }

    /// Leading computed block as a dense matrix.
    pub fn block(&self) -> DenseMatrix {
        let n = self.materialized();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.get(i, j).expect("materialized");
            }
        }
        m
    }

    fn ensure_tables(&mut self, target: usize) -> Result<()> {
        if let Engine::Ratio(t) = &self.engine {
            let finite = self.matrix.extent() != Extent::Infinite;
            if finite || t.len() >= target + 2 {
                return Ok(());
            }
            let keep = (2 * target).max(t.len() * 2) + 2;
            let t = ratio_tables(&self.matrix, keep, &self.opts)?;
            self.report.level = t.level;
            self.report.change = self.report.change.max(t.change);
            self.engine = Engine::Ratio(t);
        }
        Ok(())
    }

    fn stage(&mut self, target: usize) -> Result<()> {
        let k = self.materialized();
        self.ensure_tables(target)?;
        let (gk, rk, sk) = match &self.engine {
            Engine::Ratio(t) => (self.gammas[k - 1] * t.r(k), t.r(k), t.s(k)),
            Engine::Closed(c) => {
                let gk = if c.absorbing.is_some() { 0.0 } else { pow(c.gamma, k as f64) };
                (gk, c.gamma, c.psi)
            }
            Engine::Table(t) => (t[(0, k)] / self.c00, 0.0, 0.0),
        };
        let c0k = self.c00 * gk;
        self.gammas.push(gk);
        if let Engine::Table(t) = &self.engine {
            self.row0.push(c0k);
            for i in 1..k {
                self.upper[i].push(t[(i, k)]);
            }
            self.upper.push(vec![t[(k, k)]]);
            for j in 1..k {
                self.lower[j].push(t[(k, j)]);
            }
            self.lower.push(Vec::new());
            self.ops += 2 * k as u64;
            return Ok(());
        }
        for i in 1..k {
            let prev = *self.upper[i].last().expect("row started");
            self.upper[i].push(prev * rk);
        }
        let prev_diag = if k == 1 { self.c00 } else { self.upper[k - 1][0] };
        let diag = self.diagonal(k, c0k, prev_diag)?;
        self.row0.push(c0k);
        self.upper.push(vec![diag]);
        for j in 1..k {
            let c0j = self.row0[j];
            let above = if j + 1 == k { self.upper[j][0] } else { *self.lower[j].last().expect("column started") };
            self.lower[j].push(c0j + (above - c0j) * sk);
        }
        self.lower.push(Vec::new());
        self.ops += 2 * k as u64;
        Ok(())
    }

    fn diagonal(&self, k: usize, c0k: f64, prev_diag: f64) -> Result<f64> {
        match &self.engine {
            Engine::Ratio(t) => {
                let r = self.matrix.checked_rates(k)?;
                let up = if self.matrix.size() == Some(k + 1) { 0.0 } else { r.up };
                let s_next = t.s(k + 1);
                let num = 1.0 - r.tozero * c0k - r.down * t.r(k) * prev_diag - up * (1.0 - s_next) * c0k;
                let den = up * s_next - r.weight();
                if den == 0.0 {
                    return Err(Error::ZeroDenominator { what: "diagonal", index: k });
                }
                Ok(num / den)
            }
            Engine::Closed(c) => {
                if k == 1 {
                    if let Some(c11) = c.absorbing {
                        return Ok(c11);
                    }
                }
                let c0prev = if c.absorbing.is_some() { 0.0 } else { self.row0[k - 1] };
                Ok((-1.0 + c.up * ((1.0 - c.psi) * c0prev + c.psi * prev_diag))
                    / (c.weight - c.down * c.gamma))
            }
            Engine::Table(t) => Ok(t[(k, k)]),
        }
    }

    /// Largest `|BC - I|` or `|CB - I|` entry over the equations the computed
    /// block fully determines: all of them when it covers a finite matrix,
    /// otherwise rows (resp. columns) up to `n - 2`.
    pub fn residual(&self) -> f64 {
        let n = self.materialized();
        let full = self.matrix.size() == Some(n);
        let b = &self.matrix;
        let rows = if full { n } else { n.saturating_sub(1) };
        let mut worst: f64 = 0.0;
        let c = |i: usize, j: usize| self.get(i, j).expect("materialized");
        // B C: row i of B touches column 0 and i - 1 ..= i + 1
        for i in 0..rows {
            for j in 0..n {
                let mut sum = b.entry_unchecked(i, 0) * c(0, j);
                for k in i.saturating_sub(1).max(1)..(i + 2).min(n) {
                    sum += b.entry_unchecked(i, k) * c(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(fabs(sum - target));
            }
        }
        // C B: column j >= 1 of B touches rows j - 1 ..= j + 1, column 0 all
        for i in 0..n {
            let start = if full { 0 } else { 1 };
            for j in start..rows {
                let mut sum = 0.0;
                if j == 0 {
                    for k in 0..n {
                        sum += c(i, k) * b.entry_unchecked(k, 0);
                    }
                } else {
                    for k in j - 1..(j + 2).min(n) {
                        sum += c(i, k) * b.entry_unchecked(k, j);
                    }
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(fabs(sum - target));
            }
        }
        worst
    }
}
