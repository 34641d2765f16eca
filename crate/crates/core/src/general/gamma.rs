//! Row 0 of the inverse through the `gamma_j = c(0,j) / c(0,0)` recursion.
//!
//! Away from zero subdiagonal rates every `gamma_j` is an affine function
//! `rho_j * anchor + eta_j` of one unknown anchor, starting with `gamma_1`.
//! A zero `bd_{j+1}` turns the column-`j` equation into a constraint that
//! fixes the current anchor, and `gamma_{j+1}` becomes the next one. The last
//! anchor is fixed by the column-0 equation
//! `bd_1 gamma_1 + sum_j bz_j gamma_j = bu_0`.

use alloc::vec::Vec;

use libm::fabs;

use crate::error::{Error, Result};
use crate::matrix::{Extent, StructuredMatrix};

use super::InvertOptions;

/// Relative size below which an anchor coefficient counts as zero.
const DEGENERATE: f64 = 1e-14;

/// Chain of unknowns `x_m` linked by three-term equations
/// `p x_{k-1} + q x_k + d x_{k+1} = f`, solved forward with affine anchors.
#[derive(Debug, Clone, Default)]
pub(crate) struct Walk {
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    pub value: Vec<f64>,
    pub anchors: Vec<usize>,
    /// First index of the unresolved segment, if any.
    open: Option<usize>,
}

impl Walk {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            rho: Vec::with_capacity(n),
            eta: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
            anchors: Vec::new(),
            open: None,
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn push_known(&mut self, v: f64) {
        self.rho.push(0.0);
        self.eta.push(v);
        self.value.push(v);
    }

    pub fn push_anchor(&mut self) {
        debug_assert!(self.open.is_none());
        let m = self.len();
        self.rho.push(1.0);
        self.eta.push(0.0);
        self.value.push(f64::NAN);
        self.anchors.push(m);
        self.open = Some(m);
    }

    fn affine(&self, m: usize) -> (f64, f64) {
        match self.open {
            Some(start) if m >= start => (self.rho[m], self.eta[m]),
            _ => (0.0, self.value[m]),
        }
    }

    /// Applies the equation centred on the last pushed index. A zero `d`
    /// makes it a constraint and starts a new anchor.
    pub fn step(&mut self, p: f64, q: f64, d: f64, f: f64, at: (usize, usize)) -> Result<()> {
        let k = self.len() - 1;
        let (rp, ep) = if p == 0.0 { (0.0, 0.0) } else { self.affine(k - 1) };
        let (rq, eq) = self.affine(k);
        if d != 0.0 {
            let rho = (-p * rp - q * rq) / d;
            let eta = (f - p * ep - q * eq) / d;
            self.rho.push(rho);
            self.eta.push(eta);
            if self.open.is_some() {
                self.value.push(f64::NAN);
            } else {
                self.value.push(eta);
            }
            Ok(())
        } else {
            self.constrain(&[(k.wrapping_sub(1), p), (k, q)], f, at)?;
            self.push_anchor();
            Ok(())
        }
    }

    /// Imposes `sum c_m x_m = f`, fixing the open anchor if there is one.
    /// Constraints among known values only are taken as consistent.
    pub fn constrain(&mut self, terms: &[(usize, f64)], f: f64, at: (usize, usize)) -> Result<()> {
        let Some(start) = self.open else { return Ok(()) };
        let mut coef = 0.0;
        let mut size = 0.0;
        let mut rhs = f;
        for &(m, c) in terms {
            if c == 0.0 {
                continue;
            }
            let (r, e) = self.affine(m);
            coef += c * r;
            size += fabs(c * r);
            rhs -= c * e;
        }
        if !(fabs(coef) > DEGENERATE * size) {
            return Err(Error::ShiftUnresolvable { row: at.0, col: at.1 });
        }
        self.resolve(start, rhs / coef);
        Ok(())
    }

    /// Coefficient of the open anchor in `sum c_m x_m`, relative to the
    /// magnitude of its terms.
    pub fn anchor_weight(&self, terms: &[(usize, f64)]) -> f64 {
        let (mut coef, mut size) = (0.0, 0.0);
        for &(m, c) in terms {
            let (r, _) = self.affine(m);
            coef += c * r;
            size += fabs(c * r);
        }
        if size == 0.0 {
            0.0
        } else {
            fabs(coef) / size
        }
    }

    pub fn is_open(&self) -> bool {
        self.open.is_some()
    }

    fn resolve(&mut self, start: usize, a: f64) {
        for m in start..self.len() {
            self.value[m] = self.rho[m] * a + self.eta[m];
        }
        self.value[start] = a;
        self.open = None;
    }

    pub fn finish(self, at: (usize, usize)) -> Result<Vec<f64>> {
        if self.open.is_some() {
            return Err(Error::ShiftUnresolvable { row: at.0, col: at.1 });
        }
        Ok(self.value)
    }
}

/// First index `i >= from` whose up rate is zero (the last row for finite
/// matrices). Beyond it the corresponding rows of the inverse vanish.
pub(crate) fn next_zero_up(b: &StructuredMatrix, from: usize) -> usize {
    let n = b.size().expect("finite matrix");
    (from..n).find(|&i| b.rates(i).up == 0.0).unwrap_or(n - 1)
}

/// Prefix of the `rho` / `eta` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoEta {
    /// `rho[j]` for `j = 0..=up_to`; `rho[0] = 0` encodes `gamma_0 = 1`.
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    /// Indices starting a new segment (always begins with 1).
    pub anchors: Vec<usize>,
    /// Indices `j <= up_to` with `bd_j = 0`.
    pub zero_set: Vec<usize>,
}

/// `rho_j`, `eta_j` for `j <= up_to`, each relative to its segment anchor.
pub fn rho_eta(b: &StructuredMatrix, up_to: usize) -> Result<RhoEta> {
    if up_to == 0 {
        return Err(Error::InvalidArgument { reason: "rho/eta start at index 1" });
    }
    if let Some(n) = b.size() {
        if up_to >= n {
            return Err(Error::OutOfRange { i: 0, j: up_to, size: n });
        }
    }
    let mut walk = Walk::with_capacity(up_to + 1);
    walk.push_known(1.0);
    walk.push_anchor();
    for j in 1..up_to {
        let r = b.checked_rates(j)?;
        let p = b.rates(j - 1).up;
        let d = b.checked_rates(j + 1)?.down;
        walk.step(p, -r.weight(), d, 0.0, (0, j + 1))?;
    }
    let zero_set = (0..=up_to).filter(|&j| b.rates(j).down == 0.0).collect();
    let Walk { mut rho, mut eta, anchors, .. } = walk;
    rho[0] = 0.0;
    eta[0] = 1.0;
    Ok(RhoEta { rho, eta, anchors, zero_set })
}

/// Row 0 of the inverse of a finite matrix as `gamma` ratios, together with
/// the coefficients that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    /// `gamma[j] = c(0,j) / c(0,0)`, `gamma[0] = 1`.
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    pub anchors: Vec<usize>,
    pub zero_set: Vec<usize>,
}

impl GammaTable {
    /// Solves for every `gamma_j` of a finite matrix by forward recursion.
    /// Exact in exact arithmetic but the recursion amplifies rounding
    /// roughly like `1 / gamma_j`; keep it to small matrices.
    pub fn build(b: &StructuredMatrix) -> Result<Self> {
        let n = b.size().ok_or(Error::InfiniteExtent)?;
        let zero_set: Vec<usize> = (0..n).filter(|&j| b.rates(j).down == 0.0).collect();
        if n == 1 {
            return Ok(Self {
                gamma: alloc::vec![1.0],
                rho: alloc::vec![0.0],
                eta: alloc::vec![1.0],
                anchors: Vec::new(),
                zero_set,
            });
        }
        let cut = next_zero_up(b, 0);
        let mut walk = Walk::with_capacity(n);
        walk.push_known(1.0);
        if cut == 0 {
            // bu_0 = 0: nothing beyond index 0 is reachable.
            let mut gamma = alloc::vec![0.0; n];
            gamma[0] = 1.0;
            return Ok(Self {
                gamma,
                rho: alloc::vec![0.0; n],
                eta: alloc::vec![0.0; n],
                anchors: Vec::new(),
                zero_set,
            });
        }
        walk.push_anchor();
        for j in 1..cut {
            let r = b.rates(j);
            walk.step(b.rates(j - 1).up, -r.weight(), b.rates(j + 1).down, 0.0, (0, j + 1))?;
        }
        // column-0 equation, falling back to the last column equation
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(cut + 1);
        for j in 1..=cut {
            let r = b.rates(j);
            let c = if j == 1 { r.down + r.tozero } else { r.tozero };
            terms.push((j, c));
        }
        let bu0 = b.rates(0).up;
        let last = [(cut - 1, b.rates(cut - 1).up), (cut, -b.rates(cut).weight_closed())];
        if walk.is_open() && walk.anchor_weight(&terms) <= DEGENERATE {
            walk.constrain(&last, 0.0, (0, cut))?;
        } else {
            walk.constrain(&terms, bu0, (0, 1))?;
        }
        let Walk { mut rho, mut eta, anchors, .. } = walk.clone();
        let mut gamma = walk.finish((0, cut))?;
        rho[0] = 0.0;
        eta[0] = 1.0;
        gamma.resize(n, 0.0);
        rho.resize(n, 0.0);
        eta.resize(n, 0.0);
        Ok(Self { gamma, rho, eta, anchors, zero_set })
    }
}

impl crate::matrix::Rates {
    /// Row weight with the up rate dropped, as for a closing row.
    pub(crate) fn weight_closed(&self) -> f64 {
        self.tozero + self.down
    }
}

/// `gamma_1` on rows `0..=last` closed off at `last`. The coefficient chains
/// are rescaled jointly as they grow, so this stays finite for long
/// truncations; only ratios of them are ever used.
fn gamma1_truncated(b: &StructuredMatrix, last: usize) -> Result<f64> {
    let r0 = b.checked_rates(0)?;
    if last == 0 || r0.up == 0.0 {
        return Ok(0.0);
    }
    let rates = |j: usize| -> Result<crate::matrix::Rates> {
        let mut r = b.checked_rates(j)?;
        if j == last {
            r.up = 0.0;
        }
        Ok(r)
    };
    let (mut rp, mut ep) = (0.0, 1.0); // gamma_0
    let (mut rq, mut eq) = (1.0, 0.0); // gamma_1, the anchor
    let r1 = rates(1)?;
    // column-0 equation: s_rho * gamma_1 + s_eta = rhs
    let (mut s_rho, mut s_eta) = (r1.down + r1.tozero, 0.0);
    let mut rhs = r0.up;
    let mut j = 1;
    let mut up_prev = r0.up;
    loop {
        let r = rates(j)?;
        if j == last || r.up == 0.0 {
            break;
        }
        let next = rates(j + 1)?;
        if next.down == 0.0 {
            // the column-j equation no longer reaches j + 1 and fixes gamma_1
            let coef = up_prev * rp - r.weight() * rq;
            let rest = up_prev * ep - r.weight() * eq;
            if !(fabs(coef) > DEGENERATE * (fabs(up_prev * rp) + fabs(r.weight() * rq))) {
                return Err(Error::ShiftUnresolvable { row: 0, col: j });
            }
            return Ok(-rest / coef);
        }
        let rn = (r.weight() * rq - up_prev * rp) / next.down;
        let en = (r.weight() * eq - up_prev * ep) / next.down;
        rp = rq;
        ep = eq;
        rq = rn;
        eq = en;
        s_rho += next.tozero * rq;
        s_eta += next.tozero * eq;
        let m = fabs(rq).max(fabs(eq));
        if m > 1e100 {
            let s = 1.0 / m;
            rp *= s;
            ep *= s;
            rq *= s;
            eq *= s;
            s_rho *= s;
            s_eta *= s;
            rhs *= s;
        }
        up_prev = r.up;
        j += 1;
    }
    if fabs(s_rho) > DEGENERATE * fabs(s_eta).max(fabs(rhs)) {
        return Ok((rhs - s_eta) / s_rho);
    }
    // no return jumps in reach: use the closing column equation instead
    let w = rates(j)?.weight_closed();
    let coef = up_prev * rp - w * rq;
    if coef == 0.0 {
        return Err(Error::ZeroDenominator { what: "gamma_1", index: j });
    }
    Ok(-(up_prev * ep - w * eq) / coef)
}

/// Outcome of an adaptive truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma1 {
    pub value: f64,
    /// Final truncation level (last row index), or `None` when exact.
    pub level: Option<usize>,
    /// Relative change between the last two levels.
    pub change: f64,
}

/// `gamma_1 = c(0,1) / c(0,0)`. Finite matrices use the finite column-0
/// sum; infinite ones double the truncation level until two successive
/// values agree to `opts.tol` (relative).
pub fn gamma1(b: &StructuredMatrix, opts: &InvertOptions) -> Result<Gamma1> {
    match b.extent() {
        Extent::Finite(n) => {
            let value = gamma1_truncated(b, n - 1)?;
            Ok(Gamma1 { value, level: None, change: 0.0 })
        }
        Extent::Infinite => {
            let mut level = opts.initial_level.max(2);
            let mut prev = gamma1_truncated(b, level)?;
            loop {
                let next_level = level * 2;
                if next_level > opts.max_level {
                    return Err(Error::NoConvergence { level, change: f64::NAN });
                }
                let next = gamma1_truncated(b, next_level)?;
                let change = fabs(next - prev) / fabs(next).max(f64::MIN_POSITIVE);
                level = next_level;
                if change < opts.tol || next == prev {
                    return Ok(Gamma1 { value: next, level: Some(level), change });
                }
                if !change.is_finite() {
                    return Err(Error::NoConvergence { level, change });
                }
                prev = next;
            }
        }
    }
}
