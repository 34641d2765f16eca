//! Stationary distributions, absorbing birth-and-death chains and discounted
//! value functions.
//!
//! A generator `Q` in the band-plus-first-column shape is described by a
//! [`BandSpec`] whose row 0 has `down = 0` (nothing leaves the chain).

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;

use crate::error::{Error, Result};
use crate::general::{invert, ratio_tables, sweep, Closed, Engine, InverseView, InvertOptions};
use crate::homogeneous::constants_of;
use crate::matrix::{BandSpec, Extent, Rates, StructuredMatrix};

fn check_generator(q: &BandSpec) -> Result<Rates> {
    let r0 = q.rates(0);
    if r0.down != 0.0 {
        return Err(Error::NotAGenerator { value: r0.down });
    }
    Ok(r0)
}

/// `Q(i, j)` of a generator, for `j` in `{0, i - 1, i, i + 1}`.
fn generator_entry(q: &BandSpec, i: usize, j: usize) -> f64 {
    let r = q.rates(i);
    match (i, j) {
        (0, 0) => -r.up,
        (0, 1) => r.up,
        (1, 0) => r.down + r.tozero,
        (_, 0) => r.tozero,
        _ if j == i => -r.weight(),
        _ if j + 1 == i => r.down,
        _ if j == i + 1 => r.up,
        _ => 0.0,
    }
}

/// Stationary distribution of a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// `pi[j]` for the states covered, all of them for a finite chain.
    pub pi: Vec<f64>,
    /// `||pi Q||_inf` over the covered columns.
    pub residual: f64,
    /// Last state of the truncation used for an infinite chain.
    pub level: Option<usize>,
    /// Relative change between the last two truncation levels.
    pub change: f64,
    /// Geometric estimate of the mass beyond `level` when the tail is
    /// homogeneous.
    pub tail_bound: Option<f64>,
}

/// `pi = d B^-1 / (d B^-1 1)` with `B = Q - e_0 d`. Only row 0 of the inverse
/// is formed, as running products of the row ratios.
pub fn steady_state(q: &BandSpec, opts: &InvertOptions) -> Result<SteadyState> {
    let r0 = check_generator(q)?;
    let b = StructuredMatrix::validate(q.with_row0(Rates { down: 1.0, ..r0 }))?;
    let (ratios, level, change) = match b.extent() {
        Extent::Finite(n) => (ratio_tables(&b, n, opts)?.r, None, 0.0),
        Extent::Infinite => {
            let t = ratio_tables(&b, opts.initial_level, opts)?;
            let level = t.level.expect("infinite tables are truncated");
            let (r, _) = sweep(&b, level, level + 1)?;
            (r, Some(level), t.change)
        }
    };
    // gamma_j = c(0,j) / c(0,0)
    let mut pi = Vec::with_capacity(ratios.len());
    let mut g = 1.0;
    pi.push(g);
    for &r in &ratios[1..] {
        g *= r;
        pi.push(g);
    }
    let total: f64 = pi.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NotNormalizable { sum: total });
    }
    pi.iter_mut().for_each(|p| *p /= total);

    let tail_bound = match (level, q.homogeneous_tail()) {
        (Some(l), Some(t)) if t < l => {
            let tail = q.rates(t.max(1));
            constants_of(&tail).ok().filter(|c| c.gamma < 1.0).map(|c| pi[l] * c.gamma / (1.0 - c.gamma))
        }
        _ => None,
    };
    let covered = if level.is_some() { pi.len() - 1 } else { pi.len() };
    let residual = generator_residual(q, &pi, covered);
    Ok(SteadyState { pi, residual, level, change, tail_bound })
}

/// `||pi Q||_inf` over columns `0..cols`, with `pi` treated as zero past its end.
pub fn generator_residual(q: &BandSpec, pi: &[f64], cols: usize) -> f64 {
    let n = pi.len();
    let mut worst: f64 = 0.0;
    for j in 0..cols {
        let sum: f64 = if j == 0 {
            (0..n).map(|i| pi[i] * generator_entry(q, i, 0)).sum()
        } else {
            (j - 1..(j + 2).min(n)).map(|i| pi[i] * generator_entry(q, i, j)).sum()
        };
        worst = worst.max(fabs(sum));
    }
    worst
}

/// The two absorbing layouts: every transient state leaks at the same rate
/// `bz` (with no down rate out of state 1), or the ordinary homogeneous
/// matrix with `bu_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AbsorbingVariant {
    #[default]
    Isolated,
    Homogeneous,
}

/// A birth-and-death chain on states `1, 2, ...` that leaks to an absorbing
/// state 0 at rate `bz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbingSpec {
    pub rates: Rates,
    pub extent: Extent,
    pub variant: AbsorbingVariant,
}

impl AbsorbingSpec {
    pub fn new(down: f64, up: f64, tozero: f64, extent: Extent) -> Self {
        Self { rates: Rates::new(down, up, tozero), extent, variant: AbsorbingVariant::Isolated }
    }

    pub fn with_variant(mut self, variant: AbsorbingVariant) -> Self {
        self.variant = variant;
        self
    }

    fn row(&self, i: usize) -> Rates {
        let r = self.rates;
        match i {
            0 => Rates::new(r.down, 0.0, 0.0),
            1 if self.variant == AbsorbingVariant::Isolated => Rates::new(0.0, r.up, r.tozero),
            _ => r,
        }
    }

    pub fn to_band(&self) -> Result<BandSpec> {
        let r = self.rates;
        if !(r.down > 0.0) || !(r.up > 0.0) {
            return Err(Error::ShapeMismatch { reason: "bd and bu must be positive" });
        }
        match self.extent {
            Extent::Infinite => {
                let this = *self;
                Ok(BandSpec::infinite(move |i| this.row(i)).with_homogeneous_tail(2))
            }
            Extent::Finite(n) if n < 2 => Err(Error::ShapeMismatch { reason: "needs at least two rows" }),
            Extent::Finite(n) => {
                let mut rows: Vec<Rates> = (0..n).map(|i| self.row(i)).collect();
                rows[n - 1].up = 0.0;
                Ok(BandSpec::finite(rows))
            }
        }
    }

    /// `c(1,1) = 1 / (B(1,1) + bd gamma)`, which for the isolated layout is
    /// `1 / (-bz - bu + bd gamma)`.
    pub fn c11(&self) -> Result<f64> {
        let consts = constants_of(&self.rates)?;
        let b11 = -self.row(1).weight();
        Ok(1.0 / (b11 + self.rates.down * consts.gamma))
    }
}

/// Recognises the absorbing layout in a finite matrix.
pub fn absorbing_shape(b: &StructuredMatrix) -> Result<AbsorbingSpec> {
    let n = b.size().ok_or(Error::InfiniteExtent)?;
    if n < 3 {
        return Err(Error::ShapeMismatch { reason: "needs at least three rows" });
    }
    let r0 = b.rates(0);
    if r0.up != 0.0 {
        return Err(Error::ShapeMismatch { reason: "row 0 must have bu_0 = 0" });
    }
    let r = b.rates(2);
    let rates = Rates::new(r0.down, r.up, r.tozero);
    if r.down != r0.down {
        return Err(Error::ShapeMismatch { reason: "bd_0 must equal the common down rate" });
    }
    for i in 2..n {
        let ri = b.rates(i);
        let up = if i + 1 == n { r.up } else { ri.up };
        if ri.down != r.down || up != r.up || ri.tozero != r.tozero {
            return Err(Error::ShapeMismatch { reason: "rows from 2 on must share their rates" });
        }
    }
    let r1 = b.rates(1);
    let variant = if r1 == Rates::new(0.0, r.up, r.tozero) {
        AbsorbingVariant::Isolated
    } else if r1 == r {
        AbsorbingVariant::Homogeneous
    } else {
        return Err(Error::ShapeMismatch { reason: "row 1 fits neither layout" });
    };
    Ok(AbsorbingSpec { rates, extent: Extent::Finite(n), variant })
}

/// Leading `n x n` block of the inverse. Row 0 vanishes past column 0; an
/// infinite chain is filled from the closed forms starting at `c(1,1)`, a
/// finite one goes through [`invert`].
pub fn absorbing_bd_invert(spec: &AbsorbingSpec, n: usize, opts: &InvertOptions) -> Result<InverseView> {
    let b = StructuredMatrix::validate(spec.to_band()?)?;
    if spec.extent != Extent::Infinite {
        return invert(&b, n, opts);
    }
    let consts = constants_of(&spec.rates)?;
    let closed = Closed {
        gamma: consts.gamma,
        psi: consts.psi,
        down: spec.rates.down,
        up: spec.rates.up,
        weight: spec.rates.weight(),
        absorbing: Some(spec.c11()?),
    };
    let mut view = InverseView::new(b, Engine::Closed(closed), *opts);
    view.materialize(n)?;
    Ok(view)
}

/// How [`value_function`] reached `Q_alpha^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRoute {
    /// Birth-and-death `Q`: discounting becomes an absorbing state in front.
    Absorbing,
    /// Band-plus-column `Q`: `Q_alpha` is a structured matrix plus a rank-one
    /// first-column term.
    RankOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub v: Vec<f64>,
    /// `||alpha V - c - Q V||_inf`
    pub residual: f64,
    pub route: ValueRoute,
}

/// Solves `alpha V = c + Q V` for a finite generator `Q`.
pub fn value_function(q: &BandSpec, cost: &[f64], alpha: f64, opts: &InvertOptions) -> Result<ValueFunction> {
    let r0 = check_generator(q)?;
    let n = q.extent().len().ok_or(Error::InfiniteExtent)?;
    if cost.len() != n {
        return Err(Error::InvalidArgument { reason: "cost vector length differs from the state count" });
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument { reason: "discount rate must be positive" });
    }
    let birth_death = (2..n).all(|i| q.rates(i).tozero == 0.0);
    let (v, route) = if birth_death {
        (absorbing_route(q, cost, alpha, opts)?, ValueRoute::Absorbing)
    } else {
        (rank_one_route(q, r0, cost, alpha, opts)?, ValueRoute::RankOne)
    };
    let residual = value_residual(q, cost, alpha, &v);
    Ok(ValueFunction { v, residual, route })
}

fn apply(view: &InverseView, x: &[f64], offset: usize) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| view.get(i + offset, j + offset).expect("materialized") * x[j]).sum())
        .collect()
}

/// `B = [[-1, 0], [alpha 1, Q - alpha I]]` is block lower triangular, so its
/// inverse holds `Q_alpha^-1` in the lower right block.
fn absorbing_route(q: &BandSpec, cost: &[f64], alpha: f64, opts: &InvertOptions) -> Result<Vec<f64>> {
    let n = cost.len();
    let mut rows = vec![Rates::new(1.0, 0.0, 0.0)];
    for i in 0..n {
        let r = q.rates(i);
        let down = if i == 0 { 0.0 } else if i == 1 { r.down + r.tozero } else { r.down };
        rows.push(Rates::new(down, r.up, alpha));
    }
    let b = StructuredMatrix::validate(BandSpec::finite(rows))?;
    let view = invert(&b, n + 1, opts)?;
    Ok(apply(&view, cost, 1).into_iter().map(|x| -x).collect())
}

/// `Q_alpha = B' + v d` where `B'` moves the discount into the first column
/// (`bd_0 = alpha`, `bz_i += alpha`) and `v = -alpha (0, 1, ..., 1)`.
fn rank_one_route(q: &BandSpec, r0: Rates, cost: &[f64], alpha: f64, opts: &InvertOptions) -> Result<Vec<f64>> {
    let n = cost.len();
    let mut rows = vec![Rates { down: alpha, ..r0 }];
    for i in 1..n {
        let r = q.rates(i);
        rows.push(Rates { tozero: r.tozero + alpha, ..r });
    }
    let b = StructuredMatrix::validate(BandSpec::finite(rows))?;
    let view = invert(&b, n, opts)?;
    let mut v = vec![-alpha; n];
    v[0] = 0.0;
    let y = apply(&view, cost, 0);
    let z = apply(&view, &v, 0);
    let a = 1.0 + z[0];
    if a == 0.0 {
        return Err(Error::ZeroScalarA);
    }
    let t = y[0] / a;
    Ok(y.iter().zip(&z).map(|(yi, zi)| -(yi - zi * t)).collect())
}

/// `||alpha V - c - Q V||_inf`
pub fn value_residual(q: &BandSpec, cost: &[f64], alpha: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut qv = generator_entry(q, i, 0) * v[0];
        for j in i.saturating_sub(1).max(1)..(i + 2).min(n) {
            qv += generator_entry(q, i, j) * v[j];
        }
        worst = worst.max(fabs(alpha * v[i] - cost[i] - qv));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_invert, DenseMatrix};

    #[test]
    fn two_states() {
        let q = BandSpec::from_arrays(&[0.0, 2.0], &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let s = steady_state(&q, &InvertOptions::default()).unwrap();
        assert!((s.pi[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.pi[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn one_state() {
        let q = BandSpec::from_arrays(&[0.0], &[0.0], &[0.0]).unwrap();
        assert_eq!(steady_state(&q, &InvertOptions::default()).unwrap().pi, [1.0]);
        let v = value_function(&q, &[3.0], 0.5, &InvertOptions::default()).unwrap();
        assert_eq!(v.v, [6.0]);
    }

    #[test]
    fn rejects_leaky_generator() {
        let q = BandSpec::from_arrays(&[1.0, 2.0], &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(steady_state(&q, &InvertOptions::default()).unwrap_err(), Error::NotAGenerator { value: 1.0 });
    }

    #[test]
    fn infinite_homogeneous_chain() {
        // birth-death with up 1, down 2: pi_j proportional to 2^-j past state 0
        let q = BandSpec::infinite(|i| if i == 0 { Rates::new(0.0, 1.0, 0.0) } else { Rates::new(2.0, 1.0, 0.0) })
            .with_homogeneous_tail(1);
        let s = steady_state(&q, &InvertOptions::default()).unwrap();
        // pi_0 = 1/2, pi_j = 2^-(j+1)
        for (j, p) in s.pi.iter().take(20).enumerate() {
            assert!((p - libm::pow(0.5, j as f64 + 1.0)).abs() < 1e-14, "{j}");
        }
        assert!(s.tail_bound.unwrap() < 1e-15);
    }

    #[test]
    fn absorbing_c11() {
        let spec = AbsorbingSpec::new(2.0, 1.0, 1.0, Extent::Infinite);
        assert!((spec.c11().unwrap() + 0.7071067811865475).abs() < 1e-15);
        let mut view = absorbing_bd_invert(&spec, 8, &InvertOptions::default()).unwrap();
        assert_eq!(view.element(0, 5).unwrap(), 0.0);
        assert_eq!(view.element(7, 0).unwrap(), -0.5);
        let finite = AbsorbingSpec { extent: Extent::Finite(200), ..spec };
        let b = StructuredMatrix::validate(finite.to_band().unwrap()).unwrap();
        let oracle = dense_invert(&b.to_dense(200)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((view.get(i, j).unwrap() - oracle[(i, j)]).abs() < 1e-12, "({i},{j})");
            }
        }
        assert_eq!(absorbing_shape(&b).unwrap(), finite);
    }

    #[test]
    fn homogeneous_variant_matches_dense() {
        let spec = AbsorbingSpec::new(1.0, 2.0, 0.5, Extent::Infinite).with_variant(AbsorbingVariant::Homogeneous);
        let view = absorbing_bd_invert(&spec, 6, &InvertOptions::default()).unwrap();
        let finite = AbsorbingSpec { extent: Extent::Finite(300), ..spec };
        let b = StructuredMatrix::validate(finite.to_band().unwrap()).unwrap();
        let oracle = dense_invert(&b.to_dense(300)).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                worst = worst.max((view.get(i, j).unwrap() - oracle[(i, j)]).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    fn dense_value(q: &BandSpec, cost: &[f64], alpha: f64) -> Vec<f64> {
        let n = cost.len();
        let mut qa = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                qa[(i, j)] = generator_entry(q, i, j) - if i == j { alpha } else { 0.0 };
            }
        }
        dense_invert(&qa).unwrap().mul_vec(cost).iter().map(|x| -x).collect()
    }

    #[test]
    fn value_routes() {
        let bd = BandSpec::from_arrays(&[0.0, 1.0, 2.0, 1.5], &[1.0, 0.5, 1.0, 0.0], &[0.0; 4]).unwrap();
        let col = BandSpec::from_arrays(&[0.0, 1.0, 2.0, 1.5], &[1.0, 0.5, 1.0, 0.0], &[0.0, 0.3, 0.7, 0.2]).unwrap();
        let cost = [1.0, -2.0, 0.5, 3.0];
        for (q, route) in [(bd, ValueRoute::Absorbing), (col, ValueRoute::RankOne)] {
            let v = value_function(&q, &cost, 0.1, &InvertOptions::default()).unwrap();
            assert_eq!(v.route, route);
            assert!(v.residual < 1e-12);
            let d = dense_value(&q, &cost, 0.1);
            for (a, b) in v.v.iter().zip(&d) {
                assert!((a - b).abs() < 1e-10);
            }
            let zero = value_function(&q, &[0.0; 4], 0.1, &InvertOptions::default()).unwrap();
            assert!(zero.v.iter().all(|x| *x == 0.0));
        }
    }
}
