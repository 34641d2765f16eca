//! Eigenvalues of a finite `B` from those of its tridiagonal part `W`.
//!
//! Write `B = W + u d` with `d` the first-column selector and expand
//! `u = sum_j n_j c_j` over eigenvectors of `W`. Adding the scaled vectors
//! one at a time, each as a first-column rank-one term, moves exactly one
//! eigenvalue per stage; the scalar for each stage is a root of a rational
//! equation in the first components only.

mod roots;
mod sturm;
mod update;
mod vectors;

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{StructuredMatrix, Tridiagonal};
use crate::oracle::{dense_eigen, DenseMatrix};

pub use roots::{f_value, polynomial_roots, solve_alpha};
pub use sturm::{symmetrize, Symmetrized};
pub use update::{rank_one_update, EigState};

/// Eigenvalues sorted ascending by real part (then imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_real(values: &[f64]) -> Self {
        Self::sorted(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn sorted(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_real_part(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
    }

    /// Greatest distance between matched values of two multisets of equal size,
    /// matching greedily by nearest neighbour. `INFINITY` when sizes differ.
    pub fn distance(&self, other: &Spectrum) -> f64 {
        multiset_distance(&self.values, &other.values)
    }
}

pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        for (k, y) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (x - y).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        if let Some((k, d)) = best {
            used[k] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigenvalues of a tridiagonal `W` whose off-diagonal products are positive.
pub fn tridiag_eigen(w: &Tridiagonal) -> Result<Spectrum> {
    if w.is_empty() {
        return Err(Error::Empty);
    }
    let s = symmetrize(w)?;
    Ok(Spectrum::from_real(&sturm::bisect_all(&s)))
}

/// Eigenvalues of `W` with eigenvectors `c_j = D q_j`, each scaled so its
/// largest entry is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EigBasis {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `first[j] = vectors[j][0]`
    pub first: Vec<f64>,
    /// Largest `||W c - lambda c||_inf`.
    pub residual: f64,
    sym: Symmetrized,
    q: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

pub fn eig_vectors(w: &Tridiagonal, spectrum: &Spectrum) -> Result<EigBasis> {
    let sym = symmetrize(w)?;
    let values = spectrum.real_parts();
    let q = vectors::symmetric_vectors(&sym, &values)?;
    let mut out = Vec::with_capacity(q.len());
    let mut norms = Vec::with_capacity(q.len());
    let mut residual: f64 = 0.0;
    for (k, qk) in q.iter().enumerate() {
        let mut c: Vec<f64> = qk.iter().zip(&sym.scale).map(|(a, d)| a * d).collect();
        // largest entry becomes +1
        let m = c.iter().fold(0.0f64, |m, &x| if fabs(x) > fabs(m) { x } else { m });
        c.iter_mut().for_each(|x| *x /= m);
        residual = residual.max(tridiagonal_residual(w, values[k], &c));
        norms.push(m);
        out.push(c);
    }
    let first = out.iter().map(|c| c[0]).collect();
    Ok(EigBasis { values, vectors: out, first, residual, sym, q, norms })
}

fn tridiagonal_residual(w: &Tridiagonal, lambda: f64, c: &[f64]) -> f64 {
    let n = c.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut r = (w.diag[i] - lambda) * c[i];
        if i > 0 {
            r += w.sub[i - 1] * c[i - 1];
        }
        if i + 1 < n {
            r += w.sup[i] * c[i + 1];
        }
        worst = worst.max(fabs(r));
    }
    worst
}

/// `u = sum_j n_j c_j`, keeping only the terms that matter.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    /// `n_j` for every eigenvector of the basis.
    pub coefficients: Vec<f64>,
    /// Indices kept, ascending by eigenvalue.
    pub retained: Vec<usize>,
    /// `n_j c_j` for each retained index, so they sum to `u`.
    pub scaled: Vec<Vec<f64>>,
    /// `||u - sum_j n_j c_j||_inf`
    pub residual: f64,
}

impl Expansion {
    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }
}

pub fn decompose_perturbation(u: &[f64], basis: &EigBasis) -> Result<Expansion> {
    let unorm = u.iter().fold(0.0f64, |m, x| m.max(fabs(*x)));
    // C = D Q N^-1, so C^-1 u = N Q^T D^-1 u
    let scaled_u: Vec<f64> = u.iter().zip(&basis.sym.scale).map(|(a, d)| a / d).collect();
    let coefficients: Vec<f64> = basis
        .q
        .iter()
        .zip(&basis.norms)
        .map(|(q, m)| m * q.iter().zip(&scaled_u).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let retained: Vec<usize> =
        (0..coefficients.len()).filter(|&j| fabs(coefficients[j]) >= 1e-12 * unorm && unorm > 0.0).collect();
    let scaled: Vec<Vec<f64>> = retained
        .iter()
        .map(|&j| basis.vectors[j].iter().map(|x| x * coefficients[j]).collect())
        .collect();
    let mut residual: f64 = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        let sum: f64 = scaled.iter().map(|c| c[i]).sum();
        residual = residual.max(fabs(ui - sum));
    }
    if !(residual <= 1e-8 * unorm.max(1.0)) {
        return Err(Error::IllConditionedBasis { residual });
    }
    Ok(Expansion { coefficients, retained, scaled, residual })
}

/// Gershgorin discs of `B`: centres `b_ii`, radii the off-diagonal row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GershgorinAudit {
    /// Every disc lies in the closed left half-plane.
    pub discs_left: bool,
    /// Every reported eigenvalue lies in the union of the discs.
    pub contained: bool,
    pub max_real_part: f64,
}

impl GershgorinAudit {
    pub fn passed(&self) -> bool {
        self.discs_left && self.contained && self.max_real_part < 0.0
    }
}

pub fn gershgorin_audit(b: &DenseMatrix, spectrum: &Spectrum) -> GershgorinAudit {
    let n = b.len();
    let mut discs = Vec::with_capacity(n);
    let mut discs_left = true;
    for i in 0..n {
        let centre = b[(i, i)];
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| fabs(b[(i, j)])).sum();
        // the radius equals -centre for i >= 1 up to summation order
        discs_left &= centre < 0.0 && radius <= -centre * (1.0 + 8.0 * f64::EPSILON);
        discs.push((centre, radius));
    }
    let contained = spectrum.values.iter().all(|z| {
        discs.iter().any(|&(c, r)| (z - Complex64::new(c, 0.0)).norm() <= r + 1e-9 * (r + fabs(c)))
    });
    GershgorinAudit { discs_left, contained, max_real_part: spectrum.max_real_part() }
}

/// Whether first components are negative up to some index and positive after
/// it, the pattern under which every stage scalar is real and positive.
pub fn sign_pattern_holds(first: &[f64]) -> bool {
    let flip = first.iter().position(|&x| x > 0.0).unwrap_or(first.len());
    first[..flip].iter().all(|&x| x < 0.0) && first[flip..].iter().all(|&x| x > 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub spectrum: Spectrum,
    /// Eigenvalues of the tridiagonal part, ascending.
    pub tridiagonal: Vec<f64>,
    /// Number of eigenvectors taking part in the expansion.
    pub stages: usize,
    pub alphas: Vec<Complex64>,
    pub all_real: bool,
    /// Sign pattern of the scaled first components, in stage order.
    pub sign_pattern: bool,
    pub vector_residual: f64,
    pub expansion_residual: f64,
    pub audit: GershgorinAudit,
    /// Distance to the dense eigenvalues when requested.
    pub oracle_distance: Option<f64>,
}

/// The full pipeline for a finite `B`.
pub fn eigenvalues_of_b(b: &StructuredMatrix, with_oracle: bool) -> Result<EigenReport> {
    let n = b.size().ok_or(Error::InfiniteExtent)?;
    let parts = b.decompose()?;
    let w = &parts.tridiagonal;
    let ws = tridiag_eigen(w)?;
    let basis = eig_vectors(w, &ws)?;
    let expansion = decompose_perturbation(&parts.perturbation, &basis)?;
    let lambda: Vec<f64> = expansion.retained.iter().map(|&j| basis.values[j]).collect();
    let first: Vec<f64> = expansion.scaled.iter().map(|c| c[0]).collect();
    let mut state = EigState::new(&lambda, &first);
    for stage in 0..state.len() {
        let alpha = solve_alpha(&state).map_err(|e| match e {
            Error::NoRootFound { .. } => Error::NoRootFound { stage },
            e => e,
        })?;
        state = rank_one_update(&state, alpha)?;
    }
    let mut values: Vec<Complex64> = basis.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for (k, &j) in expansion.retained.iter().enumerate() {
        values[j] = state.lambda[k];
    }
    let spectrum = Spectrum::sorted(values);
    let dense = b.to_dense(n);
    let audit = gershgorin_audit(&dense, &spectrum);
    let oracle_distance = if with_oracle {
        Some(spectrum.distance(&Spectrum::sorted(dense_eigen(&dense)?)))
    } else {
        None
    };
    Ok(EigenReport {
        all_real: state.alphas.iter().all(|a| a.im == 0.0),
        sign_pattern: sign_pattern_holds(&first),
        tridiagonal: basis.values.clone(),
        stages: state.len(),
        alphas: state.alphas,
        spectrum,
        vector_residual: basis.residual,
        expansion_residual: expansion.residual,
        audit,
        oracle_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::BandSpec;

    fn worked() -> StructuredMatrix {
        StructuredMatrix::validate(BandSpec::from_arrays(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).unwrap())
            .unwrap()
    }

    #[test]
    fn two_by_two_vectors() {
        let w = Tridiagonal { sub: vec![2.0], diag: vec![-3.0, -2.0], sup: vec![2.0] };
        let s = tridiag_eigen(&w).unwrap();
        let basis = eig_vectors(&w, &s).unwrap();
        assert!(basis.residual < 1e-10);
    }

    #[test]
    fn one_by_one() {
        let w = Tridiagonal { sub: vec![], diag: vec![-2.5], sup: vec![] };
        let s = tridiag_eigen(&w).unwrap();
        assert_eq!(s.values, [Complex64::new(-2.5, 0.0)]);
        assert_eq!(eig_vectors(&w, &s).unwrap().vectors, [vec![1.0]]);
    }

    #[test]
    fn single_vector_expansion() {
        let w = Tridiagonal { sub: vec![1.0, 2.0], diag: vec![-3.0, -3.0, -3.0], sup: vec![2.0, 1.0] };
        let basis = eig_vectors(&w, &tridiag_eigen(&w).unwrap()).unwrap();
        let u: Vec<f64> = basis.vectors[0].iter().map(|x| 3.0 * x).collect();
        let e = decompose_perturbation(&u, &basis).unwrap();
        assert_eq!(e.retained, [0]);
        assert!((e.coefficients[0] - 3.0).abs() < 1e-12);
        let zero = decompose_perturbation(&[0.0; 3], &basis).unwrap();
        assert!(zero.is_empty());
    }

    #[test]
    fn worked_spectrum() {
        let r = eigenvalues_of_b(&worked(), true).unwrap();
        let expect =
            Spectrum::from_real(&[-5.261802245259974, -3.339876886623185, -0.39832086811684597]);
        assert!(r.spectrum.distance(&expect) < 1e-6, "{:?}", r.spectrum);
        assert!(r.oracle_distance.unwrap() < 1e-6);
        assert!(r.audit.passed());
        assert!(r.expansion_residual < 1e-10);
    }

    #[test]
    fn sign_patterns() {
        assert!(sign_pattern_holds(&[-1.0, -2.0, 3.0]));
        assert!(sign_pattern_holds(&[1.0, 2.0]));
        assert!(!sign_pattern_holds(&[1.0, -2.0]));
        assert!(sign_pattern_holds(&[]));
    }
}
