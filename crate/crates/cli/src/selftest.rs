//! Worked examples with known answers, plus a seeded three-way
//! consistency sweep.

use std::thread;

use bandinv::apps::{absorbing_bd_invert, steady_state, value_function, AbsorbingSpec};
use bandinv::homogeneous::{hom_constants, hom_finite_invert, hom_invert};
use bandinv::oracle::{dense_eigen, dense_invert, sherman_morrison_invert, DenseMatrix};
use bandinv::spectral::{eigenvalues_of_b, tridiag_eigen, Spectrum};
use bandinv::matrix::Tridiagonal;
use bandinv::{invert, BandSpec, Extent, HomogeneousSpec, InvertOptions, Rates, StructuredMatrix, Truncation};

use crate::error::CliError;
use crate::suite;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Largest deviation from the expected values.
    pub error: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tol
    }
}

/// Pairwise deviations of the structured inverse, the Sherman-Morrison
/// baseline and dense LU on one finite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeWay {
    pub structured_dense: f64,
    pub sm_dense: f64,
    pub structured_sm: f64,
    /// `max |BC - I|` of the structured inverse.
    pub residual: f64,
}

impl ThreeWay {
    pub fn worst(&self) -> f64 {
        self.structured_dense.max(self.sm_dense).max(self.structured_sm)
    }
}

pub fn three_way(b: &StructuredMatrix) -> Result<ThreeWay, CliError> {
    let n = b.size().ok_or(bandinv::Error::InfiniteExtent)?;
    let view = invert(b, n, &InvertOptions::default())?;
    let c = view.block();
    let dense = dense_invert(&b.to_dense(n))?;
    let parts = b.decompose()?;
    let sm = sherman_morrison_invert(&dense_invert(&parts.tridiagonal.to_dense())?, &parts.perturbation)?;
    Ok(ThreeWay {
        structured_dense: c.max_abs_diff(&dense),
        sm_dense: sm.max_abs_diff(&dense),
        structured_sm: c.max_abs_diff(&sm),
        residual: view.residual(),
    })
}

pub fn worked_matrix() -> StructuredMatrix {
    let spec = BandSpec::from_arrays(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).expect("equal lengths");
    StructuredMatrix::validate(spec).expect("valid")
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn worked() -> Result<Vec<Check>, CliError> {
    let b = worked_matrix();
    let view = invert(&b, 3, &InvertOptions::default())?;
    let oracle = dense_invert(&b.to_dense(3))?;
    let col0: Vec<f64> = (0..3).map(|i| view.get(i, 0).unwrap_or(f64::NAN)).collect();
    let gammas = [view.gamma(1).unwrap_or(f64::NAN), view.gamma(2).unwrap_or(f64::NAN)];
    Ok(vec![
        Check { name: "worked row 0", error: max_dev(view.row0(), &[-1.0, -6.0 / 7.0, -2.0 / 7.0]), tol: 1e-12 },
        Check { name: "worked column 0", error: max_dev(&col0, &[-1.0; 3]), tol: 1e-12 },
        Check { name: "worked gammas", error: max_dev(&gammas, &[6.0 / 7.0, 2.0 / 7.0]), tol: 1e-12 },
        Check { name: "worked inverse vs dense LU", error: view.block().max_abs_diff(&oracle), tol: 1e-12 },
        Check { name: "worked residual", error: view.residual(), tol: 1e-12 },
    ])
}

fn homogeneous() -> Result<Vec<Check>, CliError> {
    let spec = HomogeneousSpec::new(2.0, 1.0, 1.0, Extent::Infinite);
    let k = hom_constants(&spec)?;
    let gamma = 1.0 - 0.5f64.sqrt();
    let mut view = hom_invert(&spec, 4, &InvertOptions::default())?;
    let c11 = view.element(1, 1)?;
    let c03 = view.element(0, 3)?;
    let special = HomogeneousSpec::new(2.0, 1.0, 1.0, Extent::Finite(7)).with_truncation(Truncation::Special);
    let fin = hom_finite_invert(&special)?;
    let b = StructuredMatrix::from_homogeneous(&special)?;
    let oracle = dense_invert(&b.to_dense(7))?;
    Ok(vec![
        Check { name: "homogeneous gamma and psi", error: max_dev(&[k.gamma, k.psi], &[gamma, 2.0 * gamma]), tol: 1e-15 },
        Check { name: "homogeneous c(1,1)", error: (c11 + 1.5 / (4.0 - 2.0 * gamma)).abs(), tol: 1e-15 },
        Check { name: "homogeneous c(0,3)", error: (c03 + 0.5 * gamma.powi(3)).abs(), tol: 1e-15 },
        Check { name: "diagonal limit", error: (k.diagonal_limit()? + 1.0 / 8f64.sqrt()).abs(), tol: 1e-15 },
        Check { name: "special truncation vs dense LU", error: fin.block().max_abs_diff(&oracle), tol: 1e-9 },
        Check { name: "special truncation residual", error: fin.residual(), tol: 1e-10 },
    ])
}

fn applications() -> Result<Vec<Check>, CliError> {
    let q = BandSpec::finite(vec![Rates::new(0.0, 1.0, 0.0), Rates::new(2.0, 0.0, 0.0)]);
    let pi = steady_state(&q, &InvertOptions::default())?;
    let abs = AbsorbingSpec::new(2.0, 1.0, 1.0, Extent::Infinite);
    let mut view = absorbing_bd_invert(&abs, 8, &InvertOptions::default())?;
    let c11 = 1.0 / (-2.0 + 2.0 * (1.0 - 0.5f64.sqrt()));
    let zeros = [view.element(0, 5)?, view.element(7, 0)? + 0.5];
    let one = BandSpec::finite(vec![Rates::new(0.0, 0.0, 0.0)]);
    let v1 = value_function(&one, &[3.0], 0.5, &InvertOptions::default());
    let v1_err = match v1 {
        Ok(v) => (v.v[0] - 6.0).abs(),
        Err(_) => f64::INFINITY,
    };
    Ok(vec![
        Check { name: "two-state stationary", error: max_dev(&pi.pi, &[2.0 / 3.0, 1.0 / 3.0]), tol: 1e-12 },
        Check { name: "absorbing c(1,1)", error: (view.element(1, 1)? - c11).abs(), tol: 1e-12 },
        Check { name: "absorbing zero row and column 0", error: max_dev(&zeros, &[0.0, 0.0]), tol: 0.0 },
        Check { name: "one-state value function", error: v1_err, tol: 1e-15 },
    ])
}

fn spectral() -> Result<Vec<Check>, CliError> {
    let w = Tridiagonal { sub: vec![2.0], diag: vec![-3.0, -2.0], sup: vec![2.0] };
    let s = tridiag_eigen(&w)?;
    let root = 17f64.sqrt() / 2.0;
    let expect = Spectrum::from_real(&[-2.5 - root, -2.5 + root]);
    let b = worked_matrix();
    let report = eigenvalues_of_b(&b, false)?;
    let oracle = Spectrum::sorted(dense_eigen(&b.to_dense(3))?);
    let diag = DenseMatrix::from_rows(&[&[-1.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, -3.0]]);
    let d = Spectrum::sorted(dense_eigen(&diag)?);
    Ok(vec![
        Check { name: "2x2 tridiagonal spectrum", error: s.distance(&expect), tol: 1e-12 },
        Check { name: "dense eigen of a diagonal", error: d.distance(&Spectrum::from_real(&[-3.0, -2.0, -1.0])), tol: 1e-14 },
        Check { name: "worked spectrum vs dense eigen", error: report.spectrum.distance(&oracle), tol: 1e-6 },
        Check {
            name: "worked Gershgorin audit",
            error: if report.audit.passed() { 0.0 } else { 1.0 },
            tol: 0.0,
        },
    ])
}

/// Three-way consistency over `count` seeded matrices, split over `jobs`
/// threads.
pub fn consistency(seed: u64, count: usize, jobs: usize) -> Result<Check, CliError> {
    let cases = suite::general_suite(seed, count);
    let jobs = jobs.max(1);
    let chunk = cases.len().div_ceil(jobs).max(1);
    let worst = thread::scope(|scope| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || -> Result<f64, CliError> {
                    part.iter().try_fold(0.0f64, |m, c| Ok(m.max(three_way(&c.matrix)?.worst())))
                })
            })
            .collect();
        handles.into_iter().try_fold(0.0f64, |m, h| Ok::<_, CliError>(m.max(h.join().expect("worker panicked")?)))
    })?;
    Ok(Check { name: "three-way consistency", error: worst, tol: 1e-8 })
}

pub fn run(seed: u64, count: usize, jobs: usize) -> Result<Vec<Check>, CliError> {
    let mut out = worked()?;
    out.extend(homogeneous()?);
    out.extend(applications()?);
    out.extend(spectral()?);
    out.push(consistency(seed, count, jobs)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run(3, 20, 2).unwrap() {
            assert!(c.passed(), "{} off by {:e}", c.name, c.error);
        }
    }
}
