//! The inverse `C = B^-1` for arbitrary rates.
//!
//! Column 0 is constant, `c(i,0) = -1 / bd_0`. Row 0 follows from the
//! `gamma` recursion of [`gamma`], and the remaining entries are filled stage
//! by stage: each stage extends the computed block by one row and column.
//!
//! Two evaluation schemes are available. [`Scheme::Ratio`] (the default)
//! propagates each row and column with ratios obtained by a backward sweep
//! over the rates and is accurate to a few ulps at any size.
//! [`Scheme::Forward`] runs the three-term recursions forwards exactly as
//! they are derived; it is exact in exact arithmetic but loses roughly a
//! digit per few rows, so it only suits small finite matrices.

mod forward;
mod gamma;
mod ratio;
mod view;

pub use forward::zero_up_rows;
pub use gamma::{gamma1, rho_eta, Gamma1, GammaTable, RhoEta};
pub use view::{InverseView, TruncationReport};

pub(crate) use ratio::{ratio_tables, sweep};
pub(crate) use view::{Closed, Engine};

use crate::error::{Error, Result};
use crate::matrix::StructuredMatrix;

/// Evaluation scheme for [`invert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Ratio,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertOptions {
    pub scheme: Scheme,
    /// Relative tolerance for adaptive truncation of infinite matrices.
    pub tol: f64,
    /// First truncation level tried (last row index).
    pub initial_level: usize,
    /// Give up with [`Error::NoConvergence`] beyond this level.
    pub max_level: usize,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self { scheme: Scheme::Ratio, tol: 1e-12, initial_level: 64, max_level: 1 << 20 }
    }
}

impl InvertOptions {
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// `c(i,0)`, the same for every row.
pub fn first_column_value(b: &StructuredMatrix) -> f64 {
    -1.0 / b.exit_rate()
}

/// Computes the leading `n x n` block of `B^-1`. The returned view can be
/// grown later through [`InverseView::element`].
pub fn invert(b: &StructuredMatrix, n: usize, opts: &InvertOptions) -> Result<InverseView> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument { reason: "tolerance must be positive" });
    }
    let engine = match opts.scheme {
        Scheme::Ratio => Engine::Ratio(ratio::ratio_tables(b, n + 2, opts)?),
        Scheme::Forward => {
            if b.size().is_none() {
                return Err(Error::InvalidArgument {
                    reason: "the forward scheme needs a finite matrix",
                });
            }
            let (table, _) = forward::forward_inverse(b)?;
            Engine::Table(table)
        }
    };
    let mut view = InverseView::new(b.clone(), engine, *opts);
    view.materialize(n)?;
    Ok(view)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{BandSpec, Extent, HomogeneousSpec};
    use crate::oracle::dense_invert;

    fn worked() -> StructuredMatrix {
        StructuredMatrix::validate(
            BandSpec::from_arrays(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn first_column() {
        assert_eq!(first_column_value(&worked()), -1.0);
        let b = StructuredMatrix::validate(BandSpec::from_arrays(&[2.0], &[0.0], &[0.0]).unwrap())
            .unwrap();
        assert_eq!(first_column_value(&b), -0.5);
        let v = invert(&b, 1, &InvertOptions::default()).unwrap();
        assert_eq!(v.get(0, 0), Some(-0.5));
    }

    #[test]
    fn worked_example_both_schemes() {
        let oracle = dense_invert(&worked().to_dense(3)).unwrap();
        for scheme in [Scheme::Ratio, Scheme::Forward] {
            let mut v = invert(&worked(), 3, &InvertOptions::default().with_scheme(scheme)).unwrap();
            assert!(v.block().max_abs_diff(&oracle) < 1e-14);
            assert!((v.element(0, 1).unwrap() + 6.0 / 7.0).abs() < 1e-15);
            assert!((v.element(1, 1).unwrap() + 9.0 / 7.0).abs() < 1e-15);
            assert!(v.residual() < 1e-14);
        }
    }

    #[test]
    fn lazy_growth() {
        let mut v = invert(&worked(), 1, &InvertOptions::default()).unwrap();
        assert_eq!(v.materialized(), 1);
        assert_eq!(v.element(2, 0).unwrap(), -1.0);
        assert_eq!(v.materialized(), 1);
        let a = v.element(2, 1).unwrap();
        assert_eq!(v.materialized(), 3);
        assert_eq!(a.to_bits(), v.element(2, 1).unwrap().to_bits());
        assert!(matches!(v.element(3, 0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn infinite_homogeneous_matches_closed_form() {
        let b = StructuredMatrix::from_homogeneous(&HomogeneousSpec::new(
            2.0,
            1.0,
            1.0,
            Extent::Infinite,
        ))
        .unwrap();
        let mut v = invert(&b, 4, &InvertOptions::default()).unwrap();
        assert!((v.element(1, 1).unwrap() + 0.43933982822017875).abs() < 1e-13);
        assert!((v.element(0, 3).unwrap() + 0.012563132923541826).abs() < 1e-14);
        assert!(v.report().level.is_some());
        let far = v.element(300, 300).unwrap();
        assert!((far + 1.0 / libm::sqrt(8.0)).abs() < 1e-12);
        assert!(v.residual() < 1e-12);
    }
}
