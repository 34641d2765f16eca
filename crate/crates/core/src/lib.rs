//! Exact inversion and spectra of countable rate matrices that are tridiagonal
//! apart from a dense first column.
//!
//! The matrices handled here have the shape
//!
//! ```text
//! | -bd0-bu0   bu0                          |
//! | bd1+bz1   -bw1    bu1                   |
//! | bz2        bd2   -bw2    bu2            |
//! | bz3        0      bd3   -bw3    bu3     |
//! |  ...                                    |
//! ```
//!
//! with `bw_i = bz_i + bd_i + bu_i`, so that every row but the first sums to
//! zero. They appear whenever a Markov chain is lumped onto a single "return"
//! state, in absorbing birth-and-death chains and in discounted cost problems.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised as follows:
//!
//! * [`matrix`] defines and validates the structure ([`BandSpec`],
//!   [`StructuredMatrix`]) and splits it into a tridiagonal part plus a
//!   first-column perturbation.
//! * [`general`] computes `C = B^-1` entry by entry for arbitrary rates, finite
//!   or infinite, including zero rates.
//! * [`homogeneous`] covers rows that all share the same rates, where every
//!   entry has a closed form.
//! * [`spectral`] builds the eigenvalues of `B` from those of its tridiagonal
//!   part through a chain of rank-one first-column updates.
//! * [`apps`] has stationary distributions, absorbing birth-and-death chains
//!   and discounted value functions.
//! * [`oracle`] holds slow dense reference implementations used for
//!   verification.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apps;
mod error;
pub mod general;
pub mod homogeneous;
pub mod matrix;
pub mod oracle;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use general::{invert, InverseView, InvertOptions, Scheme};
pub use matrix::{BandSpec, Extent, HomogeneousSpec, Rates, StructuredMatrix, Truncation};
