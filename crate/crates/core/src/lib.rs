//! Numerical comparison geometry on warped products.
//!
//! The crate is `no_std` (with `alloc`) and contains every computation of the
//! toolkit: an adaptive Runge–Kutta integrator with dense output, adaptive
//! quadrature with semi-infinite tails, limit extrapolation, warped-product
//! models, the scalar Jacobi comparison machinery, tube volumes and asymptotic
//! volume ratios, and the assembly of Willmore-type verification reports.
//!
//! IO, configuration files and the command-line front end live in the
//! `willmore` companion crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod avr;
pub mod comparison;
mod error;
pub mod manifold;
pub(crate) mod math;
pub mod numerics;
pub mod willmore;

pub use error::{Error, Result};
