//! Polarization mode dispersion (PMD) and polarization dependent loss (PDL)
//! in chains of optical elements, treated two ways:
//!
//! * [`pulse`]: an exact propagator that keeps the field as a finite sum of
//!   delayed Gaussians with Jones-spinor amplitudes;
//! * [`weak`]: closed-form weak-measurement expressions (ABL probabilities,
//!   pure and mixed post-selection weak values, the N-element network sum).
//!
//! The two are independent routes to the same mean time-of-arrival and are
//! cross-checked throughout the test suite.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod network;
pub mod optimizer;
pub mod polarization;
pub mod pulse;
pub mod weak;

pub use error::{Error, Result};
pub use network::{Element, NetworkSpec};
pub use polarization::{Axis3, JonesVector, Operator2};
pub use pulse::{GaussianSumState, PulseSpec};
pub use weak::WeakResult;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
