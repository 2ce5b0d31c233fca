//! Extended-phase-space Wigner dynamics for damped charged particles.
//!
//! The crate is split along the physics pipeline:
//!
//! - [`algebra`]: normal-ordered polynomials in `q, p, π_q, π_p`, the SN and
//!   Wigner extended Hamiltonians, the Wigner unitary and the read-off of
//!   first-order transport coefficients.
//! - [`gauge`]: physical parameters, the harmonic drive and the A-/φ-gauge
//!   potentials together with the momentum shift relating them.
//! - [`dynamics`]: transport fields, exact characteristics, the
//!   semi-Lagrangian grid solver, moving frames and the analytic profile.
//! - [`observables`]: expectation values, mean velocity and conductivity.
//!
//! Everything here is allocation-only and IO-free; the crate builds without
//! `std`. The `parallel` feature enables data-parallel grid steps.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod dynamics;
mod error;
pub mod gauge;
pub mod observables;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `(α + iω)`, the complex relaxation rate that shows up everywhere once the
/// drive is written as a phasor.
#[inline]
pub(crate) fn relaxation(alpha: f64, omega: f64) -> Complex64 {
    Complex64::new(alpha, omega)
}
