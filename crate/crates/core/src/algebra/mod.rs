//! Noncommutative polynomial algebra over `{q, p, π_q, π_p}`.
//!
//! Only `[π_q, q] = [π_p, p] = −iħ` are non-zero. On top of the product this
//! module builds the SN and Wigner extended Hamiltonians of a classical
//! polynomial Hamiltonian, the Wigner unitary's adjoint action, and the
//! transport velocities carried by a first-order Wigner generator.

mod hamiltonian;
mod phase;
mod polynomial;
mod transport;
mod unitary;

pub use hamiltonian::{
    build_sn_hamiltonian, build_wigner_hamiltonian, sn_from_polynomial, sn_series_form, substitute,
    wigner_from_polynomial, HamiltonianKind, HamiltonianSpec,
};
pub use phase::PhasePolynomial;
pub use polynomial::{Monomial, OperatorPolynomial};
pub use transport::{transport_coefficients, FieldSnapshot};
pub use unitary::{
    adjoint_closed_form, adjoint_series, calibrate_sign, conjugate_by_wigner_unitary, generator, generator_images,
    GeneratorSign, SignCalibration, ROUTE_TOLERANCE, SERIES_MAX_TERMS, SERIES_TOLERANCE,
};
