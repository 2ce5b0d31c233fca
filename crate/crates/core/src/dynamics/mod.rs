//! Evolution of the Wigner function under the first-order transport PDE.
//!
//! Two solvers share one [`TransportField`]: exact back-tracing along
//! characteristics, and a semi-Lagrangian grid scheme. The moving frames and
//! the separable analytic profile live in [`frames`].

mod characteristics;
mod field;
pub mod frames;
mod grid;
mod initial;
mod semilagrangian;

pub use characteristics::{
    characteristics_on_grid, covering_geometry, evolve_characteristics, exp_integral, kanai_flow,
    CharacteristicsOutput, Ensemble, FlowMethod, LinearFlow, CHARACTERISTIC_TOLERANCE,
};
pub use field::{Gauge, RealVelocity, TransportField};
pub use grid::{GridGeometry, PhaseGrid, MIN_POINTS};
pub use initial::InitialCondition;
pub use semilagrangian::{
    evolve_semilagrangian, DisplacementWarning, Evolution, Interpolation, SemiLagrangian, DISPLACEMENT_WARNING_FRACTION,
};
