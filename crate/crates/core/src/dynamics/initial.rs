use alloc::boxed::Box;

use num_complex::Complex64;

use super::frames::{analytic_w, AnalyticConstants};
use super::GridGeometry;
use crate::gauge::PhysicalParams;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Initial Wigner function `w(q, p, 0)`.
///
/// Every variant is an entire function of `(q, p)`, so it can be evaluated at
/// the complex foot points produced by phasor-mode characteristics.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Unit-mass Gaussian packet.
    GaussianPacket { q0: f64, p0: f64, sq: f64, sp: f64 },
    /// The separable profile at `τ = 0`, with `ξ = q` and `η = p`.
    MollifiedDeltaLine { constants: AnalyticConstants, params: PhysicalParams },
    /// `base(q − dq, p − dp)`.
    Translated { base: Box<InitialCondition>, dq: f64, dp: f64 },
}

impl InitialCondition {
    pub fn gaussian(q0: f64, p0: f64, sq: f64, sp: f64) -> Self {
        InitialCondition::GaussianPacket { q0, p0, sq, sp }
    }

    pub fn translated(self, dq: f64, dp: f64) -> Self {
        InitialCondition::Translated { base: Box::new(self), dq, dp }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::GaussianPacket { q0, p0, sq, sp } => {
                if !(*sq > 0.0 && *sp > 0.0) {
                    return Err(Error::InvalidParameter { name: "initial widths", reason: "must be positive" });
                }
                if !(q0.is_finite() && p0.is_finite()) {
                    return Err(Error::InvalidParameter { name: "initial center", reason: "must be finite" });
                }
                Ok(())
            }
            InitialCondition::MollifiedDeltaLine { constants, params } => constants.validate(params),
            InitialCondition::Translated { base, .. } => base.validate(),
        }
    }

    pub fn evaluate(&self, q: Complex64, p: Complex64) -> Complex64 {
        match self {
            InitialCondition::GaussianPacket { q0, p0, sq, sp } => {
                let dq = (q - q0) / *sq;
                let dp = (p - p0) / *sp;
                let norm = 1.0 / (2.0 * core::f64::consts::PI * sq * sp);
                (-(dq * dq + dp * dp) * 0.5).exp() * norm
            }
            InitialCondition::MollifiedDeltaLine { constants, params } => {
                analytic_w(q, p, 0.0, constants, params).unwrap_or(Complex64::new(f64::NAN, 0.0))
            }
            InitialCondition::Translated { base, dq, dp } => base.evaluate(q - dq, p - dp),
        }
    }

    pub fn evaluate_real(&self, q: f64, p: f64) -> f64 {
        self.evaluate(Complex64::new(q, 0.0), Complex64::new(p, 0.0)).re
    }

    /// Packet center and widths, when the condition is a (translated) Gaussian.
    pub fn gaussian_moments(&self) -> Option<(f64, f64, f64, f64)> {
        match self {
            InitialCondition::GaussianPacket { q0, p0, sq, sp } => Some((*q0, *p0, *sq, *sp)),
            InitialCondition::Translated { base, dq, dp } => {
                base.gaussian_moments().map(|(q0, p0, sq, sp)| (q0 + dq, p0 + dp, sq, sp))
            }
            InitialCondition::MollifiedDeltaLine { .. } => None,
        }
    }

    /// Fraction of a Gaussian packet's mass inside the geometry's bounds.
    pub fn mass_fraction_inside(&self, geometry: &GridGeometry) -> Option<f64> {
        let (q0, p0, sq, sp) = self.gaussian_moments()?;
        let inside = |lo: f64, hi: f64, mu: f64, s: f64| {
            let z = |x: f64| (x - mu) / (s * core::f64::consts::SQRT_2);
            0.5 * (libm::erf(z(hi)) - libm::erf(z(lo)))
        };
        Some(inside(geometry.q_min, geometry.q_max, q0, sq) * inside(geometry.p_min, geometry.p_max, p0, sp))
    }
}
