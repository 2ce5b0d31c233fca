//! Physical scenario: parameters, the harmonic drive and the two gauges.
//!
//! The drive is always harmonic. In phasor mode `E(t) = E₀e^{i(ωt+φ)}`; in
//! real mode every quantity is the real part of its phasor counterpart, which
//! is exact because all maps used here are linear in the field.

use num_complex::Complex64;

use crate::{relaxation, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Particle and medium constants, natural units by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub m: f64,
    pub e: f64,
    /// Speed-of-light constant multiplying the vector potential.
    pub c: f64,
    /// Damping constant α (1/time).
    pub alpha: f64,
    pub hbar: f64,
    /// Particle count entering the conductivity.
    pub n: u32,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { m: 1.0, e: 1.0, c: 1.0, alpha: 0.5, hbar: 1.0, n: 1 }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.m > 0.0 && self.m.is_finite()) {
            return bad("m", "mass must be positive and finite");
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return bad("hbar", "hbar must be positive and finite");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha", "damping must be non-negative and finite");
        }
        if self.n == 0 {
            return bad("N", "particle count must be at least 1");
        }
        if !self.e.is_finite() {
            return bad("e", "charge must be finite");
        }
        if !(self.c.is_finite() && self.c != 0.0) {
            return bad("c", "light-speed constant must be finite and non-zero");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriveRepresentation {
    /// `E(t) = E₀ cos(ωt + φ)`.
    #[default]
    RealCosine,
    /// `E(t) = E₀ e^{i(ωt + φ)}`.
    ComplexPhasor,
}

/// Uniform harmonic electric field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicDrive {
    pub e0: f64,
    pub omega: f64,
    pub phase: f64,
    pub representation: DriveRepresentation,
}

impl HarmonicDrive {
    pub fn real(e0: f64, omega: f64, phase: f64) -> Self {
        HarmonicDrive { e0, omega, phase, representation: DriveRepresentation::RealCosine }
    }

    pub fn phasor(e0: f64, omega: f64, phase: f64) -> Self {
        HarmonicDrive { e0, omega, phase, representation: DriveRepresentation::ComplexPhasor }
    }

    pub fn off() -> Self {
        Self::real(0.0, 0.0, 0.0)
    }

    pub fn is_phasor(&self) -> bool {
        self.representation == DriveRepresentation::ComplexPhasor
    }

    pub fn validate(&self) -> Result<()> {
        if !self.e0.is_finite() {
            return Err(Error::InvalidParameter { name: "E0", reason: "amplitude must be finite" });
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "angular frequency must be non-negative and finite",
            });
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidParameter { name: "phase", reason: "phase must be finite" });
        }
        Ok(())
    }

    /// `E₀e^{iφ}`.
    pub fn complex_amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.e0, self.phase)
    }

    /// Projects a phasor-mode quantity onto this drive's representation.
    pub fn project(&self, z: Complex64) -> Complex64 {
        match self.representation {
            DriveRepresentation::ComplexPhasor => z,
            DriveRepresentation::RealCosine => Complex64::new(z.re, 0.0),
        }
    }

    pub fn field(&self, t: f64) -> Complex64 {
        self.project(Complex64::from_polar(self.e0, self.omega * t + self.phase))
    }

    /// Period `2π/ω`, `None` for a DC drive.
    pub fn period(&self) -> Option<f64> {
        (self.omega > 0.0).then(|| 2.0 * core::f64::consts::PI / self.omega)
    }
}

fn steady_rate(drive: &HarmonicDrive, params: &PhysicalParams) -> Result<Complex64> {
    if params.alpha == 0.0 && drive.omega == 0.0 {
        return Err(Error::UndefinedAntiderivative);
    }
    Ok(relaxation(params.alpha, drive.omega))
}

/// Vector potential `A(t) = −c∫^t e^{αλ}E(λ)dλ`, taking the antiderivative
/// with no additive constant: `A = −cE₀e^{(α+iω)t+iφ}/(α+iω)`.
pub fn a_gauge_potential(drive: &HarmonicDrive, params: &PhysicalParams, t: f64) -> Result<Complex64> {
    let beta = steady_rate(drive, params)?;
    let a = -params.c * drive.complex_amplitude() * (beta * t).exp() / beta;
    Ok(drive.project(a))
}

/// Scalar potential `φ(q,t) = −qE(t)`.
pub fn phi_gauge_potential(drive: &HarmonicDrive, q: f64, t: f64) -> Complex64 {
    -drive.field(t) * q
}

/// `Δp(t) = −(e/c)A(t)`: the amount by which the φ-gauge canonical momentum
/// exceeds the A-gauge one for the same physical state.
pub fn gauge_momentum_shift(drive: &HarmonicDrive, params: &PhysicalParams, t: f64) -> Result<Complex64> {
    Ok(-a_gauge_potential(drive, params, t)? * (params.e / params.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    fn unit(alpha: f64) -> PhysicalParams {
        PhysicalParams { alpha, ..PhysicalParams::default() }
    }

    #[test]
    fn zero_field_gives_zero_potentials() {
        let drive = HarmonicDrive::phasor(0.0, 1.3, 0.2);
        for t in [0.0, 0.7, 3.0] {
            assert_eq!(a_gauge_potential(&drive, &unit(0.5), t).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(phi_gauge_potential(&drive, 1.7, t).norm(), 0.0);
            assert_eq!(gauge_momentum_shift(&drive, &unit(0.5), t).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn dc_damped_potential_at_origin() {
        let drive = HarmonicDrive::phasor(1.0, 0.0, 0.0);
        let a = a_gauge_potential(&drive, &unit(1.0), 0.0).unwrap();
        assert_eq!(a, Complex64::new(-1.0, 0.0));
        assert_eq!(gauge_momentum_shift(&drive, &unit(1.0), 0.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn potential_increment_matches_quadrature() {
        // A(t) − A(0) = −c∫₀^t e^{αs}E(s)ds, the constant drops out of differences.
        let params = PhysicalParams { c: 1.7, alpha: 0.4, ..PhysicalParams::default() };
        let drive = HarmonicDrive::real(0.8, 1.9, 0.3);
        let t = 2.6;
        let quad = integrate(|s| (params.alpha * s).exp() * drive.field(s).re, 0.0, t, 1e-12);
        let diff = a_gauge_potential(&drive, &params, t).unwrap() - a_gauge_potential(&drive, &params, 0.0).unwrap();
        assert_relative_eq!(diff.re, -params.c * quad, max_relative = 1e-10);
    }

    #[test]
    fn potential_derivative_recovers_field() {
        let params = PhysicalParams { c: 2.0, alpha: 0.3, ..PhysicalParams::default() };
        for drive in [HarmonicDrive::real(1.1, 2.0, 0.4), HarmonicDrive::phasor(1.1, 2.0, 0.4)] {
            for t in [0.1, 1.37, 4.2] {
                let h = 1e-5;
                let da = (a_gauge_potential(&drive, &params, t + h).unwrap()
                    - a_gauge_potential(&drive, &params, t - h).unwrap())
                    / (2.0 * h);
                let e_rec = -da / params.c * (-params.alpha * t).exp();
                assert!((e_rec - drive.field(t)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn phi_potential_dc() {
        let drive = HarmonicDrive::real(1.0, 0.0, 0.0);
        for t in [0.0, 5.0, -3.0] {
            assert_eq!(phi_gauge_potential(&drive, 2.0, t), Complex64::new(-2.0, 0.0));
        }
        assert_eq!(phi_gauge_potential(&drive, 0.0, 1.0).norm(), 0.0);
    }

    #[test]
    fn shift_matches_phasor_offset() {
        let params = PhysicalParams { e: 1.4, c: 0.9, alpha: 0.6, ..PhysicalParams::default() };
        let drive = HarmonicDrive::phasor(0.7, 1.5, -0.2);
        let beta = relaxation(params.alpha, drive.omega);
        for t in [0.0, 0.33, 2.5, 7.0] {
            let expected = drive.field(t) * params.e * (params.alpha * t).exp() / beta;
            let got = gauge_momentum_shift(&drive, &params, t).unwrap();
            assert!((got - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn undamped_dc_is_rejected() {
        let drive = HarmonicDrive::phasor(1.0, 0.0, 0.0);
        assert_eq!(a_gauge_potential(&drive, &unit(0.0), 1.0), Err(Error::UndefinedAntiderivative));
        assert!(gauge_momentum_shift(&drive, &unit(0.0), 1.0).is_err());
    }

    #[test]
    fn undamped_ac_reduces_to_textbook_form() {
        // α → 0: A = −cE₀ sin(ωt)/ω for a cosine drive.
        let drive = HarmonicDrive::real(1.0, 2.0, 0.0);
        let t = 0.8;
        let a = a_gauge_potential(&drive, &unit(0.0), t).unwrap();
        assert_relative_eq!(a.re, -(2.0 * t).sin() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::default().validate().is_ok());
        assert!(PhysicalParams { m: 0.0, ..Default::default() }.validate().is_err());
        assert!(PhysicalParams { hbar: -1.0, ..Default::default() }.validate().is_err());
        assert!(PhysicalParams { n: 0, ..Default::default() }.validate().is_err());
        assert!(PhysicalParams { alpha: -0.1, ..Default::default() }.validate().is_err());
        assert!(HarmonicDrive::real(f64::NAN, 1.0, 0.0).validate().is_err());
        assert!(HarmonicDrive::real(1.0, -1.0, 0.0).validate().is_err());
    }
}
