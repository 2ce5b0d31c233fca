//! Co-moving frames for phasor drives and the separable analytic profile.

use num_complex::Complex64;

use crate::gauge::{HarmonicDrive, PhysicalParams};
use crate::{relaxation, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

fn check_ac_phasor(drive: &HarmonicDrive) -> Result<()> {
    if !drive.is_phasor() {
        return Err(Error::UnsupportedFrame("moving frames need a phasor drive"));
    }
    if drive.omega <= 0.0 {
        return Err(Error::UnsupportedFrame("moving frames are singular at omega = 0"));
    }
    Ok(())
}

/// `eE(t)/(imω(α+iω))`, the oscillation amplitude removed from `q`.
fn position_offset(drive: &HarmonicDrive, params: &PhysicalParams, t: f64) -> Complex64 {
    let beta = relaxation(params.alpha, drive.omega);
    drive.field(t) * params.e / (Complex64::new(0.0, params.m * drive.omega) * beta)
}

/// A-gauge frame `(ξ, η, τ) = (q − eE/(imω(α+iω)), p, t)`.
pub fn moving_frame_a(
    q: f64,
    p: f64,
    t: f64,
    params: &PhysicalParams,
    drive: &HarmonicDrive,
) -> Result<(Complex64, Complex64, f64)> {
    check_ac_phasor(drive)?;
    let xi = Complex64::new(q, 0.0) - position_offset(drive, params, t);
    Ok((xi, Complex64::new(p, 0.0), t))
}

/// φ-gauge frame: same `ξ`, and `η' = p − eE(t)e^{αt}/(α+iω)`.
pub fn moving_frame_phi(
    q: f64,
    p: f64,
    t: f64,
    params: &PhysicalParams,
    drive: &HarmonicDrive,
) -> Result<(Complex64, Complex64, f64)> {
    check_ac_phasor(drive)?;
    let xi = Complex64::new(q, 0.0) - position_offset(drive, params, t);
    let beta = relaxation(params.alpha, drive.omega);
    let eta = Complex64::new(p, 0.0) - drive.field(t) * (params.e * (params.alpha * t).exp()) / beta;
    Ok((xi, eta, t))
}

/// Constants of the separable profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    /// Overall normalization `c`.
    pub c_norm: f64,
    /// Separation constant.
    pub k: f64,
    /// Momentum at which the line is concentrated.
    pub a: f64,
    /// Width of the Gaussian that stands in for `δ(η − a)`.
    pub sp: f64,
}

impl Default for AnalyticConstants {
    fn default() -> Self {
        AnalyticConstants { c_norm: 1.0, k: 0.5, a: 1.0, sp: 0.05 }
    }
}

impl AnalyticConstants {
    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if params.alpha <= 0.0 {
            return Err(Error::Domain("analytic profile needs alpha > 0"));
        }
        if self.a == 0.0 {
            return Err(Error::Domain("analytic profile is undefined for a = 0 (division by zero)"));
        }
        if !(self.sp > 0.0) {
            return Err(Error::Domain("mollifier width must be positive"));
        }
        Ok(())
    }
}

/// Unit-mass Gaussian of width `sp`.
pub(crate) fn mollifier(x: Complex64, sp: f64) -> Complex64 {
    let norm = 1.0 / (sp * (2.0 * core::f64::consts::PI).sqrt());
    (-(x * x) / (2.0 * sp * sp)).exp() * norm
}

/// `c · exp(−(kη/(aα)) e^{−ατ}) · exp(−(km/a) ξ) · G_sp(η − a)`.
///
/// On the line `η = a` this is `c·e^{−(k/α)e^{−ατ}} e^{−(km/a)ξ} δ(η−a)`;
/// keeping `η/a` in the time factor makes the mollified profile an exact
/// solution of `∂_τ w = −(η/m) e^{−ατ} ∂_ξ w` for every `sp`.
pub fn analytic_w(
    xi: Complex64,
    eta: Complex64,
    tau: f64,
    constants: &AnalyticConstants,
    params: &PhysicalParams,
) -> Result<Complex64> {
    constants.validate(params)?;
    let AnalyticConstants { c_norm, k, a, sp } = *constants;
    let alpha = params.alpha;
    let time_factor = (-(eta / a) * (k / alpha) * (-alpha * tau).exp()).exp();
    let space_factor = (-xi * (k * params.m / a)).exp();
    Ok(time_factor * space_factor * mollifier(eta - a, sp) * c_norm)
}
