use num_complex::Complex64;

use super::hamiltonian::{sn_from_polynomial, wigner_from_polynomial};
use super::{OperatorPolynomial, PhasePolynomial};
use crate::{Error, Result};

/// Terms of the adjoint series are summed until the next one is this small
/// relative to the running sum.
pub const SERIES_TOLERANCE: f64 = 1e-12;
pub const SERIES_MAX_TERMS: usize = 64;
/// Allowed disagreement between the closed-form and series conjugations.
pub const ROUTE_TOLERANCE: f64 = 1e-12;

/// Sign of the generator `X = ∓(i/2ħ) π_q π_p` of the Wigner unitary `e^X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSign {
    /// `X = −(i/2ħ) π_q π_p`.
    Minus,
    /// `X = +(i/2ħ) π_q π_p`.
    Plus,
}

impl GeneratorSign {
    fn factor(self) -> f64 {
        match self {
            GeneratorSign::Minus => -1.0,
            GeneratorSign::Plus => 1.0,
        }
    }
}

pub fn generator(hbar: f64, sign: GeneratorSign) -> OperatorPolynomial {
    let pi_pi = OperatorPolynomial::pi_q(hbar).multiply(&OperatorPolynomial::pi_p(hbar)).expect("same hbar");
    pi_pi.scale(Complex64::new(0.0, sign.factor() / (2.0 * hbar)))
}

/// `e^X a e^{−X} = Σ_n ad_Xⁿ(a)/n!`, truncated once a term is negligible.
pub fn adjoint_series(a: &OperatorPolynomial, sign: GeneratorSign) -> Result<OperatorPolynomial> {
    let x = generator(a.hbar(), sign);
    let mut sum = a.clone();
    let mut term = a.clone();
    for n in 1..=SERIES_MAX_TERMS {
        term = x.commutator(&term)?.scale_real(1.0 / n as f64);
        if term.is_zero() || term.max_abs_coefficient() < SERIES_TOLERANCE * sum.max_abs_coefficient() {
            return Ok(sum);
        }
        sum = sum.checked_add(&term)?;
    }
    Err(Error::SeriesNotConverged { terms: SERIES_MAX_TERMS })
}

/// Images of `q, p, π_q, π_p` under the adjoint action, from the series.
pub fn generator_images(hbar: f64, sign: GeneratorSign) -> Result<[OperatorPolynomial; 4]> {
    Ok([
        adjoint_series(&OperatorPolynomial::q(hbar), sign)?,
        adjoint_series(&OperatorPolynomial::p(hbar), sign)?,
        adjoint_series(&OperatorPolynomial::pi_q(hbar), sign)?,
        adjoint_series(&OperatorPolynomial::pi_p(hbar), sign)?,
    ])
}

/// Adjoint action as an algebra automorphism: every normal-ordered monomial
/// `q^a p^b π_q^c π_p^d` maps to the same product of generator images.
pub fn adjoint_closed_form(a: &OperatorPolynomial, sign: GeneratorSign) -> Result<OperatorPolynomial> {
    let hbar = a.hbar();
    let images = generator_images(hbar, sign)?;
    let mut out = OperatorPolynomial::zero(hbar);
    for (m, c) in a.terms() {
        let mut prod = OperatorPolynomial::constant(hbar, *c);
        for (image, exp) in images.iter().zip(m.exponents()) {
            for _ in 0..exp {
                prod = prod.multiply(image)?;
            }
        }
        out = out.checked_add(&prod)?;
    }
    Ok(out)
}

/// Outcome of fixing the generator sign against the Wigner Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCalibration {
    pub sign: GeneratorSign,
    pub deviation_minus: f64,
    pub deviation_plus: f64,
}

/// Conjugates the SN Hamiltonian of a generic quadratic probe with both signs
/// and keeps the one that reproduces the Wigner Hamiltonian.
pub fn calibrate_sign(hbar: f64) -> Result<SignCalibration> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let probe = PhasePolynomial::from_terms([
        ((0, 0), c(1.0)),
        ((1, 0), c(2.0)),
        ((0, 1), c(3.0)),
        ((2, 0), c(5.0)),
        ((1, 1), c(7.0)),
        ((0, 2), c(11.0)),
    ]);
    let sn = sn_from_polynomial(&probe, hbar);
    let target = wigner_from_polynomial(&probe, hbar);
    let deviation_minus = adjoint_closed_form(&sn, GeneratorSign::Minus)?.max_relative_deviation(&target);
    let deviation_plus = adjoint_closed_form(&sn, GeneratorSign::Plus)?.max_relative_deviation(&target);
    let sign = if deviation_minus < ROUTE_TOLERANCE {
        GeneratorSign::Minus
    } else if deviation_plus < ROUTE_TOLERANCE {
        GeneratorSign::Plus
    } else {
        return Err(Error::RouteMismatch {
            what: "generator sign calibration",
            deviation: deviation_minus.min(deviation_plus),
        });
    };
    Ok(SignCalibration { sign, deviation_minus, deviation_plus })
}

/// `U a U†` for the Wigner unitary, with the generator sign calibrated first.
///
/// The closed form and the truncated series are both evaluated; they must
/// agree to [`ROUTE_TOLERANCE`].
pub fn conjugate_by_wigner_unitary(a: &OperatorPolynomial) -> Result<OperatorPolynomial> {
    let sign = calibrate_sign(a.hbar())?.sign;
    let closed = adjoint_closed_form(a, sign)?;
    let series = adjoint_series(a, sign)?;
    let deviation = closed.max_relative_deviation(&series);
    if deviation > ROUTE_TOLERANCE {
        return Err(Error::RouteMismatch { what: "wigner conjugation", deviation });
    }
    Ok(closed)
}
